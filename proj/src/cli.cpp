#include "kepler_balance/cli.hpp"

#include "kepler_balance/acceptance.hpp"
#include "kepler_balance/asymptotics.hpp"
#include "kepler_balance/error.hpp"
#include "kepler_balance/kernel.hpp"
#include "kepler_balance/lerch.hpp"
#include "kepler_balance/poincare.hpp"
#include "kepler_balance/profiles.hpp"
#include "kepler_balance/rational.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <variant>

namespace kb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) { return std::isfinite(x) ? fmt::format("{:.17g}", x) : std::string("nan"); }
std::string json_num(double x) { return std::isfinite(x) ? fmt::format("{:.17g}", x) : std::string("null"); }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += ch;
    }
  }
  return out + "\"";
}

double parse_number(const std::string& text, const char* what) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  return x;
}

// Ordered key/value pairs written as one JSON object.
class JsonObject {
 public:
  using Value = std::variant<std::nullptr_t, bool, double, std::string, std::vector<double>, std::vector<std::string>>;

  JsonObject& add(std::string key, Value value) {
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  void write(std::ostream& os) const {
    os << "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i > 0) os << ", ";
      os << json_string(fields_[i].first) << ": " << render(fields_[i].second);
    }
    os << "}\n";
  }

 private:
  static std::string render(const Value& value) {
    struct Visitor {
      std::string operator()(std::nullptr_t) const { return "null"; }
      std::string operator()(bool b) const { return b ? "true" : "false"; }
      std::string operator()(double x) const { return json_num(x); }
      std::string operator()(const std::string& s) const { return json_string(s); }
      std::string operator()(const std::vector<double>& xs) const {
        std::string out = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) out += (i > 0 ? ", " : "") + json_num(xs[i]);
        return out + "]";
      }
      std::string operator()(const std::vector<std::string>& xs) const {
        std::string out = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) out += (i > 0 ? ", " : "") + json_string(xs[i]);
        return out + "]";
      }
    };
    return std::visit(Visitor{}, value);
  }

  std::vector<std::pair<std::string, Value>> fields_;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      os << "[\n";
      for (std::size_t r = 0; r < rows.size(); ++r) {
        os << "  {";
        for (std::size_t i = 0; i < columns.size(); ++i)
          os << (i > 0 ? ", " : "") << json_string(columns[i]) << ": " << json_num(rows[r][i]);
        os << (r + 1 < rows.size() ? "},\n" : "}\n");
      }
      os << "]\n";
      return;
    }
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i > 0 ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i > 0 ? "," : "") << num(row[i]);
      os << "\n";
    }
  }
};

// Writes to --out when given, to `fallback` otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::out | std::ios::trunc);
    if (!file_) throw ConfigError("cannot open output file " + path);
    os_ = &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void validate(const RunConfig& cfg) {
  if (cfg.n < 1) throw ConfigError(fmt::format("--n must be >= 1, got {}", cfg.n));
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("--format must be csv or json");
  if (cfg.t && !(*cfg.t > 0.0 && *cfg.t < 1.0)) throw ConfigError("--t must lie in (0,1)");
  if (cfg.tmin && !(*cfg.tmin > 0.0 && *cfg.tmin < 1.0)) throw ConfigError("--tmin must lie in (0,1)");
}

std::vector<double> sample_points(const RunConfig& cfg) {
  if (!cfg.grid.empty() && cfg.t) throw ConfigError("give either --grid or --t, not both");
  if (cfg.t) return {*cfg.t};
  if (cfg.grid.empty()) throw ConfigError(fmt::format("{} needs --grid or --t", cfg.subcommand));
  return parse_grid(cfg.grid).points();
}

// Precedence: --v < --profile < --profile-file.
ProfileSpec resolve_profile_spec(const RunConfig& cfg) {
  std::optional<ProfileSpec> spec;
  if (!cfg.profile.empty()) {
    const std::filesystem::path path(cfg.profile);
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec) || path.extension() == ".json")
      spec = load_profile_spec_file(cfg.profile);
    else
      spec = parse_profile_spec(cfg.profile);
  }
  if (!cfg.profile_file.empty()) {
    const ProfileSpec file = load_profile_spec_file(cfg.profile_file);
    spec = spec ? merge_specs(*spec, file) : file;
  }
  if (!spec) {
    if (cfg.v.empty()) throw ConfigError(fmt::format("{} needs --profile", cfg.subcommand));
    spec = ProfileSpec{ProfileKind::phi_v_candidate, {}};
  }
  if (!cfg.v.empty() && spec->kind == ProfileKind::phi_v_candidate)
    spec = merge_specs(ProfileSpec{spec->kind, {{"v", cfg.v}}}, *spec);
  return *spec;
}

RadialProfile resolve_profile(const RunConfig& cfg) { return build_profile(resolve_profile_spec(cfg)); }

// nullopt: no balancing constant available (not given, profile not normalised at t = 1).
std::optional<double> resolve_c(const RunConfig& cfg, KernelEvaluator& kernel, const RadialProfile& p) {
  if (cfg.c.empty() && !p.vanishes_at_one()) return std::nullopt;
  if (cfg.c.empty() || cfg.c == "auto") return estimate_c(kernel, p).c;
  return parse_number(cfg.c, "--c");
}

int cmd_kernel(const RunConfig& cfg, std::ostream& out) {
  const auto points = sample_points(cfg);
  const RadialProfile p = resolve_profile(cfg);
  KernelEvaluator kernel(default_density(p, cfg.n), cfg.n);
  const auto c = resolve_c(cfg, kernel, p);
  Table table{{"t", "F", "defect"}, {}};
  for (double t : points) {
    const double F = kernel.evaluate(t, cfg.tol.value_or(1e-12)).value;
    const double defect = c ? F - *c / std::pow(eval_profile(p, t, 0).f, cfg.n + 1) : kNaN;
    table.rows.push_back({t, F, defect});
  }
  Sink sink(cfg.out, out);
  table.write(sink.stream(), cfg.format);
  return exit_code::ok;
}

int cmd_defect(const RunConfig& cfg, std::ostream& out) {
  const auto points = sample_points(cfg);
  const RadialProfile p = resolve_profile(cfg);
  KernelEvaluator kernel(default_density(p, cfg.n), cfg.n);
  const auto c = resolve_c(cfg, kernel, p);
  if (!c) throw ConfigError("defect needs --c for a profile that does not vanish at t = 1");
  Table table{{"t", "F", "f", "c", "defect", "signed_density"}, {}};
  for (double t : points) {
    const DefectResult d = balanced_defect(kernel, p, *c, t);
    table.rows.push_back({t, d.F, d.f, d.c, d.value, d.signed_density ? 1.0 : 0.0});
  }
  Sink sink(cfg.out, out);
  table.write(sink.stream(), cfg.format);
  return exit_code::ok;
}

int cmd_profile_eval(const RunConfig& cfg, std::ostream& out) {
  const auto points = sample_points(cfg);
  const RadialProfile p = resolve_profile(cfg);
  Table table{{"t", "f", "fp", "fpp", "W"}, {}};
  for (double t : points) {
    const ProfileValue v = eval_profile(p, t);
    table.rows.push_back({t, v.f, v.fp, v.fpp, monge_ampere_from_values(v, cfg.n, t)});
  }
  Sink sink(cfg.out, out);
  table.write(sink.stream(), cfg.format);
  return exit_code::ok;
}

int cmd_poincare(const RunConfig& cfg, std::ostream& out) {
  if (cfg.c.empty() || cfg.c == "auto") throw ConfigError("poincare needs a numeric --c");
  const double c = parse_number(cfg.c, "--c");
  const double tmin = cfg.tmin.value_or(1e-3);
  const PoincareSolution sol = solve_poincare(c, tmin, cfg.tol.value_or(1e-10));

  Table table{{"t", "f", "fp", "fpp", "psi_residual"}, {}};
  for (const auto& pt : sol.grid()) table.rows.push_back({pt.t, pt.f, pt.fp, pt.fpp, pt.psi_residual});
  if (!cfg.out.empty()) {
    Sink sink(cfg.out, out);
    table.write(sink.stream(), cfg.format);
  }

  JsonObject summary;
  summary.add("c", c);
  if (const auto t0 = sol.t0()) {
    summary.add("t0", *t0).add("f0", sol.f_at_t0());
  } else {
    summary.add("t0", nullptr);
  }
  summary.add("t_min_reached", sol.t_min_reached());
  if (c >= 0.0) summary.add("exponent", origin_exponent(sol)).add("rho", rho(c));
  summary.add("psi_residual_max", sol.psi_residual_max());
  if (c == 0.0) {
    double sup = 0.0;
    for (const auto& pt : sol.grid()) sup = std::max(sup, std::abs(pt.f - (2.0 - 2.0 * std::sqrt(pt.t))));
    summary.add("sup_error_vs_exact", sup);
  }
  summary.add("grid_points", static_cast<double>(sol.grid().size()));
  summary.write(out);
  return sol.t0() ? exit_code::terminated : exit_code::ok;
}

int cmd_asymptotics(const RunConfig& cfg, std::ostream& out) {
  if (cfg.v.empty()) throw ConfigError("asymptotics needs --v");
  if (cfg.order < 0) throw ConfigError("--order must be >= 0");
  JsonObject result;
  if (const auto exact = parse_rational(cfg.v)) {
    const std::vector<Rational> A = phi_v_A_coefficients(*exact, cfg.order);
    std::vector<double> values;
    std::vector<std::string> text;
    for (const auto& a : A) {
      values.push_back(to_double(a));
      text.push_back(to_string(a));
    }
    result.add("A", values).add("A_exact", text).add("exact", true).add("v", to_double(*exact));
  } else {
    const double v = parse_number(cfg.v, "--v");
    const auto inv = reciprocal_moments(moment_expansion(phi_v_L_series(v, cfg.order)));
    result.add("A", A_coefficients(inv, cfg.order)).add("exact", false).add("v", v);
  }
  Sink sink(cfg.out, out);
  result.write(sink.stream());
  return exit_code::ok;
}

int cmd_lerch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.deriv < 0) throw ConfigError("--deriv must be >= 0");
  auto boundary = [&](double t) {
    try {
      return lerch_phi_boundary(t, cfg.s, cfg.deriv);
    } catch (const CapabilityError&) {
      return kNaN;
    }
  };
  Sink sink(cfg.out, out);
  if (cfg.t && cfg.grid.empty()) {
    const double direct = lerch_phi(*cfg.t, cfg.s, cfg.deriv);
    const double expanded = boundary(*cfg.t);
    JsonObject result;
    result.add("t", *cfg.t).add("s", cfg.s).add("deriv", static_cast<double>(cfg.deriv));
    result.add("direct", direct).add("boundary", expanded).add("difference", expanded - direct);
    result.write(sink.stream());
    return exit_code::ok;
  }
  Table table{{"t", "direct", "boundary", "difference"}, {}};
  for (double t : sample_points(cfg)) {
    const double direct = lerch_phi(t, cfg.s, cfg.deriv);
    const double expanded = boundary(t);
    table.rows.push_back({t, direct, expanded, expanded - direct});
  }
  table.write(sink.stream(), cfg.format);
  return exit_code::ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.profile.empty() || !cfg.profile_file.empty()) resolve_profile_spec(cfg);
  const auto results = run_acceptance(cfg.only);
  Sink sink(cfg.out, out);
  return print_acceptance(results, sink.stream()) ? exit_code::ok : exit_code::verify_failed;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  if (cfg.subcommand == "kernel") return cmd_kernel(cfg, out);
  if (cfg.subcommand == "defect") return cmd_defect(cfg, out);
  if (cfg.subcommand == "poincare") return cmd_poincare(cfg, out);
  if (cfg.subcommand == "asymptotics") return cmd_asymptotics(cfg, out);
  if (cfg.subcommand == "lerch") return cmd_lerch(cfg, out);
  if (cfg.subcommand == "profile-eval") return cmd_profile_eval(cfg, out);
  if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
  throw ConfigError("missing subcommand");
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1));
  return out;
}

GridSpec parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
    throw ConfigError(fmt::format("grid '{}' is not start:stop:count", text));
  GridSpec g{parse_number(text.substr(0, first), "grid start"),
             parse_number(text.substr(first + 1, second - first - 1), "grid stop"), 0};
  const std::string count = text.substr(second + 1);
  auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), g.count);
  if (ec != std::errc() || ptr != count.data() + count.size())
    throw ConfigError(fmt::format("grid count '{}' is not an integer", count));
  if (g.count < 1) throw ConfigError(fmt::format("grid '{}' is empty", text));
  if (!(g.start > 0.0 && g.start < 1.0 && g.stop > 0.0 && g.stop < 1.0))
    throw ConfigError(fmt::format("grid '{}' leaves (0,1)", text));
  if (g.count == 1 && g.start != g.stop) throw ConfigError("a one-point grid needs start == stop");
  return g;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Balanced metrics on the disc: kernels, boundary asymptotics, Poincare profiles",
               "kepler_balance"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--profile", cfg.profile, "profile: kind[:key=value,...], JSON text or JSON file path");
    sub->add_option("--profile-file", cfg.profile_file, "JSON profile file; wins over --profile and --v");
    sub->add_option("--n", cfg.n, "dimension n");
    sub->add_option("--v", cfg.v, "parameter v of the candidate family (number or fraction)");
    sub->add_option("--grid", cfg.grid, "sample points start:stop:count in (0,1)");
    sub->add_option("--t", cfg.t, "single sample point in (0,1)");
    sub->add_option("--tol", cfg.tol, "tolerance");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv or json");
  };

  CLI::App* kernel = app.add_subcommand("kernel", "kernel F(t) and defect F - c/f^{n+1} over a grid");
  common(kernel);
  kernel->add_option("--c", cfg.c, "balancing constant, or auto");
  CLI::App* defect = app.add_subcommand("defect", "balanced defect with F, f and c per point");
  common(defect);
  defect->add_option("--c", cfg.c, "balancing constant, or auto");
  CLI::App* poincare = app.add_subcommand("poincare", "solve W[f] = 1 with Psi = c");
  common(poincare);
  poincare->add_option("--c", cfg.c, "value of Psi")->required();
  poincare->add_option("--tmin", cfg.tmin, "lower end of the integration");
  CLI::App* asymptotics = app.add_subcommand("asymptotics", "coefficients A_m of 1/c_k for the phi_v family");
  common(asymptotics);
  asymptotics->add_option("--order", cfg.order, "number of coefficients beyond A_0");
  CLI::App* lerch = app.add_subcommand("lerch", "Lerch derivative sums: direct against boundary expansion");
  common(lerch);
  lerch->add_option("--s", cfg.s, "exponent s");
  lerch->add_option("--deriv", cfg.deriv, "number of s-derivatives");
  CLI::App* profile_eval = app.add_subcommand("profile-eval", "f, f', f'' and W[f] over a grid");
  common(profile_eval);
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  common(verify);
  verify->add_option("--only", cfg.only, "criterion number or tag");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("kepler_balance");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::config;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();

  try {
    return dispatch(cfg, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return exit_code::config;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_code::numerical;
  }
}

}  // namespace kb
