#include "kepler_balance/cli.hpp"
#include "kepler_balance/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace kb;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = parse_grid("0.1:0.9:9");
  CHECK(g.points().size() == 9);
  CHECK(g.points().front() == 0.1);
  CHECK(g.points().back() == 0.9);
  CHECK(parse_grid("0.5:0.5:1").points() == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_grid("0.1:0.9:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:0.5:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1:1.2:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1:0.2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1:0.2:x"), ConfigError);
}

TEST_CASE("kernel command") {
  const Run r = run({"kernel", "--profile", "phi_v_candidate:v=1", "--n", "2", "--c", "4", "--grid", "0.1:0.9:9"});
  CHECK(r.code == exit_code::ok);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "t,F,defect");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double defect = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    CHECK(std::abs(defect) <= 1e-9);
  }
  const Run one = run({"kernel", "--profile", "constant_one", "--n", "2", "--t", "0.5"});
  CHECK(one.code == exit_code::ok);
  const auto row = lines(one.out).at(1);
  CHECK(std::stod(row.substr(row.find(',') + 1)) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(run({"kernel", "--profile", "constant_one", "--grid", "0.1:0.9:0"}).code == exit_code::config);
}

TEST_CASE("configuration errors exit with 1") {
  CHECK(run({}).code == exit_code::config);
  CHECK(run({"frobnicate"}).code == exit_code::config);
  CHECK(run({"kernel", "--profile", "constant_one"}).code == exit_code::config);
  CHECK(run({"kernel", "--profile", "nope", "--t", "0.5"}).code == exit_code::config);
  CHECK(run({"kernel", "--profile", "constant_one", "--t", "1.5"}).code == exit_code::config);
  CHECK(run({"kernel", "--profile", "constant_one", "--t", "0.5", "--tol", "-1"}).code == exit_code::config);
  CHECK(run({"kernel", "--profile", "constant_one", "--t", "0.5", "--format", "xml"}).code == exit_code::config);
  CHECK(run({"kernel", "--profile", "constant_one", "--t", "0.5", "--n", "0"}).code == exit_code::config);
  CHECK(run({"poincare"}).code == exit_code::config);
  CHECK(run({"verify", "--only", "no-such-tag"}).code == exit_code::config);
  CHECK(run({"kernel", "--help"}).code == exit_code::ok);
}

TEST_CASE("numerical failures exit with 2") {
  const Run r = run({"kernel", "--profile", "constant_one", "--t", "0.99999999"});
  CHECK(r.code == exit_code::numerical);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("poincare command") {
  const auto csv = temp_file("kb_cli_poincare.csv");
  const Run zero = run({"poincare", "--c", "0", "--tmin", "1e-3", "--out", csv.string()});
  CHECK(zero.code == exit_code::ok);
  const auto pos = zero.out.find("\"sup_error_vs_exact\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(zero.out.substr(pos + 22)) <= 1e-8);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,f,fp,fpp,psi_residual");
  std::filesystem::remove(csv);

  const Run cusp = run({"poincare", "--c", "-0.1"});
  CHECK(cusp.code == exit_code::terminated);
  CHECK(cusp.out.find("\"t0\": 0.") != std::string::npos);

  const Run one = run({"poincare", "--c", "1", "--tmin", "1e-4"});
  CHECK(one.code == exit_code::ok);
  const auto e = one.out.find("\"exponent\": ");
  const auto r = one.out.find("\"rho\": ");
  CHECK(std::stod(one.out.substr(e + 12)) == doctest::Approx(std::stod(one.out.substr(r + 7))).epsilon(1e-3));
}

TEST_CASE("asymptotics and lerch commands") {
  const Run a = run({"asymptotics", "--v", "9", "--order", "4"});
  CHECK(a.code == exit_code::ok);
  CHECK(a.out.find("\"exact\": true") != std::string::npos);
  CHECK(a.out.find("\"-1/2\"") != std::string::npos);
  const Run b = run({"asymptotics", "--v", "nonsense"});
  CHECK(b.code == exit_code::config);
  const Run l = run({"lerch", "--t", "0.5", "--s", "0"});
  CHECK(l.code == exit_code::ok);
  CHECK(l.out.find("\"direct\": 2,") != std::string::npos);
  const Run grid = run({"lerch", "--grid", "0.2:0.8:4", "--s", "2", "--deriv", "1"});
  CHECK(grid.code == exit_code::ok);
  CHECK(lines(grid.out).size() == 5);
}

TEST_CASE("profile-eval and defect commands") {
  const Run p = run({"profile-eval", "--profile", "sqrt_poincare", "--t", "0.25", "--format", "json"});
  CHECK(p.code == exit_code::ok);
  CHECK(p.out.find("\"f\": 1, \"fp\": -2, \"fpp\": 4") != std::string::npos);
  const Run d = run({"defect", "--profile", "phi_v_candidate:v=1", "--c", "4", "--grid", "0.2:0.6:3"});
  CHECK(d.code == exit_code::ok);
  CHECK(lines(d.out).at(0) == "t,F,f,c,defect,signed_density");
  CHECK(run({"defect", "--profile", "constant_one", "--t", "0.5"}).code == exit_code::config);
}

TEST_CASE("identical configuration gives identical output") {
  const std::vector<std::string> args{"defect", "--profile", "sqrt_poincare", "--grid", "0.1:0.9:5"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == exit_code::ok);
  CHECK(a.out == b.out);
}

TEST_CASE("profile file entries win over flags") {
  const auto path = temp_file("kb_cli_profile.json");
  {
    std::ofstream out(path);
    out << R"({"kind": "phi_v_candidate", "params": {"v": 1}})";
  }
  const Run from_file = run({"kernel", "--profile", path.string(), "--v", "9", "--c", "4", "--t", "0.5"});
  const Run inline_one = run({"kernel", "--profile", "phi_v_candidate:v=1", "--c", "4", "--t", "0.5"});
  CHECK(from_file.code == exit_code::ok);
  CHECK(from_file.out == inline_one.out);
  const Run override_inline = run({"kernel", "--profile", "phi_v_candidate:v=9", "--profile-file", path.string(), "--c", "4", "--t", "0.5"});
  CHECK(override_inline.out == inline_one.out);
  {
    std::ofstream out(path);
    out << "{\"kind\": \"phi_v_cand";
  }
  CHECK(run({"verify", "--profile", path.string(), "--only", "5"}).code == exit_code::config);
  std::filesystem::remove(path);
}

TEST_CASE("verify command") {
  const Run r = run({"verify", "--only", "lerch"});
  CHECK(r.code == exit_code::ok);
  CHECK(r.out.find("2/2 criteria passed") != std::string::npos);
}
