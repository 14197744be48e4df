#pragma once

// Command-line front end. Exit codes: 0 ok, 1 bad configuration, 2 numerical failure,
// 3 Poincare solution terminated at t0, 4 acceptance failure.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kb {

struct GridSpec {
  double start;
  double stop;
  int count;

  std::vector<double> points() const;
};

/// Parses "start:stop:count" with all points in (0,1) and count >= 1; ConfigError otherwise.
GridSpec parse_grid(const std::string& text);

struct RunConfig {
  std::string subcommand;
  std::string profile;       // inline spec or path to a JSON file
  std::string profile_file;  // JSON file; its entries win over --profile and --v
  int n = 2;
  std::string c;             // number, "auto" or empty
  std::string v;             // number or fraction
  std::string grid;
  std::optional<double> t;
  std::optional<double> tol;  // per-command default when absent
  std::optional<double> tmin;
  double s = 2.0;
  int deriv = 0;
  int order = 4;
  std::string out;
  std::string format = "csv";
  std::string only;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int numerical = 2;
inline constexpr int terminated = 3;
inline constexpr int verify_failed = 4;
}  // namespace exit_code

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kb
