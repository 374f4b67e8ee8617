#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "widthlab/ballwidths.hpp"
#include "widthlab/exponents.hpp"
#include "widthlab/quadrature.hpp"

namespace widthlab::cli {

struct RunConfig {
  std::string command;  // exponent | check | ball-width | simulate | lower-bound | fit
  std::string problem_path;
  std::string ensemble_path;
  std::string in_path;
  std::string out_path;            // empty: standard output
  std::optional<std::string> format;  // csv | json; default depends on the command
  std::uint64_t seed = 20240601;

  std::vector<std::int64_t> budgets{16, 32, 64, 128, 256, 512, 1024};

  // simulate
  std::optional<double> eps;
  std::optional<double> t1;
  std::optional<double> t2;
  std::optional<double> m1;
  int correction_span = 8;
  int t_max = 14;
  int grid_t_last = -1;  // default min(t_max, 13)
  int grid_m_last = 13;
  QuadratureSpec quadrature;
  ProfileOptions profile;

  // ball-width
  std::int64_t N = 0;
  std::int64_t n = 0;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> p0;
  std::optional<double> p1;
  double radius = 1.0;
  double k0 = 1.0;
  double k1 = 1.0;
  std::string method = "auto";  // auto | exact | gluskin | upper | numeric | oracle
  SearchConfig search;

  // fit
  double drop_fraction = 0.25;
  std::string x_column = "n";
  std::string y_column;  // default: error, max, value, or the second column

  /// Error(validation) or Error(input) when the configuration is unusable.
  void validate() const;
};

/// Runs one command. Returns the exit status: 0 on success, otherwise the
/// numeric ErrorCode, with an error JSON object written to `err`.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 12 significant digits; "inf" for +infinity.
std::string format_number(double x);

/// Parses "16,32,64" (also accepts "16:1024" as successive doublings).
std::vector<std::int64_t> parse_budgets(const std::string& text);

}  // namespace widthlab::cli
