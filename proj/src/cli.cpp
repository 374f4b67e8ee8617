#include "widthlab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"
#include "widthlab/json_io.hpp"
#include "widthlab/lowerbounds.hpp"
#include "widthlab/multiscale.hpp"
#include "widthlab/rate_fit.hpp"

namespace widthlab::cli {

using io::json;

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::vector<std::int64_t> parse_budgets(const std::string& text) {
  std::vector<std::int64_t> out;
  auto to_int = [](const std::string& s) -> std::int64_t {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::validation, "budget \"" + s + "\" is not an integer");
    }
  };
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const auto lo = to_int(text.substr(0, colon)), hi = to_int(text.substr(colon + 1));
    if (lo < 1 || hi < lo) fail(ErrorCode::validation, "budget range must satisfy 1 <= lo <= hi");
    for (std::int64_t n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(to_int(item));
  return out;
}

void RunConfig::validate() const {
  static const char* commands[] = {"exponent", "check", "ball-width", "simulate", "lower-bound", "fit"};
  if (std::none_of(std::begin(commands), std::end(commands),
                   [&](const char* c) { return command == c; }))
    fail(ErrorCode::validation, "unknown command \"" + command + "\"");
  if (format && *format != "csv" && *format != "json")
    fail(ErrorCode::validation, "format must be csv or json");
  const bool needs_problem =
      command == "exponent" || command == "check" || command == "simulate" || command == "lower-bound";
  if (needs_problem && problem_path.empty()) fail(ErrorCode::input, "--problem is required");
  if (command == "fit" && in_path.empty()) fail(ErrorCode::input, "--in is required");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1) fail(ErrorCode::validation, "budgets must be positive");
    if (i > 0 && budgets[i] <= budgets[i - 1])
      fail(ErrorCode::validation, "budgets must be strictly increasing");
  }
  if ((command == "simulate" || command == "lower-bound") && budgets.empty())
    fail(ErrorCode::validation, "at least one budget is required");
  if (correction_span < 0) fail(ErrorCode::validation, "correction span must be >= 0");
}

namespace {

/// Output sink: file when a path is configured, `out` otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), out_(fallback) {}
  std::ostream& stream() { return path_.empty() ? out_ : buffer_; }
  void finish() {
    if (path_.empty()) return;
    std::ofstream f(path_);
    if (!f) fail(ErrorCode::io, "cannot write " + path_);
    f << buffer_.str();
    if (!f) fail(ErrorCode::io, "write to " + path_ + " failed");
  }

 private:
  std::string path_;
  std::ostream& out_;
  std::ostringstream buffer_;
};

SobolevProblem load_problem(const RunConfig& cfg) {
  return io::problem_from_json(io::read_json_file(cfg.problem_path));
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

void emit_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

int cmd_exponent(const RunConfig& cfg, std::ostream& os) {
  const SobolevProblem p = load_problem(cfg);
  p.validate();
  const Prediction pred = predicted_width_exponent(p, cfg.profile);
  if (cfg.format.value_or("json") == "json") {
    json j = io::to_json(pred);
    j["schema_version"] = io::kSchemaVersion;
    j["problem"] = io::to_json(p);
    j["abstract"] = io::to_json(problem_to_abstract(p));
    emit_json(os, j);
  } else {
    os << "field,value\n";
    os << "theta_tilde," << format_number(pred.exponents.theta_tilde) << '\n';
    os << "theta_hat," << format_number(pred.exponents.theta_hat) << '\n';
    os << "case," << pred.profile.case_id << '\n';
    for (int j = 0; j < pred.profile.j0(); ++j)
      os << "theta_" << j + 1 << ',' << format_number(pred.profile.thetas[j]) << '\n';
    os << "j_star," << (pred.profile.j_star ? std::to_string(*pred.profile.j_star) : "") << '\n';
    os << "prediction," << fmt_opt(pred.exponent) << '\n';
  }
  return 0;
}

int cmd_check(const RunConfig& cfg, std::ostream& os) {
  const SobolevProblem p = load_problem(cfg);
  const HypothesisReport r = check_hypotheses(p, cfg.profile);
  if (cfg.format.value_or("json") == "json") {
    json j = io::to_json(r);
    j["schema_version"] = io::kSchemaVersion;
    emit_json(os, j);
  } else {
    os << "condition,value,pass\n";
    for (const auto& c : r.checks)
      os << '"' << c.name << "\"," << format_number(c.value) << ',' << (c.pass ? 1 : 0) << '\n';
  }
  return 0;
}

int cmd_ball_width(const RunConfig& cfg, std::ostream& os) {
  if (!cfg.q) fail(ErrorCode::input, "--q is required");
  const double q = *cfg.q;
  Body body;
  std::string p_label;
  if (cfg.p0 || cfg.p1) {
    if (!cfg.p0 || !cfg.p1) fail(ErrorCode::input, "intersections need both --p0 and --p1");
    IntersectionSpec s{cfg.N, {cfg.N, *cfg.p0, cfg.k0}, {cfg.N, *cfg.p1, cfg.k1}};
    s.validate();
    body = s;
    p_label = format_number(*cfg.p0) + "|" + format_number(*cfg.p1);
  } else {
    if (!cfg.p) fail(ErrorCode::input, "--p (or --p0 and --p1) is required");
    BallSpec b{cfg.N, *cfg.p, cfg.radius};
    b.validate();
    body = b;
    p_label = format_number(*cfg.p);
  }
  SearchConfig search = cfg.search;
  search.seed = cfg.seed;
  WidthEstimate est;
  const std::string& m = cfg.method;
  const auto* ball = std::get_if<BallSpec>(&body);
  auto need_ball = [&] {
    if (!ball) fail(ErrorCode::unsupported_regime, "method " + m + " applies to single balls");
  };
  if (m == "exact") {
    need_ball();
    est = exact_width(ball->N, cfg.n, ball->p, q);
    est.value *= ball->radius;
  } else if (m == "gluskin") {
    need_ball();
    est = gluskin_order(ball->N, cfg.n, ball->p, q);
    est.value *= ball->radius;
  } else if (m == "upper" || (m == "auto" && !ball)) {
    const IntersectionSpec s = ball ? IntersectionSpec{ball->N, *ball, *ball}
                                    : std::get<IntersectionSpec>(body);
    est = intersection_width_upper(s, cfg.n, q);
  } else if (m == "auto") {
    est = q <= ball->p ? exact_width(ball->N, cfg.n, ball->p, q)
                       : gluskin_order(ball->N, cfg.n, ball->p, q);
    est.value *= ball->radius;
  } else if (m == "numeric") {
    est = numeric_width_upper(body, cfg.n, q, search);
  } else if (m == "oracle") {
    est = brute_force_width_oracle(body, cfg.n, q, search);
  } else {
    fail(ErrorCode::validation, "unknown method \"" + m + "\"");
  }
  if (cfg.format.value_or("json") == "json") {
    json j = io::to_json(est);
    j["body"] = io::to_json(body);
    j["schema_version"] = io::kSchemaVersion;
    emit_json(os, j);
  } else {
    os << "N,n,p,q,method,value\n";
    os << cfg.N << ',' << cfg.n << ',' << p_label << ',' << format_number(q) << ',' << est.method
       << ',' << format_number(est.value) << '\n';
  }
  return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& os) {
  const SobolevProblem p = load_problem(cfg);
  p.validate();
  require_simulable(p);
  const DomainSpec dom = default_domain(p, cfg.t_max);
  ExperimentOptions opts;
  opts.quadrature = cfg.quadrature;
  opts.profile = cfg.profile;
  opts.allocation.eps = cfg.eps;
  opts.allocation.t1 = cfg.t1;
  opts.allocation.t2 = cfg.t2;
  opts.allocation.m1 = cfg.m1;
  opts.allocation.correction_span = cfg.correction_span;
  Ensemble ens;
  if (!cfg.ensemble_path.empty()) {
    ens = io::ensemble_from_json(io::read_json_file(cfg.ensemble_path), p, dom, cfg.quadrature);
  } else {
    BumpOptions bo;
    bo.quadrature = cfg.quadrature;
    const int t_last = cfg.grid_t_last >= 0 ? cfg.grid_t_last : std::min(dom.t_max, 13);
    ens = bump_grid_ensemble(p, dom, std::min(t_last, dom.t_max), cfg.grid_m_last, bo);
  }
  const ExperimentResult res = run_experiment(p, dom, cfg.budgets, ens, opts);
  if (cfg.format.value_or("csv") == "json") {
    json rows = json::array(), allocs = json::array();
    for (const auto& r : res.rows)
      rows.push_back({{"n", r.n},
                      {"error", r.error},
                      {"rank", r.rank},
                      {"seconds", r.seconds},
                      {"C", r.C},
                      {"C_model", r.C_model}});
    for (const auto& a : res.allocations) allocs.push_back(io::to_json(a));
    emit_json(os, {{"schema_version", io::kSchemaVersion},
                   {"problem", io::to_json(p)},
                   {"profile", io::to_json(res.profile)},
                   {"ensemble_size", ens.members.size()},
                   {"rows", rows},
                   {"allocations", allocs}});
  } else {
    os << "n,error,rank,seconds\n";
    for (const auto& r : res.rows)
      os << r.n << ',' << format_number(r.error) << ',' << r.rank << ','
         << format_number(r.seconds) << '\n';
  }
  return 0;
}

int cmd_lower_bound(const RunConfig& cfg, std::ostream& os) {
  const SobolevProblem p = load_problem(cfg);
  p.validate();
  const LowerBoundCurve c = lower_bound_curve(p, cfg.budgets, cfg.profile);
  if (cfg.format.value_or("csv") == "json") {
    json j = io::to_json(c);
    j["schema_version"] = io::kSchemaVersion;
    emit_json(os, j);
  } else {
    os << "n,b94,b95,b96,b97,b98,max\n";
    for (const auto& r : c.rows)
      os << r.n << ',' << format_number(r.b94) << ',' << format_number(r.b95) << ','
         << format_number(r.b96) << ',' << fmt_opt(r.b97) << ',' << fmt_opt(r.b98) << ','
         << format_number(r.max) << '\n';
  }
  return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

int cmd_fit(const RunConfig& cfg, std::ostream& os) {
  std::ifstream in(cfg.in_path);
  if (!in) fail(ErrorCode::input, "cannot open " + cfg.in_path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::schema, cfg.in_path + " is empty");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int xc = column(cfg.x_column);
  if (xc < 0) fail(ErrorCode::schema, "column \"" + cfg.x_column + "\" not found");
  int yc = -1;
  if (!cfg.y_column.empty()) {
    yc = column(cfg.y_column);
    if (yc < 0) fail(ErrorCode::schema, "column \"" + cfg.y_column + "\" not found");
  } else {
    for (const char* name : {"error", "max", "value"})
      if ((yc = column(name)) >= 0) break;
    if (yc < 0 && header.size() >= 2) yc = xc == 0 ? 1 : 0;
    if (yc < 0) fail(ErrorCode::schema, "no value column");
  }
  auto parse = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::schema, "\"" + s + "\" is not a number");
    }
  };
  std::vector<std::pair<double, double>> pairs;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) <= std::max(xc, yc))
      fail(ErrorCode::schema, "short CSV row: " + line);
    if (cells[yc].empty()) continue;
    pairs.emplace_back(parse(cells[xc]), parse(cells[yc]));
  }
  WindowPolicy policy;
  policy.drop_fraction = cfg.drop_fraction;
  const RateFit f = fit_rate(pairs, policy);
  if (cfg.format.value_or("json") == "json") {
    json j = io::to_json(f);
    j["schema_version"] = io::kSchemaVersion;
    emit_json(os, j);
  } else {
    os << "slope,intercept,n_min,n_max,residual\n"
       << format_number(f.slope) << ',' << format_number(f.intercept) << ','
       << format_number(f.n_min) << ',' << format_number(f.n_max) << ','
       << format_number(f.residual) << '\n';
  }
  return 0;
}

void write_error(std::ostream& err, ErrorCode code, const std::string& message) {
  const json j{{"error",
                {{"code", std::string(error_code_name(code))},
                 {"exit", static_cast<int>(code)},
                 {"message", message}}}};
  err << j.dump() << '\n';
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    const std::string& c = cfg.command;
    if (c == "exponent") cmd_exponent(cfg, os);
    else if (c == "check") cmd_check(cfg, os);
    else if (c == "ball-width") cmd_ball_width(cfg, os);
    else if (c == "simulate") cmd_simulate(cfg, os);
    else if (c == "lower-bound") cmd_lower_bound(cfg, os);
    else cmd_fit(cfg, os);
    sink.finish();
    return 0;
  } catch (const Error& e) {
    write_error(err, e.code(), e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    write_error(err, ErrorCode::numeric, e.what());
    return static_cast<int>(ErrorCode::numeric);
  }
}

namespace {

std::optional<double> parse_extended(const std::string& s, const char* flag) {
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "Infinity" || s == "+inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::validation, std::string(flag) + " expects a number or inf");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kolmogorov-width exponents for weighted Sobolev classes"};
  app.set_version_flag("--version", io::kSchemaVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format, budgets, p, q, p0, p1, case8 = "consistent";
  std::optional<double> eps, t1, t2, m1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "Output file (default: standard output)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "Random seed");
  };
  auto problem_opts = [&](CLI::App* sub) {
    sub->add_option("--problem", cfg.problem_path, "Problem JSON file")->required();
    sub->add_option("--tie-tol", cfg.profile.tie_tolerance, "Tie tolerance among candidate exponents");
    sub->add_option("--case8-theta4", case8, "consistent or as-printed")
        ->check(CLI::IsMember({"consistent", "as-printed"}));
  };

  auto* exponent = app.add_subcommand("exponent", "Predicted width exponent of a problem");
  common(exponent);
  problem_opts(exponent);

  auto* check = app.add_subcommand("check", "Hypothesis report of a problem");
  common(check);
  problem_opts(check);

  auto* bw = app.add_subcommand("ball-width", "Widths of finite-dimensional balls and intersections");
  common(bw);
  bw->add_option("--N", cfg.N, "Dimension")->required();
  bw->add_option("--n", cfg.n, "Subspace dimension")->required();
  bw->add_option("--p", p, "Ball exponent (number or inf)");
  bw->add_option("--q", q, "Target exponent")->required();
  bw->add_option("--radius", cfg.radius, "Ball radius");
  bw->add_option("--p0", p0, "Intersection: first exponent");
  bw->add_option("--k0", cfg.k0, "Intersection: first radius");
  bw->add_option("--p1", p1, "Intersection: second exponent");
  bw->add_option("--k1", cfg.k1, "Intersection: second radius");
  bw->add_option("--method", cfg.method, "auto, exact, gluskin, upper, numeric or oracle")
      ->check(CLI::IsMember({"auto", "exact", "gluskin", "upper", "numeric", "oracle"}));
  bw->add_option("--restarts", cfg.search.restarts, "Search restarts");
  bw->add_option("--samples", cfg.search.samples_per_eval, "Extreme points per evaluation");
  bw->add_option("--refine-steps", cfg.search.refine_steps, "Local refinement steps");
  bw->add_option("--tolerance", cfg.search.tolerance, "Search tolerance");
  bw->add_option("--max-dimension", cfg.search.max_dimension, "Dimension cap for the search");

  auto* sim = app.add_subcommand("simulate", "Multi-scale approximation experiment (d = 1)");
  common(sim);
  problem_opts(sim);
  sim->add_option("--ensemble", cfg.ensemble_path, "Ensemble JSON (default: bump grid)");
  sim->add_option("--budgets", budgets, "Budgets, e.g. 16,32,64 or 16:1024");
  sim->add_option("--eps", eps, "Allocation decay rate");
  sim->add_option("--t1", t1, "Main ring anchor");
  sim->add_option("--t2", t2, "Second-segment ring anchor");
  sim->add_option("--m1", m1, "Correction depth anchor");
  sim->add_option("--correction-span", cfg.correction_span, "Correction layers per ring");
  sim->add_option("--t-max", cfg.t_max, "Number of resolved rings");
  sim->add_option("--grid-t", cfg.grid_t_last, "Default ensemble: last ring");
  sim->add_option("--grid-m", cfg.grid_m_last, "Default ensemble: last depth");
  sim->add_option("--nodes", cfg.quadrature.nodes, "Gauss nodes per panel");
  sim->add_option("--grading", cfg.quadrature.grading_depth, "Panels graded toward the origin");

  auto* lb = app.add_subcommand("lower-bound", "Constant-free lower-bound curves");
  common(lb);
  problem_opts(lb);
  lb->add_option("--budgets", budgets, "Budgets, e.g. 16,32,64 or 16:1024");

  auto* fit = app.add_subcommand("fit", "Log-log rate fit of a CSV table");
  common(fit);
  fit->add_option("--in", cfg.in_path, "Input CSV")->required();
  fit->add_option("--x", cfg.x_column, "Budget column");
  fit->add_option("--y", cfg.y_column, "Value column");
  fit->add_option("--drop", cfg.drop_fraction, "Fraction of the smallest budgets to drop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    write_error(err, ErrorCode::validation, e.what());
    return static_cast<int>(ErrorCode::validation);
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!format.empty()) cfg.format = format;
    if (!budgets.empty()) cfg.budgets = parse_budgets(budgets);
    cfg.p = parse_extended(p, "--p");
    cfg.q = parse_extended(q, "--q");
    cfg.p0 = parse_extended(p0, "--p0");
    cfg.p1 = parse_extended(p1, "--p1");
    cfg.eps = eps;
    cfg.t1 = t1;
    cfg.t2 = t2;
    cfg.m1 = m1;
    cfg.profile.case8_theta4 =
        case8 == "as-printed" ? Case8Theta4::as_printed : Case8Theta4::consistent;
  } catch (const Error& e) {
    write_error(err, e.code(), e.what());
    return static_cast<int>(e.code());
  }
  return dispatch(cfg, out, err);
}

}  // namespace widthlab::cli
