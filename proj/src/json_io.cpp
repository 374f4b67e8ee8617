#include "widthlab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"

namespace widthlab::io {
namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::schema, msg); }

void expect_object(const json& j, const std::string& what) {
  if (!j.is_object()) schema(what + " must be a JSON object");
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) schema(what + ": unknown field \"" + key + "\"");
  }
}

const json& field(const json& j, const std::string& name) {
  auto it = j.find(name);
  if (it == j.end()) schema("missing field \"" + name + "\"");
  return *it;
}

double number(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_number()) schema("field \"" + name + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& name, double fallback) {
  return j.contains(name) ? number(j, name) : fallback;
}

std::int64_t integer(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_number_integer()) schema("field \"" + name + "\" must be an integer");
  return v.get<std::int64_t>();
}

int small_int(const json& j, const std::string& name) {
  const auto v = integer(j, name);
  if (v < -1000000 || v > 1000000) schema("field \"" + name + "\" is out of range");
  return static_cast<int>(v);
}

std::string text(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_string()) schema("field \"" + name + "\" must be a string");
  return v.get<std::string>();
}

bool boolean(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_boolean()) schema("field \"" + name + "\" must be a boolean");
  return v.get<bool>();
}

}  // namespace

double extended_from_json(const json& j, const std::string& name) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "+inf") return kInf;
  }
  schema("field \"" + name + "\" must be a number or \"inf\"");
}

json extended_to_json(double x) {
  if (std::isinf(x) && x > 0) return "inf";
  if (!std::isfinite(x)) return nullptr;
  return x;
}

// --- problems ---------------------------------------------------------------

SobolevProblem problem_from_json(const json& j) {
  expect_object(j, "problem");
  SobolevProblem p;
  ProblemKind kind;
  try {
    kind = problem_kind_from_string(text(j, "kind"));
  } catch (const Error& e) {
    schema(e.what());
  }
  p.r = small_int(j, "r");
  p.d = small_int(j, "d");
  p.space.p0 = extended_from_json(field(j, "p0"), "p0");
  p.space.p1 = extended_from_json(field(j, "p1"), "p1");
  p.space.q = extended_from_json(field(j, "q"), "q");
  switch (kind) {
    case ProblemKind::power_hset:
      only_keys(j, {"kind", "r", "d", "p0", "p1", "q", "theta", "beta", "sigma", "lambda"},
                "power_hset problem");
      p.weights = PowerHsetWeights{number_or(j, "theta", 0.0), number(j, "beta"),
                                   number(j, "sigma"), number(j, "lambda")};
      break;
    case ProblemKind::log_hset:
      only_keys(j,
                {"kind", "r", "d", "p0", "p1", "q", "gamma", "beta", "mu", "sigma", "alpha",
                 "lambda", "nu"},
                "log_hset problem");
      p.weights = LogHsetWeights{number(j, "gamma"), number(j, "beta"),  number(j, "mu"),
                                 number(j, "sigma"), number(j, "alpha"), number(j, "lambda"),
                                 number(j, "nu")};
      break;
    case ProblemKind::power_rd:
      only_keys(j, {"kind", "r", "d", "p0", "p1", "q", "beta", "sigma", "lambda"},
                "power_rd problem");
      p.weights = PowerRdWeights{number(j, "beta"), number(j, "sigma"), number(j, "lambda")};
      break;
  }
  return p;
}

json to_json(const SobolevProblem& p) {
  json j{{"kind", to_string(p.kind())},
         {"r", p.r},
         {"d", p.d},
         {"p0", extended_to_json(p.space.p0)},
         {"p1", extended_to_json(p.space.p1)},
         {"q", extended_to_json(p.space.q)}};
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, PowerHsetWeights>) {
          j["theta"] = w.theta;
          j["beta"] = w.beta;
          j["sigma"] = w.sigma;
          j["lambda"] = w.lambda;
        } else if constexpr (std::is_same_v<W, LogHsetWeights>) {
          j["gamma"] = w.gamma;
          j["beta"] = w.beta;
          j["mu"] = w.mu;
          j["sigma"] = w.sigma;
          j["alpha"] = w.alpha;
          j["lambda"] = w.lambda;
          j["nu"] = w.nu;
        } else {
          j["beta"] = w.beta;
          j["sigma"] = w.sigma;
          j["lambda"] = w.lambda;
        }
      },
      p.weights);
  return j;
}

SpaceParams space_from_json(const json& j) {
  expect_object(j, "space");
  only_keys(j, {"p0", "p1", "q"}, "space");
  return {extended_from_json(field(j, "p0"), "p0"), extended_from_json(field(j, "p1"), "p1"),
          extended_from_json(field(j, "q"), "q")};
}

json to_json(const SpaceParams& s) {
  return {{"p0", extended_to_json(s.p0)}, {"p1", extended_to_json(s.p1)}, {"q", extended_to_json(s.q)}};
}

AbstractParams abstract_from_json(const json& j) {
  expect_object(j, "abstract parameters");
  only_keys(j, {"s_star", "gamma_star", "alpha_star", "mu_star", "k_star", "c", "t0", "r0"},
            "abstract parameters");
  AbstractParams a;
  a.s_star = number(j, "s_star");
  a.gamma_star = number(j, "gamma_star");
  a.alpha_star = number(j, "alpha_star");
  a.mu_star = number(j, "mu_star");
  a.k_star = j.contains("k_star") ? small_int(j, "k_star") : 1;
  a.c = number_or(j, "c", 1.0);
  a.t0 = j.contains("t0") ? small_int(j, "t0") : 0;
  a.r0 = j.contains("r0") ? small_int(j, "r0") : 1;
  return a;
}

json to_json(const AbstractParams& a) {
  return {{"s_star", a.s_star},         {"gamma_star", a.gamma_star}, {"alpha_star", a.alpha_star},
          {"mu_star", a.mu_star},       {"k_star", a.k_star},         {"c", a.c},
          {"t0", a.t0},                 {"r0", a.r0}};
}

ExponentPair exponents_from_json(const json& j) {
  expect_object(j, "exponents");
  only_keys(j, {"theta_tilde", "theta_hat"}, "exponents");
  return {number(j, "theta_tilde"), number(j, "theta_hat")};
}

json to_json(const ExponentPair& e) {
  return {{"theta_tilde", e.theta_tilde}, {"theta_hat", e.theta_hat}};
}

// --- profile / report -------------------------------------------------------

ExponentProfile profile_from_json(const json& j) {
  expect_object(j, "profile");
  only_keys(j, {"case", "j0", "thetas", "j_star", "theta_star", "diagnostic"}, "profile");
  ExponentProfile p;
  p.case_id = small_int(j, "case");
  const json& th = field(j, "thetas");
  if (!th.is_array()) schema("field \"thetas\" must be an array");
  for (const auto& v : th) {
    if (!v.is_number()) schema("thetas must be numbers");
    p.thetas.push_back(v.get<double>());
  }
  if (j.contains("j0") && small_int(j, "j0") != p.j0()) schema("j0 does not match thetas");
  if (j.contains("j_star") && !j["j_star"].is_null()) p.j_star = small_int(j, "j_star");
  if (j.contains("theta_star") && !j["theta_star"].is_null()) p.theta_star = number(j, "theta_star");
  if (j.contains("diagnostic")) p.diagnostic = text(j, "diagnostic");
  return p;
}

json to_json(const ExponentProfile& p) {
  return {{"case", p.case_id},
          {"j0", p.j0()},
          {"thetas", p.thetas},
          {"j_star", p.j_star ? json(*p.j_star) : json(nullptr)},
          {"theta_star", p.theta_star ? json(*p.theta_star) : json(nullptr)},
          {"diagnostic", p.diagnostic}};
}

HypothesisReport report_from_json(const json& j) {
  expect_object(j, "report");
  only_keys(j, {"checks", "overall"}, "report");
  HypothesisReport r;
  const json& checks = field(j, "checks");
  if (!checks.is_array()) schema("field \"checks\" must be an array");
  for (const auto& c : checks) {
    expect_object(c, "check");
    only_keys(c, {"name", "value", "pass"}, "check");
    r.add(text(c, "name"), number(c, "value"), boolean(c, "pass"));
  }
  if (boolean(j, "overall") != r.overall) schema("report overall flag is inconsistent");
  return r;
}

json to_json(const HypothesisReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"value", c.value}, {"pass", c.pass}});
  return {{"checks", checks}, {"overall", r.overall}};
}

json to_json(const Prediction& p) {
  return {{"exponents", to_json(p.exponents)},
          {"profile", to_json(p.profile)},
          {"report", to_json(p.report)},
          {"prediction", p.exponent ? json(*p.exponent) : json(nullptr)}};
}

// --- bodies and estimates ---------------------------------------------------

BallSpec ball_from_json(const json& j) {
  expect_object(j, "ball");
  only_keys(j, {"N", "p", "radius"}, "ball");
  BallSpec b;
  b.N = integer(j, "N");
  b.p = extended_from_json(field(j, "p"), "p");
  b.radius = number_or(j, "radius", 1.0);
  return b;
}

json to_json(const BallSpec& b) {
  return {{"N", b.N}, {"p", extended_to_json(b.p)}, {"radius", b.radius}};
}

Body body_from_json(const json& j) {
  expect_object(j, "body");
  if (j.contains("ball0") || j.contains("ball1")) {
    only_keys(j, {"N", "ball0", "ball1"}, "intersection");
    IntersectionSpec s;
    s.N = integer(j, "N");
    s.ball0 = ball_from_json(field(j, "ball0"));
    s.ball1 = ball_from_json(field(j, "ball1"));
    return s;
  }
  return ball_from_json(j);
}

json to_json(const Body& b) {
  if (const auto* ball = std::get_if<BallSpec>(&b)) return to_json(*ball);
  const auto& s = std::get<IntersectionSpec>(b);
  return {{"N", s.N}, {"ball0", to_json(s.ball0)}, {"ball1", to_json(s.ball1)}};
}

WidthEstimate estimate_from_json(const json& j) {
  expect_object(j, "estimate");
  only_keys(j, {"value", "kind", "method", "n", "target_q", "tolerance"}, "estimate");
  WidthEstimate e;
  e.value = extended_from_json(field(j, "value"), "value");
  const std::string kind = text(j, "kind");
  bool found = false;
  for (auto k : {EstimateKind::exact, EstimateKind::upper, EstimateKind::lower, EstimateKind::order})
    if (kind == to_string(k)) {
      e.kind = k;
      found = true;
    }
  if (!found) schema("unknown estimate kind \"" + kind + "\"");
  e.method = text(j, "method");
  e.n = integer(j, "n");
  e.target_q = extended_from_json(field(j, "target_q"), "target_q");
  if (j.contains("tolerance") && !j["tolerance"].is_null()) e.tolerance = number(j, "tolerance");
  return e;
}

json to_json(const WidthEstimate& e) {
  json j{{"value", extended_to_json(e.value)},
         {"kind", to_string(e.kind)},
         {"method", e.method},
         {"n", e.n},
         {"target_q", extended_to_json(e.target_q)}};
  if (e.tolerance) j["tolerance"] = *e.tolerance;
  return j;
}

json to_json(const RateFit& f) {
  return {{"slope", f.slope},   {"intercept", f.intercept}, {"n_min", f.n_min},
          {"n_max", f.n_max},   {"residual", f.residual},   {"used", f.used}};
}

json to_json(const RankAllocation& a) {
  json rings = json::array();
  for (const auto& r : a.rings) {
    json corr = json::array();
    for (const auto& c : r.corrections) corr.push_back({{"m", c.m}, {"l", c.l}});
    rings.push_back({{"t", r.t},
                     {"components", r.components},
                     {"m_star", r.m_star},
                     {"depth", r.depth},
                     {"main_rank", r.main_rank},
                     {"corrections", corr}});
  }
  return {{"case", a.case_id}, {"n", a.n},         {"eps", a.eps},
          {"t1", a.t1},        {"t2", a.t2},       {"m1", a.m1},
          {"split", a.split},  {"t_cut", a.t_cut}, {"rings", rings},
          {"total_rank", a.total_rank}, {"C", a.C}, {"C_model", a.C_model}};
}

json to_json(const LowerBoundCurve& c) {
  json rows = json::array();
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const auto& r : c.rows)
    rows.push_back({{"n", r.n},
                    {"b94", r.b94},
                    {"b95", r.b95},
                    {"b96", r.b96},
                    {"b97", opt(r.b97)},
                    {"b98", opt(r.b98)},
                    {"max", r.max},
                    {"dominant", r.dominant}});
  return {{"exponents", to_json(c.exponents)}, {"s_star", c.s_star}, {"rows", rows}};
}

// --- ensembles --------------------------------------------------------------

Ensemble ensemble_from_json(const json& j, const SobolevProblem& p, const DomainSpec& dom,
                            const QuadratureSpec& quad) {
  expect_object(j, "ensemble");
  only_keys(j, {"members"}, "ensemble");
  const json& members = field(j, "members");
  if (!members.is_array()) schema("field \"members\" must be an array");
  Ensemble e;
  for (const auto& m : members) {
    expect_object(m, "ensemble member");
    const std::string type = text(m, "type");
    BumpOptions bo;
    bo.quadrature = quad;
    if (m.contains("shape")) {
      const std::string shape = text(m, "shape");
      if (shape == "polynomial") bo.shape = BumpProfile::Shape::polynomial;
      else if (shape == "exponential") bo.shape = BumpProfile::Shape::exponential;
      else schema("unknown bump shape \"" + shape + "\"");
    }
    if (type == "bump") {
      only_keys(m, {"type", "t", "m", "index", "component", "shape"}, "bump member");
      bo.component = m.contains("component") ? small_int(m, "component") : 0;
      const int t = small_int(m, "t"), depth = small_int(m, "m");
      const std::int64_t index = m.contains("index") ? integer(m, "index") : 0;
      e.members.push_back(normalized_bump(p, dom, t, depth, index, bo));
      e.labels.push_back("bump(t=" + std::to_string(t) + ",m=" + std::to_string(depth) +
                         ",i=" + std::to_string(index) + ")");
    } else if (type == "bump_grid") {
      only_keys(m, {"type", "t_last", "m_last", "shape"}, "bump_grid member");
      Ensemble grid = bump_grid_ensemble(p, dom, small_int(m, "t_last"), small_int(m, "m_last"), bo);
      e.members.insert(e.members.end(), grid.members.begin(), grid.members.end());
      e.labels.insert(e.labels.end(), grid.labels.begin(), grid.labels.end());
    } else if (type == "polynomial") {
      only_keys(m, {"type", "coeffs", "a", "b"}, "polynomial member");
      const json& c = field(m, "coeffs");
      if (!c.is_array()) schema("field \"coeffs\" must be an array");
      std::vector<double> coeffs;
      for (const auto& v : c) {
        if (!v.is_number()) schema("coefficients must be numbers");
        coeffs.push_back(v.get<double>());
      }
      e.members.push_back(std::make_shared<PolynomialPiece>(
          coeffs, Interval{number(m, "a"), number(m, "b")}));
      e.labels.push_back("polynomial");
    } else if (type == "zero") {
      only_keys(m, {"type"}, "zero member");
      e.members.push_back(std::make_shared<ZeroFunction>());
      e.labels.push_back("zero");
    } else {
      schema("unknown ensemble member type \"" + type + "\"");
    }
  }
  return e;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::input, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    schema(path + ": " + e.what());
  }
}

}  // namespace widthlab::io
