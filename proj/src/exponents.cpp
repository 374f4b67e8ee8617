#include "widthlab/exponents.hpp"

#include <cmath>
#include <sstream>

#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"

namespace widthlab {
namespace {

constexpr double kDenominatorTol = 1e-14;
constexpr double kCriticalLineTol = 1e-12;

bool valid_p(double p) { return !std::isnan(p) && p > 1.0; }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) fail(ErrorCode::validation, std::string(name) + " must be finite");
}

// Exponent formulas are evaluated in extended precision.
using Real = long double;

Real checked_denominator(Real den, const char* what) {
  if (!std::isfinite(den) || std::abs(den) <= kDenominatorTol) {
    std::ostringstream os;
    os << "degenerate parameters: " << what << " denominator is " << static_cast<double>(den);
    fail(ErrorCode::degenerate, os.str());
  }
  return den;
}

int binomial(int n, int k) {
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return static_cast<int>(b);
}

}  // namespace

void SpaceParams::validate() const {
  if (!valid_p(p0)) fail(ErrorCode::validation, "p0 must lie in (1, inf]");
  if (!valid_p(p1)) fail(ErrorCode::validation, "p1 must lie in (1, inf]");
  if (!valid_p(q) || std::isinf(q)) fail(ErrorCode::validation, "q must lie in (1, inf)");
}

const char* to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::power_hset: return "power_hset";
    case ProblemKind::log_hset: return "log_hset";
    case ProblemKind::power_rd: return "power_rd";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "power_hset") return ProblemKind::power_hset;
  if (name == "log_hset") return ProblemKind::log_hset;
  if (name == "power_rd") return ProblemKind::power_rd;
  fail(ErrorCode::validation, "unknown problem kind '" + name + "'");
}

ProblemKind SobolevProblem::kind() const noexcept {
  return static_cast<ProblemKind>(weights.index());
}

void SobolevProblem::validate() const {
  if (r < 1) fail(ErrorCode::validation, "r must be a positive integer");
  if (d < 1) fail(ErrorCode::validation, "d must be a positive integer");
  space.validate();
  const double ip0 = recip(space.p0), ip1 = recip(space.p1), iq = recip(space.q);
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, PowerHsetWeights>) {
          require_finite(w.theta, "theta");
          require_finite(w.beta, "beta");
          require_finite(w.sigma, "sigma");
          require_finite(w.lambda, "lambda");
          if (!(w.theta >= 0.0 && w.theta < d))
            fail(ErrorCode::validation, "theta must lie in [0, d)");
        } else if constexpr (std::is_same_v<W, LogHsetWeights>) {
          for (auto [v, n] : {std::pair{w.gamma, "gamma"}, {w.beta, "beta"}, {w.mu, "mu"},
                              {w.sigma, "sigma"}, {w.alpha, "alpha"}, {w.lambda, "lambda"},
                              {w.nu, "nu"}})
            require_finite(v, n);
          if (w.gamma < 0.0) fail(ErrorCode::validation, "gamma must be >= 0");
          const double rhs1 = r + d * iq - d * ip1;
          const double rhs2 = d * ip0 - d * iq;
          const double scale1 = 1.0 + std::abs(w.beta) + std::abs(w.lambda) + std::abs(rhs1);
          const double scale2 = 1.0 + std::abs(w.sigma) + std::abs(w.lambda) + std::abs(rhs2);
          if (std::abs(w.beta + w.lambda - rhs1) > kCriticalLineTol * scale1)
            fail(ErrorCode::validation, "log_hset requires beta + lambda = r + d/q - d/p1");
          if (std::abs(w.sigma - w.lambda - rhs2) > kCriticalLineTol * scale2)
            fail(ErrorCode::validation, "log_hset requires sigma - lambda = d/p0 - d/q");
        } else {
          require_finite(w.beta, "beta");
          require_finite(w.sigma, "sigma");
          require_finite(w.lambda, "lambda");
        }
      },
      weights);
}

void AbstractParams::validate() const {
  if (!(s_star > 0.0) || !std::isfinite(s_star))
    fail(ErrorCode::validation, "s_star must be positive");
  if (!(gamma_star >= 0.0) || !std::isfinite(gamma_star))
    fail(ErrorCode::validation, "gamma_star must be >= 0");
  require_finite(alpha_star, "alpha_star");
  require_finite(mu_star, "mu_star");
  if (k_star < 1) fail(ErrorCode::validation, "k_star must be a positive integer");
  if (!(c >= 1.0) || !std::isfinite(c)) fail(ErrorCode::validation, "c must be >= 1");
  if (t0 < 0) fail(ErrorCode::validation, "t0 must be >= 0");
  if (r0 < 1) fail(ErrorCode::validation, "r0 must be a positive integer");
}

std::array<bool, 9> regime_predicates(const SpaceParams& s) {
  const double p0 = s.p0, p1 = s.p1, q = s.q;
  const bool diag = p0 == q && p1 == q;
  std::array<bool, 9> c{};
  c[0] = p0 >= q && p1 >= q;
  c[1] = p0 > q && p1 < q && q <= 2.0;
  c[2] = (p0 > q || (p0 == q && q > 2.0)) && p1 >= 2.0 && p1 < q;
  c[3] = (p0 > q || (p0 == q && q > 2.0)) && p1 < 2.0 && q > 2.0;
  c[4] = p0 <= q && p1 <= q && q <= 2.0 && !diag;
  c[5] = p0 < q && q <= 2.0 && p1 > q;
  c[6] = p0 < q && q > 2.0 && std::max(p0, p1) <= 2.0;
  c[7] = p0 < q && q > 2.0 && std::min(p0, p1) >= 2.0 && !(p0 == 2.0 && p1 == 2.0);
  c[8] = p0 < q && q > 2.0 && std::min(p0, p1) < 2.0 && 2.0 < std::max(p0, p1);
  return c;
}

int regime_of(const SpaceParams& s) {
  s.validate();
  const auto preds = regime_predicates(s);
  int found = 0;
  for (int i = 0; i < 9; ++i) {
    if (!preds[i]) continue;
    if (found != 0) {
      std::ostringstream os;
      os << "regimes " << found << " and " << i + 1 << " both match (p0=" << s.p0
         << ", p1=" << s.p1 << ", q=" << s.q << ")";
      fail(ErrorCode::domain, os.str());
    }
    found = i + 1;
  }
  if (found == 0) fail(ErrorCode::domain, "no regime matches the given exponents");
  return found;
}

ExponentPair abstract_exponents(const AbstractParams& a, const SpaceParams& s) {
  s.validate();
  const Real ip0 = recip(s.p0), ip1 = recip(s.p1), iq = recip(s.q);
  const Real st = a.s_star, g = a.gamma_star, al = a.alpha_star, mu = a.mu_star;
  const Real den = checked_denominator(mu + al + g * (st + ip0 - ip1), "exponent");
  ExponentPair e;
  e.theta_tilde = static_cast<double>(st * (al + g * ip0 - g * iq) / den);
  e.theta_hat = static_cast<double>((al * (st + iq - ip1) + mu * (iq - ip0)) / den);
  return e;
}

AbstractParams problem_to_abstract(const SobolevProblem& p, const AbstractConfig& cfg) {
  p.validate();
  const double d = p.d, r = p.r;
  const double ip0 = recip(p.space.p0), ip1 = recip(p.space.p1), iq = recip(p.space.q);
  AbstractParams a;
  a.s_star = r / d;
  a.k_star = 1;
  a.c = cfg.c;
  a.t0 = cfg.t0;
  a.r0 = cfg.r0.value_or(binomial(p.r - 1 + p.d, p.d));
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, PowerHsetWeights>) {
          a.gamma_star = w.theta;
          a.mu_star = w.beta + w.lambda - r - d * iq + d * ip1;
          a.alpha_star = w.sigma - w.lambda + d * iq - d * ip0;
        } else if constexpr (std::is_same_v<W, LogHsetWeights>) {
          a.gamma_star = w.gamma + 1.0;
          a.alpha_star = w.alpha - w.nu;
          a.mu_star = w.mu + w.nu;
        } else {
          a.gamma_star = 0.0;
          a.mu_star = w.beta + w.lambda + r + d * iq - d * ip1;
          a.alpha_star = w.sigma - w.lambda + d * ip0 - d * iq;
        }
      },
      p.weights);
  a.validate();
  return a;
}

ExponentPair concrete_exponents(const SobolevProblem& p) {
  p.validate();
  const Real d = p.d, r = p.r, s = r / d;
  const Real ip0 = recip(p.space.p0), ip1 = recip(p.space.p1), iq = recip(p.space.q);
  Real tt = 0, th = 0;
  std::visit(
      [&](const auto& wt) {
        using W = std::decay_t<decltype(wt)>;
        if constexpr (std::is_same_v<W, PowerHsetWeights>) {
          const Real theta = wt.theta, beta = wt.beta, sigma = wt.sigma, lambda = wt.lambda;
          const Real den = checked_denominator(
              beta + sigma - (r + d * ip0 - d * ip1) * (1 - theta / d), "power_hset");
          tt = s * (sigma - lambda + (d - theta) * iq - (d - theta) * ip0) / den;
          th = (sigma * (s + iq - ip1) + beta * (iq - ip0) - lambda * (s + ip0 - ip1)) / den;
        } else if constexpr (std::is_same_v<W, LogHsetWeights>) {
          const Real g1 = Real(wt.gamma) + 1, mu = wt.mu, alpha = wt.alpha, nu = wt.nu;
          const Real den = checked_denominator(mu + alpha + g1 * (s + ip0 - ip1), "log_hset");
          tt = s * (alpha - nu + g1 * (ip0 - iq)) / den;
          th = (alpha * (s + iq - ip1) + mu * (iq - ip0) - nu * (s + ip0 - ip1)) / den;
        } else {
          const Real beta = wt.beta, sigma = wt.sigma, lambda = wt.lambda;
          const Real den =
              checked_denominator(beta + sigma + r + d * ip0 - d * ip1, "power_rd");
          tt = s * (sigma - lambda + d * ip0 - d * iq) / den;
          th = (sigma * (s + iq - ip1) + beta * (iq - ip0) - lambda * (s + ip0 - ip1)) / den;
        }
      },
      p.weights);
  return {static_cast<double>(tt), static_cast<double>(th)};
}

ExponentProfile exponent_profile(const SpaceParams& s, double s_star, const ExponentPair& e,
                                 const ProfileOptions& opts) {
  const int id = regime_of(s);
  const double ip1 = recip(s.p1), iq = recip(s.q);
  const double tt = e.theta_tilde, th = e.theta_hat, q = s.q;
  const double gluskin_tail = q * (s_star + iq - ip1) / 2.0;
  const double case8_last = opts.case8_theta4 == Case8Theta4::as_printed ? th / 2.0 : q * th / 2.0;

  ExponentProfile prof;
  prof.case_id = id;
  switch (id) {
    case 1: prof.thetas = {s_star, tt}; break;
    case 2: prof.thetas = {s_star + iq - ip1, tt, th}; break;
    case 3: prof.thetas = {s_star, gluskin_tail, tt, q * th / 2.0}; break;
    case 4:
      prof.thetas = {s_star + 0.5 - ip1, gluskin_tail, tt, th + 0.5 - iq, q * th / 2.0};
      break;
    case 5: prof.thetas = {s_star + iq - ip1, th}; break;
    case 6: prof.thetas = {s_star, tt, th}; break;
    case 7: prof.thetas = {s_star + 0.5 - ip1, gluskin_tail, th + 0.5 - iq, q * th / 2.0}; break;
    case 8: prof.thetas = {s_star, gluskin_tail, tt, case8_last}; break;
    default:
      prof.thetas = {s_star + std::min(0.5 - ip1, 0.0), gluskin_tail, tt, th + 0.5 - iq,
                     q * th / 2.0};
      break;
  }

  std::size_t best = 0;
  for (std::size_t j = 1; j < prof.thetas.size(); ++j)
    if (prof.thetas[j] < prof.thetas[best]) best = j;
  std::vector<int> tied;
  for (std::size_t j = 0; j < prof.thetas.size(); ++j)
    if (j != best && prof.thetas[j] - prof.thetas[best] <= opts.tie_tolerance)
      tied.push_back(static_cast<int>(j) + 1);
  if (tied.empty()) {
    prof.j_star = static_cast<int>(best) + 1;
    prof.theta_star = prof.thetas[best];
  } else {
    std::ostringstream os;
    os << "tie: theta_" << best + 1;
    for (int j : tied) os << " = theta_" << j;
    os << " = " << prof.thetas[best] << "; no strict minimizer";
    prof.diagnostic = os.str();
  }
  return prof;
}

void HypothesisReport::add(std::string name, double value, bool pass) {
  checks.push_back({std::move(name), value, pass});
  overall = overall && pass;
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void append_abstract_checks(HypothesisReport& report, const AbstractParams& a,
                            const SpaceParams& s) {
  const double ip0 = recip(s.p0), ip1 = recip(s.p1), iq = recip(s.q);
  const double st = a.s_star;

  const double standing = st - pos_part(ip1 - iq);
  report.add("s* > (1/p1 - 1/q)_+", standing, standing > 0.0);

  const double smooth = std::min({st, st + iq - ip1, st + ip0 - ip1});
  report.add("min{s*, s* + 1/q - 1/p1, s* + 1/p0 - 1/p1} > 0", smooth, smooth > 0.0);

  const double growth = std::min(a.mu_star + a.alpha_star + a.gamma_star * (ip0 - ip1),
                                 a.mu_star + a.alpha_star);
  report.add("min{mu* + alpha* + gamma*/p0 - gamma*/p1, mu* + alpha*} > 0", growth,
             growth > 0.0);

  if (s.p0 >= s.q) {
    const double v = a.alpha_star - a.gamma_star * (iq - ip0);
    report.add("alpha* > gamma*/q - gamma*/p0", v, v > 0.0);
  }
  if ((s.p0 <= s.q && s.p1 <= s.q) || (s.p0 < s.q && s.p1 > s.q)) {
    const double v = a.alpha_star * (st + iq - ip1) - a.mu_star * (ip0 - iq);
    report.add("alpha*(s* + 1/q - 1/p1) > mu*(1/p0 - 1/q)", v, v > 0.0);
  }
}

HypothesisReport check_hypotheses(const SobolevProblem& p, const ProfileOptions& opts) {
  HypothesisReport report;
  try {
    p.validate();
  } catch (const Error& e) {
    report.add(std::string("parameter invariants: ") + e.what(), 0.0, false);
    return report;
  }
  const double d = p.d, r = p.r;
  const double ip0 = recip(p.space.p0), ip1 = recip(p.space.p1), iq = recip(p.space.q);

  const double embed = r / d + std::min(iq, ip0) - ip1;
  report.add("r/d + min{1/q, 1/p0} - 1/p1 > 0", embed, embed > 0.0);

  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, PowerHsetWeights>) {
          const double v = std::min(w.beta + w.sigma - r - (d - w.theta) * ip0 + (d - w.theta) * ip1,
                                    w.beta + w.sigma - r - d * ip0 + d * ip1);
          report.add("min{beta + sigma - r - (d-theta)/p0 + (d-theta)/p1, "
                     "beta + sigma - r - d/p0 + d/p1} > 0",
                     v, v > 0.0);
        } else if constexpr (std::is_same_v<W, LogHsetWeights>) {
          const double v =
              std::min(w.mu + w.alpha + (w.gamma + 1.0) * (ip0 - ip1), w.mu + w.alpha);
          report.add("min{mu + alpha + (gamma+1)(1/p0 - 1/p1), mu + alpha} > 0", v, v > 0.0);
        } else {
          const double v = w.beta + w.sigma + r + d * ip0 - d * ip1;
          report.add("beta + sigma + r + d/p0 - d/p1 > 0", v, v > 0.0);
        }
      },
      p.weights);

  ExponentPair e;
  try {
    e = concrete_exponents(p);
  } catch (const Error& err) {
    report.add(std::string("exponent denominator nonzero: ") + err.what(), 0.0, false);
    return report;
  }
  if (p.space.p0 >= p.space.q)
    report.add("theta~ > 0 (p0 >= q)", e.theta_tilde, e.theta_tilde > 0.0);
  else
    report.add("theta^ > 0 (p0 < q)", e.theta_hat, e.theta_hat > 0.0);

  append_abstract_checks(report, problem_to_abstract(p), p.space);

  const ExponentProfile prof = exponent_profile(p.space, p.s_star(), e, opts);
  double gap = 0.0;
  if (prof.j_star) {
    gap = kInf;
    for (int j = 1; j <= prof.j0(); ++j)
      if (j != *prof.j_star) gap = std::min(gap, prof.thetas[j - 1] - *prof.theta_star);
  }
  report.add("strict minimizer theta_j* < min_{j != j*} theta_j", gap, prof.j_star.has_value());
  return report;
}

Prediction predicted_width_exponent(const SobolevProblem& p, const ProfileOptions& opts) {
  Prediction out;
  out.report = check_hypotheses(p, opts);
  const auto* inv = out.report.checks.empty() ? nullptr : &out.report.checks.front();
  if (inv && inv->name.rfind("parameter invariants", 0) == 0) return out;
  try {
    out.exponents = concrete_exponents(p);
  } catch (const Error&) {
    return out;
  }
  out.profile = exponent_profile(p.space, p.s_star(), out.exponents, opts);
  if (out.report.overall && out.profile.theta_star) out.exponent = out.profile.theta_star;
  return out;
}

}  // namespace widthlab
