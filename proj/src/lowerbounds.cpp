#include "widthlab/lowerbounds.hpp"

#include <algorithm>
#include <cmath>

#include "widthlab/ballwidths.hpp"
#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"

namespace widthlab {

std::vector<double> BumpFamily::constants() const {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& b : members) out.push_back(b->amplitude());
  return out;
}

namespace {

void check_resolution(const DomainSpec& dom, int j, int m) {
  if (j < 0 || m < 0) fail(ErrorCode::validation, "family indices must be >= 0");
  if (j > dom.t_max) fail(ErrorCode::size_limit, "ring index beyond the domain resolution");
  if (m > 24) fail(ErrorCode::size_limit, "family depth above 24");
}

std::shared_ptr<const BumpProfile> make_profile(const SobolevProblem& p, const BumpOptions& o) {
  return std::make_shared<const BumpProfile>(p.r, p.space.q, o.shape);
}

/// Unit L_{q,v} bump on cell `index` of the depth-m split of the component.
std::shared_ptr<const ScaledBump> unit_bump(const std::shared_ptr<const BumpProfile>& prof,
                                            const SobolevProblem& p, const DomainSpec& dom,
                                            const Cell& cell, const QuadratureSpec& quad) {
  const WeightFactor v = weight_model(p).v;
  ScaledBump raw(prof, cell.interval.a, cell.interval.length(), 1.0);
  const double norm = weighted_norm(raw, v, p.space.q, dom, quad);
  if (!(norm > 0.0) || !std::isfinite(norm)) fail(ErrorCode::numeric, "bump normalization failed");
  return std::make_shared<const ScaledBump>(raw.scaled(1.0 / norm));
}

}  // namespace

BumpFamily build_bump_family(const SobolevProblem& p, const DomainSpec& dom, int j, int m,
                             const BumpOptions& opts) {
  p.validate();
  dom.validate();
  check_resolution(dom, j, m);
  const RingPartition part(dom, m);
  if (opts.component < 0 || opts.component >= part.components(j))
    fail(ErrorCode::validation, "ring component out of range");
  BumpFamily fam;
  fam.j = j;
  fam.m = m;
  fam.component = opts.component;
  fam.profile = make_profile(p, opts);
  const std::int64_t count = std::int64_t{1} << m;
  fam.members.resize(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    const Cell c = part.cell(j, opts.component, m, static_cast<std::int64_t>(i));
    fam.members[i] = unit_bump(fam.profile, p, dom, c, opts.quadrature);
  });
  fam.rho = fam.members.front()->rho();
  return fam;
}

std::vector<MembershipNorms> bump_norms(const BumpFamily& fam, const SobolevProblem& p,
                                        const DomainSpec& dom, const QuadratureSpec& quad) {
  std::vector<MembershipNorms> out(fam.members.size());
  parallel_for(out.size(),
               [&](std::size_t i) { out[i] = check_membership(*fam.members[i], p, dom, quad); });
  return out;
}

MembershipNorms mean_log_norms(const std::vector<MembershipNorms>& norms) {
  if (norms.empty()) fail(ErrorCode::validation, "no norms to average");
  double s = 0.0, w = 0.0;
  for (const auto& n : norms) {
    s += std::log(n.sobolev_norm);
    w += std::log(n.weighted_p0_norm);
  }
  const double k = static_cast<double>(norms.size());
  return {std::exp(s / k), std::exp(w / k)};
}

FunctionPtr normalized_bump(const SobolevProblem& p, const DomainSpec& dom, int j, int m,
                            std::int64_t index, const BumpOptions& opts) {
  p.validate();
  dom.validate();
  check_resolution(dom, j, m);
  const RingPartition part(dom, m);
  const Cell c = part.cell(j, opts.component, m, index);
  const auto b = unit_bump(make_profile(p, opts), p, dom, c, opts.quadrature);
  const MembershipNorms n = check_membership(*b, p, dom, opts.quadrature);
  const double scale = std::max(n.sobolev_norm, n.weighted_p0_norm);
  return std::make_shared<const ScaledBump>(b->scaled(1.0 / scale));
}

Ensemble bump_grid_ensemble(const SobolevProblem& p, const DomainSpec& dom, int t_last,
                            int m_last, const BumpOptions& opts) {
  if (t_last < 0 || m_last < 0) fail(ErrorCode::validation, "grid bounds must be >= 0");
  const std::size_t cols = static_cast<std::size_t>(m_last) + 1;
  const std::size_t total = (static_cast<std::size_t>(t_last) + 1) * cols;
  Ensemble e;
  e.members.resize(total);
  e.labels.resize(total);
  parallel_for(total, [&](std::size_t k) {
    const int t = static_cast<int>(k / cols), m = static_cast<int>(k % cols);
    e.members[k] = normalized_bump(p, dom, t, m, 0, opts);
    e.labels[k] = "bump(t=" + std::to_string(t) + ",m=" + std::to_string(m) + ")";
  });
  return e;
}

MatchedScales matched_scales_lower(const AbstractParams& a, const SpaceParams& s, double t) {
  const double ip0 = recip(s.p0), ip1 = recip(s.p1);
  const double flat = a.s_star + ip0 - ip1;
  if (std::abs(flat) < 1e-14) fail(ErrorCode::degenerate, "s* + 1/p0 - 1/p1 = 0");
  if (std::abs(a.s_star) < 1e-14) fail(ErrorCode::degenerate, "s* = 0");
  MatchedScales out;
  out.m_t = (a.mu_star + a.alpha_star) * a.k_star * t / flat;
  out.m_tilde_t =
      (a.mu_star + a.alpha_star + a.gamma_star * (ip0 - ip1)) * a.k_star * t / a.s_star;
  return out;
}

LowerBoundCurve lower_bound_curve(const SobolevProblem& p, const std::vector<std::int64_t>& budgets,
                                  const ProfileOptions& opts) {
  const HypothesisReport report = check_hypotheses(p, opts);
  for (const auto& c : report.checks) {
    // a tie between candidate exponents does not affect the lower bounds
    if (c.name.rfind("strict minimizer", 0) == 0) continue;
    if (!c.pass) fail(ErrorCode::validation, "hypothesis fails: " + c.name);
  }
  LowerBoundCurve curve;
  curve.exponents = concrete_exponents(p);
  curve.s_star = p.s_star();
  const double s = curve.s_star, q = p.space.q, p1 = p.space.p1;
  const double iq = recip(q), ip1 = recip(p1);
  const double th = curve.exponents.theta_tilde, hh = curve.exponents.theta_hat;
  for (std::int64_t n : budgets) {
    if (n < 1) fail(ErrorCode::validation, "budgets must be >= 1");
    const double x = static_cast<double>(n);
    LowerBoundRow row;
    row.n = n;
    const WidthEstimate ball =
        q <= p1 ? exact_width(2 * n, n, p1, q) : gluskin_order(2 * n, n, p1, q);
    row.b94 = std::pow(x, -s - iq + ip1) * ball.value;
    row.b95 = std::pow(x, -th);
    row.b96 = std::pow(x, -hh - pos_part(0.5 - iq));
    if (q > 2.0 && p1 < q) row.b97 = std::pow(x, -q * (s + iq - ip1) / 2.0);
    if (q > 2.0) row.b98 = std::pow(x, -q * hh / 2.0);
    row.max = row.b94;
    row.dominant = "b94";
    const std::pair<const char*, std::optional<double>> rest[] = {
        {"b95", row.b95}, {"b96", row.b96}, {"b97", row.b97}, {"b98", row.b98}};
    for (const auto& [name, v] : rest) {
      if (v && *v > row.max) {
        row.max = *v;
        row.dominant = name;
      }
    }
    curve.rows.push_back(row);
  }
  return curve;
}

}  // namespace widthlab
