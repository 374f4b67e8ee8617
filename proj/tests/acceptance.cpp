// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime limits are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "generators.hpp"
#include "widthlab/ballwidths.hpp"
#include "widthlab/exponents.hpp"
#include "widthlab/lowerbounds.hpp"
#include "widthlab/multiscale.hpp"
#include "widthlab/rate_fit.hpp"

using namespace widthlab;

namespace {

constexpr double kOracleRel = 0.05;
constexpr double kRouteTol = 1e-12;
constexpr double kDiagonalTol = 1e-12;
constexpr double kInclusionTol = 1e-9;
constexpr double kSlopeRel = 0.01;
constexpr double kUpperSlopeLo = -0.95, kUpperSlopeHi = -0.55;
constexpr double kRankConstantRatio = 2.0;
constexpr double kLowerSlopeTol = 5e-2;
constexpr double kUpperVsLowerSlack = 0.1;
constexpr double kCriticalTol = 1e-10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

// plain l_p norm, kept independent of the library's geometry helpers
double lp_norm(const Eigen::VectorXd& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

SobolevProblem hset_example() {
  SobolevProblem p;
  p.space = {2.0, 2.0, 2.0};
  p.weights = PowerHsetWeights{0.0, 1.0, 1.0, 0.25};
  return p;
}

std::vector<std::int64_t> budgets_16_1024() { return {16, 32, 64, 128, 256, 512, 1024}; }

// Criterion 1: brute-force oracle against (N - n)^{1/q - 1/p}.
Outcome oracle_exactness() {
  const std::pair<double, double> pq[] = {{kInf, 1.0}, {kInf, 2.0}, {2.0, 2.0}, {4.0, 2.0}};
  double worst = 0.0;
  int cases = 0;
  for (auto [p, q] : pq)
    for (int N = 1; N <= 4; ++N)
      for (int n = 0; n <= 2 && n < N; ++n) {
        const double want = exact_width(N, n, p, q).value;
        const double got = brute_force_width_oracle(BallSpec{N, p, 1.0}, n, q).value;
        worst = std::max(worst, std::abs(got - want) / want);
        ++cases;
      }
  const double spots[] = {
      brute_force_width_oracle(BallSpec{4, kInf, 1.0}, 1, 1.0).value,
      brute_force_width_oracle(BallSpec{3, kInf, 1.0}, 1, 1.0).value,
      brute_force_width_oracle(BallSpec{4, 2.0, 1.0}, 3, 2.0).value,
  };
  const double spot_want[] = {3.0, 2.0, 1.0};
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(spots[i] - spot_want[i]) / spot_want[i]);
  std::ostringstream os;
  os << cases << " grid cases + 3 spot values, max relative error " << worst << " (tol "
     << kOracleRel << "); spots " << spots[0] << ", " << spots[1] << ", " << spots[2];
  return {worst <= kOracleRel, os.str()};
}

// Criterion 2: concrete formulas against the abstract route.
Outcome exponent_consistency() {
  gen::Rng g(2);
  double worst = 0.0;
  for (ProblemKind kind : {ProblemKind::power_hset, ProblemKind::log_hset, ProblemKind::power_rd})
    for (int i = 0; i < 10000; ++i) {
      const SobolevProblem p = gen::problem(g, kind);
      const ExponentPair c = concrete_exponents(p);
      const ExponentPair a = abstract_exponents(problem_to_abstract(p), p.space);
      worst = std::max({worst, std::abs(c.theta_tilde - a.theta_tilde),
                        std::abs(c.theta_hat - a.theta_hat)});
    }
  std::ostringstream os;
  os << "3 x 10000 problems, max route error " << worst << " (tol " << kRouteTol << ")";
  return {worst <= kRouteTol, os.str()};
}

// Criterion 3: regime totality on a dense grid and the diagonal identity.
Outcome regime_totality() {
  std::vector<double> ps{kInf};
  for (int k = 21; k <= 200; ++k) ps.push_back(k / 20.0);
  std::vector<double> qs{2.0};
  for (int k = 21; k <= 200; k += 2) qs.push_back(k / 20.0);
  long bad = 0, points = 0;
  for (double q : qs)
    for (double p0 : ps)
      for (double p1 : ps) {
        const auto preds = regime_predicates({p0, p1, q});
        if (std::count(preds.begin(), preds.end(), true) != 1) ++bad;
        ++points;
      }
  gen::Rng g(3);
  double diag = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double q = g.uniform(1.05, 10.0);
    const SpaceParams s{q, q, q};
    const ExponentPair e = abstract_exponents(gen::abstract(g, s), s);
    diag = std::max(diag, std::abs(e.theta_tilde - e.theta_hat));
  }
  for (double q : qs) {
    SobolevProblem p = hset_example();
    p.space = {q, q, q};
    const ExponentPair e = concrete_exponents(p);
    diag = std::max(diag, std::abs(e.theta_tilde - e.theta_hat));
  }
  std::ostringstream os;
  os << points << " grid points, " << bad << " without a unique regime; diagonal max |tt - th| "
     << diag << " (tol " << kDiagonalTol << ")";
  return {bad == 0 && diag <= kDiagonalTol, os.str()};
}

// Criterion 4: the interpolated ball contains the intersection.
Outcome galeev_inclusion() {
  gen::Rng g(4);
  long violations = 0, samples = 0;
  double worst = 0.0;
  constexpr int kConfigs = 24;
  for (int cfg = 0; cfg < kConfigs; ++cfg) {
    const int N = cfg < 4 ? 64 : g.integer(1, 64);
    const double p0 = g.coin(0.2) ? kInf : g.uniform(1.0, 8.0);
    double p1 = g.coin(0.2) ? kInf : g.uniform(1.0, 8.0);
    if (std::abs(gen::inv(p0) - gen::inv(p1)) < 0.05) p1 = p0 < 4.0 ? 10.0 : 1.2;
    const double k0 = std::exp(g.uniform(-3, 3)), k1 = std::exp(g.uniform(-3, 3));
    const double lam = g.uniform(0.05, 0.95);
    const double q_tilde = 1.0 / ((1.0 - lam) * gen::inv(p1) + lam * gen::inv(p0));
    const InterpolatedBall ib = interpolation_ball({N, {N, p0, k0}, {N, p1, k1}}, q_tilde);
    const double bound = std::pow(k0, lam) * std::pow(k1, 1.0 - lam);
    worst = std::max(worst, std::abs(ib.ball.radius - bound) / bound);
    Eigen::VectorXd x(N);
    for (int i = 0; i < 100000; ++i) {
      x.setZero();
      const int support = g.integer(1, N);
      for (int k = 0; k < support; ++k)
        x(k) = g.coin(0.5) ? g.normal() : (g.coin(0.5) ? 1.0 : -1.0);
      const double scale = std::max(lp_norm(x, p0) / k0, lp_norm(x, p1) / k1);
      if (!(scale > 0.0)) continue;
      x /= scale;  // boundary point of the intersection
      ++samples;
      if (lp_norm(x, q_tilde) > bound * (1.0 + kInclusionTol)) ++violations;
    }
  }
  std::ostringstream os;
  os << kConfigs << " configurations x 1e5 samples (" << samples << " used), " << violations
     << " violations beyond " << kInclusionTol << "; radius vs k0^l k1^(1-l) rel diff " << worst;
  return {violations == 0 && worst <= 1e-12, os.str()};
}

// Criterion 5: bump-norm slopes in the ring index j and depth m.
Outcome bump_slopes() {
  const DomainSpec dom{DomainSpec::Geometry::interval_singular_origin, 10};
  double worst = 0.0;
  int fits = 0;
  for (int r : {1, 2})
    for (SpaceParams sp : {SpaceParams{2.0, 2.0, 2.0}, SpaceParams{4.0, 3.0, 2.0},
                           SpaceParams{1.5, 3.0, 3.0}}) {
      SobolevProblem p;
      p.r = r;
      p.space = sp;
      p.weights = PowerHsetWeights{0.0, static_cast<double>(r), 1.0, 0.25};
      const auto& w = std::get<PowerHsetWeights>(p.weights);
      const double iq = 1.0 / sp.q, ip0 = gen::inv(sp.p0), ip1 = gen::inv(sp.p1);
      const double sob_m = r + iq - ip1, sob_j = sob_m - (w.beta + w.lambda);
      const double p0_m = iq - ip0, p0_j = p0_m + w.sigma - w.lambda;
      std::vector<std::pair<double, double>> sj, wj, sm, wm;
      for (int j = 2; j <= 8; ++j) {
        const auto n = mean_log_norms(bump_norms(build_bump_family(p, dom, j, 2), p, dom));
        sj.push_back({std::exp2(j), n.sobolev_norm});
        wj.push_back({std::exp2(j), n.weighted_p0_norm});
      }
      for (int m = 0; m <= 6; ++m) {
        const auto n = mean_log_norms(bump_norms(build_bump_family(p, dom, 3, m), p, dom));
        sm.push_back({std::exp2(m), n.sobolev_norm});
        wm.push_back({std::exp2(m), n.weighted_p0_norm});
      }
      const std::pair<double, double> pairs[] = {{fit_rate(sj).slope, sob_j},
                                                 {fit_rate(sm).slope, sob_m},
                                                 {fit_rate(wj).slope, p0_j},
                                                 {fit_rate(wm).slope, p0_m}};
      for (auto [got, want] : pairs) {
        worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1.0));
        ++fits;
      }
    }
  std::ostringstream os;
  os << fits << " slope fits, max relative deviation " << worst << " (tol " << kSlopeRel << ")";
  return {worst <= kSlopeRel, os.str()};
}

struct UpperRun {
  RateFit fit;
  std::vector<ExperimentRow> rows;
};

UpperRun upper_experiment() {
  const SobolevProblem p = hset_example();
  const DomainSpec dom = default_domain(p, 14);
  const Ensemble ens = bump_grid_ensemble(p, dom, 13, 13);
  const ExperimentResult res = run_experiment(p, dom, budgets_16_1024(), ens);
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : res.rows) pts.push_back({static_cast<double>(r.n), r.error});
  return {fit_rate(pts), res.rows};
}

// Criterion 6: simulated error rate, monotonicity and rank constant.
Outcome upper_bound(const UpperRun& u) {
  const double predicted = predicted_width_exponent(hset_example()).exponent.value_or(kInf);
  bool monotone = true;
  double cmin = kInf, cmax = 0.0;
  for (std::size_t i = 0; i < u.rows.size(); ++i) {
    if (i > 0 && u.rows[i].error > u.rows[i - 1].error) monotone = false;
    const double C = static_cast<double>(u.rows[i].rank) / static_cast<double>(u.rows[i].n);
    cmin = std::min(cmin, C);
    cmax = std::max(cmax, C);
  }
  const bool slope_ok = u.fit.slope >= kUpperSlopeLo && u.fit.slope <= kUpperSlopeHi;
  const bool c_ok = cmin > 0.0 && cmax / cmin <= kRankConstantRatio;
  std::ostringstream os;
  os << "predicted exponent " << predicted << ", fitted slope " << u.fit.slope << " (band ["
     << kUpperSlopeLo << ", " << kUpperSlopeHi << "]), nonincreasing " << (monotone ? "yes" : "no")
     << ", rank/n in [" << cmin << ", " << cmax << "] ratio " << cmax / cmin << " (<= "
     << kRankConstantRatio << ")";
  return {slope_ok && monotone && c_ok && std::abs(predicted - 0.75) <= 1e-12, os.str()};
}

// Criterion 7: the lower curve slope and its relation to the measured rate.
Outcome lower_upper(const UpperRun& u) {
  const SobolevProblem p = hset_example();
  const LowerBoundCurve c = lower_bound_curve(p, budgets_16_1024());
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : c.rows) pts.push_back({static_cast<double>(r.n), r.max});
  const double lower = fit_rate(pts).slope;
  const double theta = predicted_width_exponent(p).profile.theta_star.value_or(kInf);
  const bool match = std::abs(lower + theta) <= kLowerSlopeTol;
  const bool consistent = u.fit.slope >= lower - kUpperVsLowerSlack;
  std::ostringstream os;
  os << "lower max slope " << lower << " vs -theta_j* = " << -theta << " (tol " << kLowerSlopeTol
     << "); upper slope " << u.fit.slope << " >= " << lower - kUpperVsLowerSlack << " "
     << (consistent ? "yes" : "no");
  return {match && consistent, os.str()};
}

// Criterion 8: computed critical scales satisfy their defining balances.
Outcome critical_identities() {
  gen::Rng g(8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SpaceParams s = gen::space(g);
    const AbstractParams a = gen::abstract(g, s);
    const double n = std::exp2(g.uniform(1.0, 20.0));
    const double t = g.uniform(0.0, 12.0);
    const CriticalScales cs = critical_scales(a, s, n);
    const double ip0 = gen::inv(s.p0), ip1 = gen::inv(s.p1), iq = 1.0 / s.q;
    const double k = a.k_star, gam = a.gamma_star, al = a.alpha_star, mu = a.mu_star;
    const double ln = std::log2(n);
    const double D = mu + al + gam * (a.s_star + ip0 - ip1);
    const double mt = cs.m_tilde(t), mf = cs.m_flat(t);
    const double residuals[] = {
        gam * k * t + cs.m_hat(t) - ln,
        gam * k * t + cs.m_bar(t) - 0.5 * s.q * ln,
        -(al + gam * ip0 - gam * iq) * k * t - ((mu + gam * iq - gam * ip1) * k * t - a.s_star * mt),
        -al * k * t + mf * (ip0 - iq) - (mu * k * t - mf * (a.s_star + iq - ip1)),
        D * k * cs.t_tilde - a.s_star * ln,
        D * k * cs.t_flat - (a.s_star + ip0 - ip1) * ln,
        D * k * cs.t_hat - (a.s_star + ip0 - ip1) * 0.5 * s.q * ln,
    };
    for (double r : residuals) worst = std::max(worst, std::abs(r));
  }
  std::ostringstream os;
  os << "1000 draws x 7 identities, max residual " << worst << " (tol " << kCriticalTol << ")";
  return {worst <= kCriticalTol, os.str()};
}

// Criterion 9: numeric estimator monotone, scale equivariant, above the oracle.
Outcome numeric_estimator() {
  SearchConfig cfg;
  cfg.restarts = 4;
  cfg.refine_steps = 20;
  bool monotone = true, equivariant = true;
  const Body bodies[] = {BallSpec{6, kInf, 1.0}, BallSpec{5, 1.5, 1.0}, BallSpec{8, 3.0, 1.0},
                         IntersectionSpec{6, {6, 1.0, 2.0}, {6, kInf, 1.0}}};
  for (const Body& b : bodies)
    for (double q : {1.5, 2.0, 3.0}) {
      double prev = kInf;
      for (int n = 0; n < 5; ++n) {
        const double v = numeric_width_upper(b, n, q, cfg).value;
        if (v > prev) monotone = false;
        prev = v;
      }
    }
  for (double scale : {0.25, 3.0, 7.0}) {
    for (int n : {1, 2}) {
      const double one = numeric_width_upper(BallSpec{5, 3.0, 1.0}, n, 1.5, cfg).value;
      const double big = numeric_width_upper(BallSpec{5, 3.0, scale}, n, 1.5, cfg).value;
      if (std::abs(big - scale * one) > 1e-14 * scale * one) equivariant = false;
      const double i1 =
          numeric_width_upper(IntersectionSpec{4, {4, 1.0, 1.0}, {4, kInf, 0.5}}, n, 2.0, cfg).value;
      const double is = numeric_width_upper(
                            IntersectionSpec{4, {4, 1.0, scale}, {4, kInf, 0.5 * scale}}, n, 2.0, cfg)
                            .value;
      if (std::abs(is - scale * i1) > 1e-14 * scale * i1) equivariant = false;
    }
  }
  long below = 0, compared = 0;
  // the oracle's dense search is slow for finite p with q outside {1, 2}
  const std::tuple<double, double, int> pq[] = {
      {kInf, 1.0, 4}, {kInf, 2.0, 4}, {2.0, 2.0, 4}, {4.0, 2.0, 4}, {1.5, 3.0, 3}};
  for (auto [p, q, N_max] : pq)
    for (int N = 2; N <= N_max; ++N)
      for (int n = 0; n <= 2 && n < N; ++n) {
        const WidthEstimate o = brute_force_width_oracle(BallSpec{N, p, 1.0}, n, q);
        const double v = numeric_width_upper(BallSpec{N, p, 1.0}, n, q, cfg).value;
        if (v < o.value - o.tolerance.value_or(0.0)) ++below;
        ++compared;
      }
  std::ostringstream os;
  os << "monotone " << (monotone ? "yes" : "no") << ", exact scale equivariance "
     << (equivariant ? "yes" : "no") << ", " << below << "/" << compared
     << " cases below oracle - tolerance";
  return {monotone && equivariant && below == 0, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  UpperRun upper;
  const std::vector<Criterion> criteria = {
      {1, 300, oracle_exactness},
      {2, 10, exponent_consistency},
      {3, 10, regime_totality},
      {4, 600, galeev_inclusion},
      {5, 120, bump_slopes},
      {6, 900,
       [&] {
         upper = upper_experiment();
         return upper_bound(upper);
       }},
      {7, 60, [&] { return lower_upper(upper); }},
      {8, 10, critical_identities},
      {9, 600, numeric_estimator},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s [%.2fs, limit %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id,
                out.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
