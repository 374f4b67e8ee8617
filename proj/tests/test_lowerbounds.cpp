#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "widthlab/errors.hpp"
#include "widthlab/lowerbounds.hpp"
#include "widthlab/rate_fit.hpp"

using namespace widthlab;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;
}

SobolevProblem hset(int r, double p0, double p1, double q) {
  SobolevProblem p;
  p.r = r;
  p.space = {p0, p1, q};
  p.weights = PowerHsetWeights{0.0, static_cast<double>(r), 1.0, 0.25};
  return p;
}

SobolevProblem rd_example() {
  SobolevProblem p;
  p.space = {2.0, 2.0, 2.0};
  p.weights = PowerRdWeights{1.0, 1.0, 0.0};
  return p;
}

// L_{q,v} norm of f computed cell by cell with a plain Gauss rule.
double plain_norm(const Function1D& f, const WeightFactor& v, double q, const Interval& span) {
  double acc = 0.0;
  const int panels = 64;
  const double h = span.length() / panels;
  for (int i = 0; i < panels; ++i)
    acc += gauss_panel([&](double x) { return std::pow(std::abs(v(x) * f.value(x)), q); },
                       span.a + i * h, span.a + (i + 1) * h, 30);
  return std::pow(acc, 1.0 / q);
}

}  // namespace

TEST_CASE("bump families: count, geometry, disjointness, unit norm") {
  const SobolevProblem p = hset(1, 2.0, 2.0, 2.0);
  const DomainSpec dom;
  const WeightFactor v = weight_model(p).v;

  const BumpFamily f00 = build_bump_family(p, dom, 0, 0);
  REQUIRE(f00.count() == 1);
  CHECK(f00.members[0]->support() == Interval{0.5, 1.0});
  CHECK(plain_norm(*f00.members[0], v, 2.0, {0.5, 1.0}) == doctest::Approx(1.0).epsilon(1e-8));

  for (int j : {1, 4}) {
    for (int m : {0, 3, 5}) {
      const BumpFamily fam = build_bump_family(p, dom, j, m);
      CHECK(fam.count() == (std::int64_t{1} << m));
      CHECK(fam.rho == doctest::Approx(std::exp2(-j - 1 - m)).epsilon(1e-14));
      CHECK(fam.constants().size() == fam.members.size());
      for (std::size_t i = 0; i < fam.members.size(); ++i) {
        const Interval s = fam.members[i]->support();
        CHECK(s.a >= dom.ring(j).front().a);
        CHECK(s.b <= dom.ring(j).front().b * (1 + 1e-15));
        if (i > 0) CHECK(!s.overlaps(fam.members[i - 1]->support()));
        CHECK(plain_norm(*fam.members[i], v, 2.0, s) == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }
  CHECK(code_of([&] { build_bump_family(p, dom, dom.t_max + 1, 0); }) == ErrorCode::size_limit);
  CHECK(code_of([&] { build_bump_family(p, dom, 0, 25); }) == ErrorCode::size_limit);
}

TEST_CASE("bump norms scale with the ring and depth indices") {
  const DomainSpec dom{DomainSpec::Geometry::interval_singular_origin, 10};
  for (int r : {1, 2}) {
    for (auto sp : {SpaceParams{2.0, 2.0, 2.0}, SpaceParams{4.0, 3.0, 2.0}}) {
      const SobolevProblem p = hset(r, sp.p0, sp.p1, sp.q);
      const auto& w = std::get<PowerHsetWeights>(p.weights);
      const double iq = 1.0 / sp.q, ip0 = 1.0 / sp.p0, ip1 = 1.0 / sp.p1;
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
      const WindowPolicy all{};  // standard tail window: the coarsest level is pre-asymptotic
      INFO("r=" << r << " p0=" << sp.p0 << " p1=" << sp.p1);
      auto near = [](double got, double want) {
        return std::abs(got - want) <= 0.01 * std::max(std::abs(want), 1.0);
      };
      CHECK(near(fit_rate(sj, all).slope, sob_j));
      CHECK(near(fit_rate(sm, all).slope, sob_m));
      CHECK(near(fit_rate(wj, all).slope, p0_j));
      CHECK(near(fit_rate(wm, all).slope, p0_m));
    }
  }
}

TEST_CASE("disjoint supports: q-th powers add") {
  const SobolevProblem p = hset(2, 2.0, 2.0, 3.0);
  const DomainSpec dom;
  const QuadratureSpec quad;
  const BumpFamily fam = build_bump_family(p, dom, 2, 3);
  gen::Rng g(8);
  std::vector<FunctionPtr> terms(fam.members.begin(), fam.members.end());
  std::vector<double> c;
  double want = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    c.push_back(g.uniform(-2.0, 2.0));
    want += std::pow(std::abs(c.back()), 3.0);
  }
  const SumFunction sum(terms, c);
  const double got = std::pow(weighted_norm(sum, weight_model(p).v, 3.0, dom, quad), 3.0);
  CHECK(got == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("normalized bumps lie in M") {
  for (const SobolevProblem& p : {hset(1, 2.0, 2.0, 2.0), hset(2, 4.0, 3.0, 2.5), rd_example()}) {
    const DomainSpec dom = default_domain(p, 10);
    const QuadratureSpec quad;
    for (int j : {0, 3, 7})
      for (int m : {0, 4}) {
        const FunctionPtr f = normalized_bump(p, dom, j, m, (std::int64_t{1} << m) - 1);
        const MembershipNorms n = check_membership(*f, p, dom, quad);
        CHECK(n.inside(1e-12));
        CHECK(std::max(n.sobolev_norm, n.weighted_p0_norm) == doctest::Approx(1.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("matched scales") {
  AbstractParams a;
  a.s_star = 1.0;
  a.mu_star = 2.0;
  a.alpha_star = 1.0;
  const SpaceParams s{2.0, 2.0, 2.0};
  for (double t : {0.0, 1.0, 2.0, 5.5}) CHECK(matched_scales_lower(a, s, t).m_t == doctest::Approx(3.0 * t));
  const MatchedScales z = matched_scales_lower(a, s, 0.0);
  CHECK(z.m_t == 0.0);
  CHECK(z.m_tilde_t == 0.0);

  gen::Rng g(44);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SpaceParams sp = gen::space(g);
    const AbstractParams ap = gen::abstract(g, sp);
    const double t = g.uniform(0.0, 10.0), k = ap.k_star;
    const double ip0 = gen::inv(sp.p0), ip1 = gen::inv(sp.p1), iq = 1.0 / sp.q;
    const MatchedScales ms = matched_scales_lower(ap, sp, t);
    // both radii of the coefficient body at the l_1 and l_inf vertices
    const double l1 = -ap.alpha_star * k * t + ms.m_t * (ip0 - iq) -
                      (ap.mu_star * k * t - ms.m_t * (ap.s_star + iq - ip1));
    const double linf = -(ap.alpha_star + ap.gamma_star * ip0 - ap.gamma_star * iq) * k * t -
                        ((ap.mu_star + ap.gamma_star * iq - ap.gamma_star * ip1) * k * t -
                         ap.s_star * ms.m_tilde_t);
    worst = std::max({worst, std::abs(l1), std::abs(linf)});
  }
  CHECK(worst <= 1e-10);

  a.s_star = 0.5;
  CHECK(code_of([&] { matched_scales_lower(a, {2.0, 1.0, 2.0}, 1.0); }) ==
        ErrorCode::degenerate);  // s* + 1/p0 - 1/p1 = 0
}

TEST_CASE("lower bound curve: whole-line example") {
  const std::vector<std::int64_t> budgets{16, 32, 64, 128, 256, 512, 1024};
  const LowerBoundCurve c = lower_bound_curve(rd_example(), budgets);
  REQUIRE(c.rows.size() == budgets.size());
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : c.rows) {
    CHECK(!row.b97);
    CHECK(!row.b98);
    CHECK(row.max >= row.b94);
    CHECK(row.max >= row.b95);
    CHECK(row.max >= row.b96);
    pts.push_back({static_cast<double>(row.n), row.max});
  }
  CHECK(fit_rate(pts).slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
  for (std::size_t i = 1; i < c.rows.size(); ++i)
    CHECK(c.rows[i].b95 / c.rows[i - 1].b95 ==
          doctest::Approx(std::exp2(-c.exponents.theta_tilde)).epsilon(1e-12));
}

TEST_CASE("lower bound curve: q > 2 components and monotonicity") {
  SobolevProblem p = hset(1, 4.0, 1.5, 3.0);
  p.weights = PowerHsetWeights{0.0, 1.5, 1.0, 0.0};
  REQUIRE(check_hypotheses(p).overall);
  const LowerBoundCurve c = lower_bound_curve(p, {8, 16, 32, 64, 128});
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    const auto& row = c.rows[i];
    REQUIRE(row.b97);
    REQUIRE(row.b98);
    CHECK(row.max >= *row.b97);
    CHECK(row.max >= *row.b98);
    if (i > 0) {
      const auto& prev = c.rows[i - 1];
      CHECK(row.b94 <= prev.b94);
      CHECK(row.b95 <= prev.b95);
      CHECK(row.b96 <= prev.b96);
      CHECK(*row.b97 <= *prev.b97);
      CHECK(*row.b98 <= *prev.b98);
    }
  }

  SobolevProblem bad = rd_example();
  bad.weights = PowerRdWeights{-3.0, 1.0, 0.0};
  CHECK(code_of([&] { lower_bound_curve(bad, {16, 32}); }) == ErrorCode::validation);
}

TEST_CASE("lower curve slope matches the predicted exponent (random problems)") {
  gen::Rng g(61);
  int used = 0;
  for (int i = 0; i < 3000 && used < 200; ++i) {
    const SobolevProblem p = gen::problem(g, ProblemKind::power_rd);
    const Prediction pr = predicted_width_exponent(p);
    if (!pr.exponent) continue;
    // a component whose exponent sits close to the winner bends the curve at desk budgets
    if (pr.profile.j0() > 1) {
      double gap = kInf;
      for (int j = 0; j < pr.profile.j0(); ++j)
        if (j + 1 != *pr.profile.j_star) gap = std::min(gap, pr.profile.thetas[j] - *pr.exponent);
      if (gap < 0.05) continue;
    }
    ++used;
    std::vector<std::int64_t> budgets;
    for (int k = 10; k <= 30; ++k) budgets.push_back(std::int64_t{1} << k);
    const LowerBoundCurve c = lower_bound_curve(p, budgets);
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : c.rows) pts.push_back({static_cast<double>(row.n), row.max});
    INFO("case " << pr.profile.case_id);
    CHECK(fit_rate(pts).slope == doctest::Approx(-*pr.exponent).epsilon(0.05));
  }
  CHECK(used > 50);
}
