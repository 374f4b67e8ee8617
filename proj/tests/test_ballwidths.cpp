#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "generators.hpp"
#include "widthlab/ballwidths.hpp"
#include "widthlab/errors.hpp"

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

double lp_norm(const Eigen::VectorXd& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

}  // namespace

TEST_CASE("exact widths of balls") {
  const WidthEstimate a = exact_width(4, 1, kInf, 1.0);
  CHECK(a.value == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(a.kind == EstimateKind::exact);
  CHECK(exact_width(5, 5, 3.0, 2.0).value == 0.0);
  CHECK(exact_width(5, 5, 2.0, 2.0).value == 0.0);
  CHECK(exact_width(5, 2, 2.0, 2.0).value == 1.0);
  CHECK(exact_width(3, 1, kInf, 1.0).value == doctest::Approx(2.0));
  CHECK(code_of([] { exact_width(4, 1, 2.0, 3.0); }) == ErrorCode::domain);
  CHECK(code_of([] { exact_width(4, 5, 2.0, 1.0); }) == ErrorCode::validation);
}

TEST_CASE("exact widths are monotone in n") {
  for (double p : {3.0, kInf}) {
    double prev = kInf;
    for (int n = 0; n < 10; ++n) {
      const double v = exact_width(10, n, p, 2.0).value;
      CHECK(v < prev);
      prev = v;
    }
  }
  for (int n = 0; n < 10; ++n) CHECK(exact_width(10, n, 2.0, 2.0).value == 1.0);
}

TEST_CASE("Gluskin orders") {
  const WidthEstimate g = gluskin_order(256, 64, 1.0, 4.0);
  CHECK(g.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.kind == EstimateKind::order);
  CHECK(gluskin_order(100, 50, 1.0, 2.0).value == 1.0);
  CHECK(gluskin_order(256, 16, 1.0, 4.0).value == 1.0);
  // lambda_pq < 1 once p exceeds 2: (1/3 - 1/4)/(1/2 - 1/4) = 1/3
  CHECK(gluskin_order(256, 64, 3.0, 4.0).value == doctest::Approx(std::pow(0.5, 1.0 / 3.0)));
  CHECK(code_of([] { gluskin_order(10, 2, 3.0, 2.5); }) == ErrorCode::domain);
}

TEST_CASE("interpolation ball") {
  IntersectionSpec s{8, {8, 1.0, 1.0}, {8, kInf, 1.0}};
  const InterpolatedBall b = interpolation_ball(s, 2.0);
  CHECK(b.lambda == doctest::Approx(0.5));
  CHECK(b.ball.radius == doctest::Approx(1.0));
  CHECK(b.ball.p == 2.0);
  s.ball0.radius = 4.0;
  CHECK(interpolation_ball(s, 2.0).ball.radius == doctest::Approx(2.0));
  CHECK(code_of([&] { interpolation_ball(s, 1.0); }) == ErrorCode::domain);
  CHECK(code_of([&] { interpolation_ball(s, 0.5); }) == ErrorCode::validation);
}

TEST_CASE("interpolation ball contains the intersection (sampled)") {
  gen::Rng g(99);
  long violations = 0;
  for (int cfg = 0; cfg < 20; ++cfg) {
    const int N = g.integer(1, 64);
    const double p0 = g.coin(0.2) ? kInf : g.uniform(1.0, 8.0);
    double p1 = g.coin(0.2) ? kInf : g.uniform(1.0, 8.0);
    if (std::abs(1.0 / p0 - gen::inv(p1)) < 0.05) p1 = p0 < 4.0 ? 10.0 : 1.2;
    const double k0 = std::exp(g.uniform(-3, 3)), k1 = std::exp(g.uniform(-3, 3));
    const double lam = g.uniform(0.05, 0.95);
    const double q_tilde = 1.0 / ((1.0 - lam) * gen::inv(p1) + lam * gen::inv(p0));
    const IntersectionSpec spec{N, {N, p0, k0}, {N, p1, k1}};
    const InterpolatedBall ib = interpolation_ball(spec, q_tilde);
    CHECK(ib.lambda == doctest::Approx(lam));
    for (int i = 0; i < 2000; ++i) {
      Eigen::VectorXd x(N);
      const int support = g.integer(1, N);
      x.setZero();
      for (int k = 0; k < support; ++k) x(k) = g.coin(0.5) ? g.normal() : (g.coin(0.5) ? 1.0 : -1.0);
      const double scale = std::max(lp_norm(x, p0) / k0, lp_norm(x, p1) / k1);
      if (!(scale > 0.0)) continue;
      x /= scale;
      if (lp_norm(x, q_tilde) > ib.ball.radius * (1.0 + 1e-9)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("W_{t,m} bodies") {
  AbstractParams a;
  const SpaceParams s{2.0, 2.0, 2.0};
  const IntersectionSpec w0 = wtm_body(a, s, 0, 0);
  CHECK(w0.N == 1);
  CHECK(w0.ball0.radius == 1.0);
  CHECK(w0.ball1.radius == 1.0);

  a.mu_star = 2.0;
  a.alpha_star = 1.0;
  const IntersectionSpec w1 = wtm_body(a, s, 1, 0);
  CHECK(w1.ball1.radius == doctest::Approx(4.0));
  CHECK(w1.ball0.radius == doctest::Approx(0.5));
  CHECK(w1.ball1.p == 2.0);
  CHECK(w1.ball0.p == 2.0);
  for (int m = 0; m < 6; ++m) CHECK(wtm_body(a, s, 3, m + 1).N == 2 * wtm_body(a, s, 3, m).N);

  a.gamma_star = 0.5;
  a.c = 1.5;
  CHECK(wtm_body(a, s, 2, 1).N == std::llround(1.5 * 2.0 * 2.0));  // c 2^{gamma t} 2^m
}

TEST_CASE("W_{t,m} radii balance at the balance depth") {
  gen::Rng g(21);
  for (int i = 0; i < 1000; ++i) {
    const SpaceParams s = gen::space(g);
    const AbstractParams a = gen::abstract(g, s);
    const double t = g.uniform(0.0, 10.0);
    const double m = balance_depth(a, s, t);
    const WtmRadii r = wtm_radii(a, s, t, m);
    CHECK(std::abs(std::log2(r.at_p1) - std::log2(r.at_p0)) <= 1e-10);
  }
}

TEST_CASE("intersection width upper bounds") {
  const IntersectionSpec spec{8, {8, 2.0, 0.5}, {8, 2.0, 4.0}};
  CHECK(intersection_width_upper(spec, 0, 2.0).value == doctest::Approx(0.5));
  CHECK(intersection_width_upper(spec, 8, 2.0).value == 0.0);
  CHECK(intersection_width_upper(spec, 9, 2.0).value == 0.0);
  CHECK(intersection_width_upper(spec, 3, 2.0).kind == EstimateKind::upper);

  // l_inf ball of radius 1 and l_1 ball of radius 2 in R^6, target l_1:
  // the l_1 relaxation alone gives 2, the l_inf one (6 - n)
  const IntersectionSpec mixed{6, {6, kInf, 1.0}, {6, 1.0, 2.0}};
  const WidthEstimate e = intersection_width_upper(mixed, 1, 1.0);
  CHECK(e.value <= 2.0 + 1e-12);
  CHECK(e.value <= exact_width(6, 1, kInf, 1.0).value + 1e-12);
}

TEST_CASE("numeric width search") {
  SearchConfig cfg;
  const WidthEstimate e = numeric_width_upper(BallSpec{2, 2.0, 1.0}, 1, 2.0, cfg);
  CHECK(e.value == doctest::Approx(1.0).epsilon(cfg.tolerance));
  CHECK(e.value >= 1.0 - 1e-9);
  for (double p : {1.0, 2.0, 3.0})
    CHECK(numeric_width_upper(BallSpec{5, p, 1.0}, 0, 3.0, cfg).value ==
          doctest::Approx(1.0).epsilon(1e-9));
  CHECK(numeric_width_upper(BallSpec{3, kInf, 1.0}, 1, 1.0, cfg).value ==
        doctest::Approx(2.0).epsilon(0.02));
  CHECK(code_of([&] { numeric_width_upper(BallSpec{65, 2.0, 1.0}, 1, 2.0, cfg); }) ==
        ErrorCode::size_limit);
}

TEST_CASE("numeric width: monotone in n and scale equivariant") {
  SearchConfig cfg;
  cfg.restarts = 4;
  cfg.refine_steps = 20;
  const Body bodies[] = {BallSpec{6, kInf, 1.0}, BallSpec{5, 1.5, 1.0},
                         IntersectionSpec{6, {6, 1.0, 2.0}, {6, kInf, 1.0}}};
  for (const Body& b : bodies) {
    double prev = kInf;
    for (int n = 0; n < 5; ++n) {
      const double v = numeric_width_upper(b, n, 2.0, cfg).value;
      CHECK(v <= prev);
      prev = v;
    }
  }
  const double one = numeric_width_upper(BallSpec{5, 3.0, 1.0}, 2, 1.5, cfg).value;
  const double seven = numeric_width_upper(BallSpec{5, 3.0, 7.0}, 2, 1.5, cfg).value;
  CHECK(seven == doctest::Approx(7.0 * one).epsilon(1e-14));
  const double i1 =
      numeric_width_upper(IntersectionSpec{4, {4, 1.0, 1.0}, {4, kInf, 0.5}}, 1, 2.0, cfg).value;
  const double i3 =
      numeric_width_upper(IntersectionSpec{4, {4, 1.0, 3.0}, {4, kInf, 1.5}}, 1, 2.0, cfg).value;
  CHECK(i3 == doctest::Approx(3.0 * i1).epsilon(1e-14));
}

TEST_CASE("numeric width search is deterministic for a seed") {
  SearchConfig cfg;
  cfg.restarts = 3;
  const Body b = BallSpec{6, 1.5, 1.0};
  CHECK(numeric_width_upper(b, 2, 3.0, cfg).value == numeric_width_upper(b, 2, 3.0, cfg).value);
}

TEST_CASE("brute force oracle") {
  const WidthEstimate a = brute_force_width_oracle(BallSpec{2, 2.0, 1.0}, 1, 2.0);
  CHECK(a.value == doctest::Approx(1.0).epsilon(0.02));
  REQUIRE(a.tolerance);
  CHECK(*a.tolerance <= 0.02 * a.value);
  CHECK(brute_force_width_oracle(BallSpec{4, kInf, 1.0}, 1, 1.0).value ==
        doctest::Approx(3.0).epsilon(0.02));
  CHECK(brute_force_width_oracle(BallSpec{4, 2.0, 1.0}, 3, 2.0).value ==
        doctest::Approx(1.0).epsilon(0.02));
  CHECK(brute_force_width_oracle(BallSpec{3, 2.0, 1.0}, 3, 2.0).value == 0.0);
  CHECK(code_of([] { brute_force_width_oracle(BallSpec{6, 2.0, 1.0}, 1, 2.0); }) ==
        ErrorCode::size_limit);
}
