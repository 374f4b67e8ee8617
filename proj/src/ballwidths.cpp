#include "widthlab/ballwidths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"
#include "widthlab/lp_geometry.hpp"

namespace widthlab {

using Vec = lp::Vec<double>;
using Mat = lp::Mat<double>;

void BallSpec::validate() const {
  if (N < 1) fail(ErrorCode::validation, "ball dimension must be >= 1");
  if (std::isnan(p) || p < 1.0) fail(ErrorCode::validation, "ball exponent must lie in [1, inf]");
  if (!(radius > 0.0) || !std::isfinite(radius))
    fail(ErrorCode::validation, "ball radius must be positive and finite");
}

void IntersectionSpec::validate() const {
  ball0.validate();
  ball1.validate();
  if (ball0.N != N || ball1.N != N)
    fail(ErrorCode::validation, "intersection balls must share the dimension N");
}

std::int64_t body_dimension(const Body& body) {
  return std::visit([](const auto& b) { return b.N; }, body);
}

const char* to_string(EstimateKind kind) noexcept {
  switch (kind) {
    case EstimateKind::exact: return "exact";
    case EstimateKind::upper: return "upper";
    case EstimateKind::lower: return "lower";
    case EstimateKind::order: return "order";
  }
  return "unknown";
}

void SearchConfig::validate() const {
  if (restarts < 1) fail(ErrorCode::validation, "restarts must be >= 1");
  if (samples_per_eval < 1) fail(ErrorCode::validation, "samples_per_eval must be >= 1");
  if (refine_steps < 0) fail(ErrorCode::validation, "refine_steps must be >= 0");
  if (!(tolerance > 0.0)) fail(ErrorCode::validation, "tolerance must be positive");
  if (max_dimension < 1) fail(ErrorCode::validation, "max_dimension must be >= 1");
}

namespace {

void check_width_args(std::int64_t N, std::int64_t n, double p, double q) {
  if (N < 1) fail(ErrorCode::validation, "N must be >= 1");
  if (n < 0 || n > N) fail(ErrorCode::validation, "n must lie in [0, N]");
  if (std::isnan(p) || p < 1.0) fail(ErrorCode::validation, "p must lie in [1, inf]");
  if (std::isnan(q) || q < 1.0 || std::isinf(q))
    fail(ErrorCode::validation, "q must lie in [1, inf)");
}

WidthEstimate make_estimate(double value, EstimateKind kind, std::string method, std::int64_t n,
                            double q) {
  WidthEstimate e;
  e.value = value;
  e.kind = kind;
  e.method = std::move(method);
  e.n = n;
  e.target_q = q;
  return e;
}

}  // namespace

WidthEstimate exact_width(std::int64_t N, std::int64_t n, double p, double q) {
  check_width_args(N, n, p, q);
  if (q > p) fail(ErrorCode::domain, "exact width formula needs q <= p");
  const double value =
      n == N ? 0.0 : std::pow(static_cast<double>(N - n), 1.0 / q - recip(p));
  return make_estimate(value, EstimateKind::exact, "exact-formula", n, q);
}

WidthEstimate gluskin_order(std::int64_t N, std::int64_t n, double p, double q) {
  check_width_args(N, n, p, q);
  if (p < q && q > 2.0) {
    const double lambda = std::min(1.0, (recip(p) - 1.0 / q) / (0.5 - 1.0 / q));
    const double base =
        n == 0 ? 1.0
               : std::min(1.0, std::pow(static_cast<double>(n), -0.5) *
                                   std::pow(static_cast<double>(N), 1.0 / q));
    return make_estimate(std::pow(base, lambda), EstimateKind::order, "gluskin", n, q);
  }
  if (p <= q && q <= 2.0) return make_estimate(1.0, EstimateKind::order, "gluskin", n, q);
  fail(ErrorCode::domain, "Gluskin order needs p < q with q > 2, or p <= q <= 2");
}

InterpolatedBall interpolation_ball(const IntersectionSpec& spec, double q_tilde) {
  spec.validate();
  if (std::isnan(q_tilde) || q_tilde < 1.0)
    fail(ErrorCode::validation, "interpolation exponent must lie in [1, inf]");
  const double i0 = recip(spec.ball0.p), i1 = recip(spec.ball1.p), it = recip(q_tilde);
  if (i0 == i1) fail(ErrorCode::domain, "interpolation needs p0 != p1");
  const double lambda = (it - i1) / (i0 - i1);
  if (!(lambda > 0.0 && lambda < 1.0))
    fail(ErrorCode::domain, "1/q~ must lie strictly between 1/p0 and 1/p1");
  InterpolatedBall out;
  out.lambda = lambda;
  out.ball.N = spec.N;
  out.ball.p = q_tilde;
  out.ball.radius = std::pow(spec.ball0.radius, lambda) * std::pow(spec.ball1.radius, 1.0 - lambda);
  return out;
}

WtmRadii wtm_radii(const AbstractParams& a, const SpaceParams& s, double t, double m) {
  const double ip0 = recip(s.p0), ip1 = recip(s.p1), iq = recip(s.q);
  const double kt = a.k_star * t;
  WtmRadii r;
  r.at_p1 = std::exp2(a.mu_star * kt - m * (a.s_star + iq - ip1));
  r.at_p0 = std::exp2(-a.alpha_star * kt + m * (ip0 - iq));
  return r;
}

double balance_depth(const AbstractParams& a, const SpaceParams& s, double t) {
  const double slope = a.s_star + recip(s.p0) - recip(s.p1);
  if (std::abs(slope) < 1e-14)
    fail(ErrorCode::degenerate, "balance depth undefined: s* + 1/p0 - 1/p1 = 0");
  return (a.mu_star + a.alpha_star) * a.k_star * t / slope;
}

IntersectionSpec wtm_body(const AbstractParams& a, const SpaceParams& s, int t, int m) {
  s.validate();
  if (t < a.t0) fail(ErrorCode::validation, "t must be >= t0");
  if (m < 0) fail(ErrorCode::validation, "m must be >= 0");
  const double budget = a.c * std::exp2(a.gamma_star * a.k_star * t + m);
  if (!(budget < 9.0e15)) fail(ErrorCode::size_limit, "W_{t,m} dimension overflows");
  const auto N = static_cast<std::int64_t>(std::floor(budget + 0.5));
  const WtmRadii r = wtm_radii(a, s, t, m);
  IntersectionSpec spec;
  spec.N = std::max<std::int64_t>(N, 1);
  spec.ball0 = {spec.N, s.p0, r.at_p0};
  spec.ball1 = {spec.N, s.p1, r.at_p1};
  return spec;
}

namespace {

/// Width bound for a single scaled ball by the best closed-form route.
std::optional<WidthEstimate> single_ball_route(const BallSpec& b, std::int64_t n, double q,
                                               const char* label) {
  std::optional<WidthEstimate> best;
  auto consider = [&](double value, EstimateKind kind, const std::string& method) {
    if (!best || value < best->value) best = make_estimate(value, kind, method, n, q);
  };
  if (q <= b.p) {
    consider(b.radius * exact_width(b.N, n, b.p, q).value, EstimateKind::upper,
             std::string(label) + ":exact-formula");
  } else {
    consider(b.radius, EstimateKind::upper, std::string(label) + ":norm-inclusion");
    consider(b.radius * gluskin_order(b.N, n, b.p, q).value, EstimateKind::order,
             std::string(label) + ":gluskin");
  }
  return best;
}

}  // namespace

WidthEstimate intersection_width_upper(const IntersectionSpec& spec, std::int64_t n, double q) {
  spec.validate();
  if (n < 0) fail(ErrorCode::validation, "n must be >= 0");
  if (std::isnan(q) || q < 1.0 || std::isinf(q))
    fail(ErrorCode::validation, "q must lie in [1, inf)");
  if (n >= spec.N) return make_estimate(0.0, EstimateKind::exact, "full-subspace", n, q);

  std::optional<WidthEstimate> best;
  auto consider = [&](const std::optional<WidthEstimate>& e) {
    if (e && (!best || e->value < best->value)) best = e;
  };
  consider(single_ball_route(spec.ball0, n, q, "ball0"));
  consider(single_ball_route(spec.ball1, n, q, "ball1"));

  const double i0 = recip(spec.ball0.p), i1 = recip(spec.ball1.p);
  auto strictly_between = [&](double x) {
    return std::min(i0, i1) < x && x < std::max(i0, i1);
  };
  if (strictly_between(1.0 / q)) {
    const auto ib = interpolation_ball(spec, q);
    consider(make_estimate(ib.ball.radius, EstimateKind::upper, "interpolate-q", n, q));
  }
  if (q > 2.0 && strictly_between(0.5)) {
    const auto ib = interpolation_ball(spec, 2.0);
    consider(make_estimate(ib.ball.radius * gluskin_order(spec.N, n, 2.0, q).value,
                           EstimateKind::order, "interpolate-2:gluskin", n, q));
  }
  if (!best) fail(ErrorCode::unsupported_regime, "no width route applies");
  return *best;
}

// ---------------------------------------------------------------------------
// Search-based widths.

namespace {

struct NormalizedBody {
  int N = 1;
  double p0 = 2.0, k0 = 1.0;
  double p1 = 2.0, k1 = 1.0;
  bool single = true;
  double scale = 1.0;

  double gauge(const Vec& x) const {
    const double g0 = lp::norm(x, p0) / k0;
    return single ? g0 : std::max(g0, lp::norm(x, p1) / k1);
  }
  Vec to_boundary(const Vec& u) const {
    const double g = gauge(u);
    return g > 0.0 ? Vec(u / g) : u;
  }
};

NormalizedBody normalize(const Body& body, int cap) {
  NormalizedBody nb;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        b.validate();
        if (b.N > cap) {
          std::ostringstream os;
          os << "dimension " << b.N << " exceeds the search cap " << cap;
          fail(ErrorCode::size_limit, os.str());
        }
        nb.N = static_cast<int>(b.N);
        if constexpr (std::is_same_v<B, BallSpec>) {
          nb.p0 = nb.p1 = b.p;
          nb.scale = b.radius;
        } else {
          nb.single = false;
          nb.p0 = b.ball0.p;
          nb.p1 = b.ball1.p;
          nb.scale = b.ball1.radius;
          nb.k0 = b.ball0.radius / b.ball1.radius;
        }
      },
      body);
  return nb;
}

struct Plan {
  std::uint64_t seed = 0;
  int restarts = 8;
  int screen_samples = 256;
  int random_samples = 1024;
  int refine_steps = 40;
  long long coordinate_cap = 256;
  int ascent_starts = 8;
  int ascent_steps = 60;
  int exhaustive_sign_dim = 16;
};

std::vector<Vec> extreme_points(const NormalizedBody& b, const Plan& plan) {
  const int N = b.N;
  auto rng = substream(plan.seed, {0x5a, 1});
  std::normal_distribution<double> gauss;
  std::bernoulli_distribution coin;
  std::vector<Vec> pts;

  for (int i = 0; i < N; ++i) pts.push_back(b.to_boundary(Vec::Unit(N, i)));
  const bool l1_ball = b.single && b.p0 == 1.0;
  if (l1_ball) return pts;

  const bool exhaustive = N - 1 <= plan.exhaustive_sign_dim;
  if (exhaustive) {
    const std::uint64_t count = std::uint64_t{1} << (N - 1);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      Vec v(N);
      v[0] = 1.0;
      for (int i = 1; i < N; ++i) v[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      pts.push_back(b.to_boundary(v));
    }
  }
  const bool linf_ball = b.single && std::isinf(b.p0);
  if (linf_ball) {
    if (!exhaustive)
      for (int s = 0; s < plan.random_samples; ++s) {
        Vec v(N);
        for (int i = 0; i < N; ++i) v[i] = coin(rng) ? 1.0 : -1.0;
        pts.push_back(v);
      }
    return pts;
  }
  // Flat vectors on random supports of every size, then generic directions.
  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 2; k <= N; ++k)
    for (int rep = 0; rep < 4; ++rep) {
      std::shuffle(perm.begin(), perm.end(), rng);
      Vec v = Vec::Zero(N);
      for (int j = 0; j < k; ++j) v[perm[j]] = coin(rng) ? 1.0 : -1.0;
      pts.push_back(b.to_boundary(v));
    }
  for (int s = 0; s < plan.random_samples; ++s) {
    Vec v(N);
    for (int i = 0; i < N; ++i) v[i] = gauss(rng);
    if (!b.single && s % 2 == 1) {
      // sparsify half of the draws so corners of the intersection are hit
      std::bernoulli_distribution keep(0.5);
      for (int i = 0; i < N; ++i)
        if (!keep(rng)) v[i] = 0.0;
      if (v.cwiseAbs().maxCoeff() == 0.0) v[static_cast<int>(rng() % N)] = 1.0;
    }
    pts.push_back(b.to_boundary(v));
  }
  return pts;
}

double sup_distance(const Mat& S, const Mat& V, double q) {
  if (V.cols() == 0 || q == 2.0) {
    const Mat R = V.cols() == 0 ? S : Mat(S - V * (V.transpose() * S));
    double best = 0.0;
    for (Eigen::Index j = 0; j < R.cols(); ++j) best = std::max(best, lp::norm(R.col(j), q));
    return best;
  }
  double best = 0.0;
  for (Eigen::Index j = 0; j < S.cols(); ++j)
    best = std::max(best, lp::distance_to_subspace<double>(S.col(j), V, q).value);
  return best;
}

Mat orthonormalize(const Mat& A) {
  if (A.cols() == 0) return A;
  Eigen::HouseholderQR<Mat> qr(A);
  return qr.householderQ() * Mat::Identity(A.rows(), A.cols());
}

Mat random_frame(int N, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat A(N, n);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = gauss(rng);
  return orthonormalize(A);
}

/// Conditional-gradient ascent of the (convex) distance over the body.
/// Never returns less than the distance of the starting point.
double ascend(const NormalizedBody& b, const Mat& V, double q, Vec x, int steps) {
  double f = lp::distance_to_subspace<double>(x, V, q).value;
  for (int it = 0; it < steps; ++it) {
    const auto d = lp::distance_to_subspace<double>(x, V, q);
    const Vec g = lp::norm_gradient(d.residual, q);
    if (g.cwiseAbs().maxCoeff() == 0.0) break;
    std::vector<Vec> cand;
    cand.push_back(b.to_boundary(lp::linear_maximizer(g, b.p0, b.k0)));
    if (!b.single) cand.push_back(b.to_boundary(lp::linear_maximizer(g, b.p1, b.k1)));
    const double gn = g.norm(), xn = x.norm();
    for (double eta : {0.5, 0.1, 0.02})
      cand.push_back(b.to_boundary(x + (eta * xn / gn) * g));
    double best = f;
    Vec best_x = x;
    for (const auto& y : cand) {
      const double fy = lp::distance_to_subspace<double>(y, V, q).value;
      if (fy > best) {
        best = fy;
        best_x = y;
      }
    }
    if (best <= f * (1.0 + 1e-13)) break;
    f = best;
    x = best_x;
  }
  return f;
}

struct Certified {
  double value = 0.0;
  double sampled = 0.0;
};

Certified certify(const NormalizedBody& b, const Mat& V, double q, const std::vector<Vec>& pts,
                  const Plan& plan) {
  std::vector<std::pair<double, std::size_t>> scored(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j)
    scored[j] = {lp::distance_to_subspace<double>(pts[j], V, q).value, j};
  const std::size_t k = std::min<std::size_t>(plan.ascent_starts, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + k, scored.end(),
                    [](const auto& a, const auto& c) {
                      return a.first > c.first || (a.first == c.first && a.second < c.second);
                    });
  Certified out;
  out.sampled = scored.empty() ? 0.0 : scored.front().first;
  out.value = out.sampled;
  const bool vertices_exact = b.single && (b.p0 == 1.0 || (std::isinf(b.p0) &&
                                                           b.N - 1 <= plan.exhaustive_sign_dim));
  if (vertices_exact) return out;
  for (std::size_t i = 0; i < k; ++i)
    out.value = std::max(out.value, ascend(b, V, q, pts[scored[i].second], plan.ascent_steps));
  return out;
}

void for_each_subset(int N, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int j = k - 1;
    while (j >= 0 && idx[j] == N - k + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (int i = j + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

struct Candidate {
  Mat V;
  double score = 0.0;
};

struct RefineResult {
  Mat V;
  double score = 0.0;
  double last_gain = 0.0;
};

RefineResult refine(const Candidate& start, const Mat& screen, double q, int steps,
                    std::mt19937_64 rng) {
  RefineResult r{start.V, start.score, 0.0};
  std::normal_distribution<double> gauss;
  double delta = 0.3;
  for (int s = 0; s < steps && r.score > 0.0; ++s) {
    Mat G(r.V.rows(), r.V.cols());
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = gauss(rng);
    const Mat W = orthonormalize(r.V + delta * G);
    const double sc = sup_distance(screen, W, q);
    if (sc < r.score) {
      r.last_gain = (r.score - sc) / r.score;
      r.V = W;
      r.score = sc;
      delta = std::min(1.0, delta * 1.2);
    } else {
      delta *= 0.7;
      if (delta < 1e-6) delta = 0.3;
    }
  }
  return r;
}

struct SearchOutcome {
  std::vector<double> values;  // index k: bound on d_k
  double tolerance = 0.0;
};

SearchOutcome search_levels(const NormalizedBody& b, int n_max, double q, const Plan& plan) {
  const int N = b.N;
  const std::vector<Vec> pts = extreme_points(b, plan);

  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  {
    auto rng = substream(plan.seed, {0x5a, 2});
    std::shuffle(order.begin() + std::min<std::size_t>(N, order.size()), order.end(), rng);
  }
  const std::size_t m_screen = std::min<std::size_t>(order.size(), plan.screen_samples + N);
  Mat screen(N, static_cast<Eigen::Index>(m_screen));
  for (std::size_t j = 0; j < m_screen; ++j) screen.col(static_cast<Eigen::Index>(j)) = pts[order[j]];

  SearchOutcome out;
  Mat prev(N, 0);
  const Certified c0 = certify(b, prev, q, pts, plan);
  out.values.push_back(c0.value);
  out.tolerance = c0.value - c0.sampled;

  for (int k = 1; k <= n_max; ++k) {
    std::vector<Candidate> cands;
    auto add = [&](Mat V) {
      const double sc = sup_distance(screen, V, q);
      cands.push_back({std::move(V), sc});
    };
    if (lp::detail::binom(N, k) <= plan.coordinate_cap)
      for_each_subset(N, k, [&](const std::vector<int>& idx) {
        Mat V = Mat::Zero(N, k);
        for (int j = 0; j < k; ++j) V(idx[j], j) = 1.0;
        add(std::move(V));
      });
    for (int i = 0; i < N; ++i) {
      Mat A(N, k);
      A.leftCols(k - 1) = prev;
      A.col(k - 1) = Vec::Unit(N, i);
      const Vec resid = A.col(k - 1) - prev * (prev.transpose() * A.col(k - 1));
      if (resid.norm() < 1e-8) continue;
      add(orthonormalize(A));
    }
    {
      auto rng = substream(plan.seed, {0x5a, 3, static_cast<std::uint64_t>(k)});
      std::normal_distribution<double> gauss;
      for (int r = 0; r < 2; ++r) {
        Mat A(N, k);
        A.leftCols(k - 1) = prev;
        for (int i = 0; i < N; ++i) A(i, k - 1) = gauss(rng);
        add(orthonormalize(A));
      }
      for (int r = 0; r < plan.restarts; ++r) add(random_frame(N, k, rng));
    }
    std::vector<std::size_t> rank(cands.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t c) { return cands[a].score < cands[c].score; });
    const std::size_t keep = std::min<std::size_t>(rank.size(), plan.restarts);
    std::vector<RefineResult> refined(keep);
    parallel_for(keep, [&](std::size_t i) {
      refined[i] = refine(cands[rank[i]], screen, q, plan.refine_steps,
                          substream(plan.seed, {0x5a, 4, static_cast<std::uint64_t>(k), i}));
    });
    std::size_t win = 0;
    for (std::size_t i = 1; i < keep; ++i)
      if (refined[i].score < refined[win].score) win = i;

    const Certified cert = certify(b, refined[win].V, q, pts, plan);
    out.tolerance = std::max(out.tolerance, cert.value - cert.sampled +
                                                refined[win].last_gain * cert.value);
    out.values.push_back(std::min(cert.value, out.values.back()));
    prev = refined[win].V;
  }
  return out;
}

}  // namespace

WidthEstimate numeric_width_upper(const Body& body, std::int64_t n, double q,
                                  const SearchConfig& cfg) {
  cfg.validate();
  if (std::isnan(q) || q < 1.0 || std::isinf(q))
    fail(ErrorCode::validation, "q must lie in [1, inf)");
  const NormalizedBody b = normalize(body, cfg.max_dimension);
  if (n < 0) fail(ErrorCode::validation, "n must be >= 0");
  if (n >= b.N) return make_estimate(0.0, EstimateKind::exact, "full-subspace", n, q);
  Plan plan;
  plan.seed = cfg.seed;
  plan.restarts = cfg.restarts;
  plan.screen_samples = cfg.samples_per_eval;
  plan.random_samples = 4 * cfg.samples_per_eval;
  plan.refine_steps = cfg.refine_steps;
  const auto res = search_levels(b, static_cast<int>(n), q, plan);
  return make_estimate(res.values.back() * b.scale, EstimateKind::upper, "search", n, q);
}

WidthEstimate brute_force_width_oracle(const Body& body, std::int64_t n, double q,
                                       const SearchConfig& cfg) {
  cfg.validate();
  if (std::isnan(q) || q < 1.0 || std::isinf(q))
    fail(ErrorCode::validation, "q must lie in [1, inf)");
  const NormalizedBody b = normalize(body, 5);
  if (n < 0) fail(ErrorCode::validation, "n must be >= 0");
  if (n >= b.N) {
    auto e = make_estimate(0.0, EstimateKind::exact, "oracle", n, q);
    e.tolerance = 0.0;
    return e;
  }
  Plan plan;
  plan.seed = cfg.seed;
  plan.restarts = std::max(cfg.restarts, 48);
  plan.screen_samples = std::max(cfg.samples_per_eval, 1500);
  plan.random_samples = std::max(4 * cfg.samples_per_eval, 6000);
  plan.refine_steps = std::max(cfg.refine_steps, 250);
  plan.coordinate_cap = 1 << 20;
  plan.ascent_starts = 24;
  plan.ascent_steps = 200;
  const auto res = search_levels(b, static_cast<int>(n), q, plan);
  const double value = res.values.back();
  auto e = make_estimate(value * b.scale, EstimateKind::exact, "oracle", n, q);
  e.tolerance = std::max(cfg.tolerance * value, res.tolerance) * b.scale;
  return e;
}

}  // namespace widthlab
