#pragma once

// l_p geometry on dense Eigen vectors: norms, dual directions, linear
// maximization over balls and l_q distance to a subspace spanned by an
// orthonormal frame.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace widthlab::lp {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Derived>
typename Derived::Scalar norm(const Eigen::MatrixBase<Derived>& x, double p) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::pow;
  if (x.size() == 0) return Scalar(0);
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  const Scalar m = x.cwiseAbs().maxCoeff();
  if (m == Scalar(0)) return Scalar(0);
  Scalar acc(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += pow(abs(x[i]) / m, Scalar(p));
  return m * pow(acc, Scalar(1.0 / p));
}

/// Conjugate exponent p' with 1/p + 1/p' = 1.
inline double conjugate(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

/// A vector y with ||y||_p <= radius maximizing <g, y>.
template <class Derived>
Vec<typename Derived::Scalar> linear_maximizer(const Eigen::MatrixBase<Derived>& g, double p,
                                               typename Derived::Scalar radius) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::pow;
  const Eigen::Index n = g.size();
  Vec<Scalar> y = Vec<Scalar>::Zero(n);
  if (n == 0) return y;
  if (std::isinf(p)) {
    for (Eigen::Index i = 0; i < n; ++i) y[i] = g[i] >= Scalar(0) ? radius : -radius;
    return y;
  }
  if (p == 1.0) {
    Eigen::Index k = 0;
    g.cwiseAbs().maxCoeff(&k);
    y[k] = g[k] >= Scalar(0) ? radius : -radius;
    return y;
  }
  const double pc = conjugate(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar a = pow(abs(g[i]), Scalar(pc - 1.0));
    y[i] = g[i] >= Scalar(0) ? a : -a;
  }
  const Scalar ny = norm(y, p);
  if (ny == Scalar(0)) {
    y.setZero();
    y[0] = radius;
    return y;
  }
  return y * (radius / ny);
}

/// Gradient of ||.||_q at r (a dual vector); zero at r == 0.
template <class Derived>
Vec<typename Derived::Scalar> norm_gradient(const Eigen::MatrixBase<Derived>& r, double q) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::pow;
  Vec<Scalar> g(r.size());
  const Scalar nr = norm(r, q);
  if (nr == Scalar(0)) return Vec<Scalar>::Zero(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const Scalar sgn = r[i] > Scalar(0) ? Scalar(1) : (r[i] < Scalar(0) ? Scalar(-1) : Scalar(0));
    g[i] = q == 1.0 ? sgn : sgn * pow(abs(r[i]) / nr, Scalar(q - 1.0));
  }
  return g;
}

template <class Scalar>
struct Distance {
  Scalar value{};
  Vec<Scalar> residual;
};

struct DistanceOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
  long long enumeration_cap = 64;  // q = 1: enumerate basic solutions up to this many
};

namespace detail {

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long b = 1;
  for (int i = 1; i <= k; ++i) {
    b = b * (n - k + i) / i;
    if (b > (1LL << 40)) return b;
  }
  return b;
}

template <class Scalar>
Scalar q_objective(const Vec<Scalar>& r, double q) {
  using std::abs;
  using std::pow;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += pow(abs(r[i]), Scalar(q));
  return acc;
}

/// Safeguarded reweighted least squares for min_c sum |x - V c|^q. Every
/// accepted step decreases the objective, so any stopping point is a valid
/// (upper) distance.
template <class Scalar>
Vec<Scalar> irls(const Vec<Scalar>& x, const Mat<Scalar>& V, double q, const DistanceOptions& o) {
  using std::abs;
  using std::max;
  using std::pow;
  Vec<Scalar> c = V.transpose() * x;
  Vec<Scalar> r = x - V * c;
  Scalar f = q_objective(r, q);
  const Scalar step_scale = q >= 2.0 ? Scalar(1.0 / (q - 1.0)) : Scalar(1);
  for (int it = 0; it < o.max_iterations && f > Scalar(0); ++it) {
    const Scalar rmax = r.cwiseAbs().maxCoeff();
    const Scalar eps = max(rmax * Scalar(1e-9), Scalar(1e-300));
    Vec<Scalar> w(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) w[i] = pow(max(abs(r[i]), eps), Scalar(q - 2.0));
    const Mat<Scalar> A = V.transpose() * w.asDiagonal() * V;
    const Vec<Scalar> b = V.transpose() * w.cwiseProduct(r);
    const Vec<Scalar> dir = A.ldlt().solve(b) * step_scale;
    if (!dir.allFinite()) break;
    Scalar alpha(1);
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, alpha *= Scalar(0.5)) {
      const Vec<Scalar> cn = c + alpha * dir;
      const Vec<Scalar> rn = x - V * cn;
      const Scalar fn = q_objective(rn, q);
      if (fn < f) {
        const Scalar rel = (f - fn) / f;
        c = cn;
        r = rn;
        f = fn;
        accepted = true;
        if (rel < Scalar(o.tolerance)) return c;
        break;
      }
    }
    if (!accepted) break;
  }
  return c;
}

template <class Scalar>
Vec<Scalar> l1_weighted_median(const Vec<Scalar>& x, const Vec<Scalar>& v) {
  using std::abs;
  std::vector<std::pair<Scalar, Scalar>> pts;
  Scalar total(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (v[i] == Scalar(0)) continue;
    pts.emplace_back(x[i] / v[i], abs(v[i]));
    total += abs(v[i]);
  }
  Vec<Scalar> c = Vec<Scalar>::Zero(1);
  if (pts.empty()) return c;
  std::sort(pts.begin(), pts.end());
  Scalar acc(0);
  for (const auto& [ratio, weight] : pts) {
    acc += weight;
    if (acc * Scalar(2) >= total) {
      c[0] = ratio;
      return c;
    }
  }
  c[0] = pts.back().first;
  return c;
}

/// l_1 regression attains its optimum where n residuals vanish; try every
/// nonsingular n-row subsystem.
template <class Scalar>
Vec<Scalar> l1_enumerate(const Vec<Scalar>& x, const Mat<Scalar>& V) {
  using std::abs;
  const int N = static_cast<int>(V.rows()), n = static_cast<int>(V.cols());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Vec<Scalar> best = V.transpose() * x;
  Scalar best_f = (x - V * best).cwiseAbs().sum();
  Mat<Scalar> A(n, n);
  Vec<Scalar> b(n);
  while (true) {
    for (int a = 0; a < n; ++a) {
      A.row(a) = V.row(idx[a]);
      b[a] = x[idx[a]];
    }
    Eigen::FullPivLU<Mat<Scalar>> lu(A);
    if (lu.isInvertible()) {
      const Vec<Scalar> c = lu.solve(b);
      const Scalar f = (x - V * c).cwiseAbs().sum();
      if (f < best_f) {
        best_f = f;
        best = c;
      }
    }
    int k = n - 1;
    while (k >= 0 && idx[k] == N - n + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace detail

/// l_q distance from x to span(V). V must have orthonormal columns.
template <class Scalar>
Distance<Scalar> distance_to_subspace(const Vec<Scalar>& x, const Mat<Scalar>& V, double q,
                                      const DistanceOptions& o = {}) {
  Distance<Scalar> d;
  const int N = static_cast<int>(x.size()), n = static_cast<int>(V.cols());
  if (n == 0) {
    d.residual = x;
  } else if (q == 2.0) {
    d.residual = x - V * (V.transpose() * x);
  } else if (q == 1.0 && n == 1) {
    d.residual = x - V * detail::l1_weighted_median<Scalar>(x, V.col(0));
  } else if (q == 1.0 && detail::binom(N, n) <= o.enumeration_cap) {
    d.residual = x - V * detail::l1_enumerate(x, V);
  } else {
    d.residual = x - V * detail::irls(x, V, q, o);
  }
  d.value = norm(d.residual, q);
  return d;
}

}  // namespace widthlab::lp
