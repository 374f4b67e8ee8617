#include "widthlab/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "widthlab/errors.hpp"

namespace widthlab {

void QuadratureSpec::validate(int r) const {
  if (nodes < r + 2) fail(ErrorCode::validation, "quadrature needs at least r + 2 nodes");
  if (nodes > 512) fail(ErrorCode::size_limit, "quadrature node count above 512");
  if (grading_depth < 1 || grading_depth > 1000)
    fail(ErrorCode::validation, "grading depth must lie in [1, 1000]");
  if (endpoint_levels < 0 || endpoint_levels > 60)
    fail(ErrorCode::validation, "endpoint levels must lie in [0, 60]");
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) fail(ErrorCode::validation, "Gauss rule needs n >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) fail(ErrorCode::numeric, "Gauss rule eigen-solve failed");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()[k];
    const double v = es.eigenvectors()(0, k);
    rule.weights[k] = 2.0 * v * v;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double gauss_panel(const std::function<double(double)>& h, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += g.weights[k] * h(mid + half * g.nodes[k]);
  return acc * half;
}

namespace {

/// Breakpoints for 0 <= a < b; the first panel is singular iff a == 0.
std::vector<double> breakpoints(double a, double b, const QuadratureSpec& spec) {
  std::vector<double> pts{a, b};
  if (a == 0.0) {
    double x = std::exp2(std::floor(std::log2(b)));
    if (x >= b) x *= 0.5;
    for (int i = 0; i < spec.grading_depth; ++i, x *= 0.5) pts.push_back(x);
  } else if (b > 2.0 * a) {
    for (double x = std::exp2(std::ceil(std::log2(a))); x < b; x *= 2.0)
      if (x > a) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // geometric grading toward the outer ends of the segment
  std::vector<double> extra;
  if (pts.size() >= 2 && spec.endpoint_levels > 0) {
    const double right = pts[pts.size() - 1] - pts[pts.size() - 2];
    for (int i = 1; i <= spec.endpoint_levels; ++i) extra.push_back(b - right * std::exp2(-i));
    if (a != 0.0) {
      const double left = pts[1] - pts[0];
      for (int i = 1; i <= spec.endpoint_levels; ++i) extra.push_back(a + left * std::exp2(-i));
    }
  }
  pts.insert(pts.end(), extra.begin(), extra.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double integrate_nonneg(const std::function<double(double)>& h, double a, double b,
                        const QuadratureSpec& spec, double s) {
  if (a == 0.0 && s >= 1.0)
    fail(ErrorCode::domain, "non-integrable singularity at the origin (exponent >= 1)");
  const auto pts = breakpoints(a, b, spec);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    if (lo == 0.0) {
      const double k = std::max(1.0, std::ceil(5.0 / (1.0 - std::max(s, 0.0))));
      auto sub = [&](double u) {
        if (u <= 0.0) return 0.0;
        return h(hi * std::pow(u, k)) * hi * k * std::pow(u, k - 1.0);
      };
      acc += gauss_panel(sub, 0.0, 1.0, spec.nodes);
    } else {
      acc += gauss_panel(h, lo, hi, spec.nodes);
    }
  }
  return acc;
}

}  // namespace

double integrate(const std::function<double(double)>& h, double a, double b,
                 const QuadratureSpec& spec, double origin_exponent) {
  if (!(a < b)) return 0.0;
  if (a < 0.0 && b > 0.0)
    return integrate(h, a, 0.0, spec, origin_exponent) + integrate(h, 0.0, b, spec, origin_exponent);
  double result;
  if (b <= 0.0) {
    auto mirrored = [&](double y) { return h(-y); };
    result = integrate_nonneg(mirrored, -b, -a, spec, origin_exponent);
  } else {
    result = integrate_nonneg(h, a, b, spec, origin_exponent);
  }
  if (!std::isfinite(result)) fail(ErrorCode::numeric, "quadrature produced a non-finite value");
  return result;
}

std::vector<double> sample_points(double a, double b, const QuadratureSpec& spec) {
  std::vector<double> out;
  if (!(a < b)) return out;
  if (a < 0.0 && b > 0.0) {
    out = sample_points(a, 0.0, spec);
    const auto right = sample_points(0.0, b, spec);
    out.insert(out.end(), right.begin(), right.end());
    return out;
  }
  const bool neg = b <= 0.0;
  const double lo0 = neg ? -b : a, hi0 = neg ? -a : b;
  const auto pts = breakpoints(lo0, hi0, spec);
  const GaussRule& g = gauss_legendre(spec.nodes);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double half = 0.5 * (pts[i + 1] - pts[i]), mid = 0.5 * (pts[i + 1] + pts[i]);
    for (double x : g.nodes) out.push_back((neg ? -1.0 : 1.0) * (mid + half * x));
  }
  return out;
}

}  // namespace widthlab
