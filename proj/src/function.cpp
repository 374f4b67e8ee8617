#include "widthlab/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "widthlab/errors.hpp"
#include "widthlab/quadrature.hpp"

namespace widthlab {
namespace {

double eval_poly_derivative(const std::vector<double>& c, double x, int k) {
  // Horner on the k-th derivative coefficients.
  double acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= static_cast<double>(i - j);
    acc = acc * x + c[i] * falling;
  }
  return acc;
}

/// Taylor coefficients of exp(-1/(u(1-u))) around u, up to order k.
std::vector<double> exp_bump_jet(double u, int k) {
  std::vector<double> g(k + 1, 0.0), inv(k + 1, 0.0), e(k + 1, 0.0);
  g[0] = u * (1.0 - u);
  if (k >= 1) g[1] = 1.0 - 2.0 * u;
  if (k >= 2) g[2] = -1.0;
  inv[0] = 1.0 / g[0];
  for (int n = 1; n <= k; ++n) {
    double acc = 0.0;
    for (int j = 1; j <= std::min(n, 2); ++j) acc += g[j] * inv[n - j];
    inv[n] = -acc / g[0];
  }
  std::vector<double> a(k + 1);
  for (int n = 0; n <= k; ++n) a[n] = -inv[n];
  e[0] = std::exp(a[0]);
  for (int n = 1; n <= k; ++n) {
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) acc += j * a[j] * e[n - j];
    e[n] = acc / n;
  }
  return e;
}

}  // namespace

BumpProfile::BumpProfile(int r, double q, Shape shape) : r_(r), q_(q), shape_(shape) {
  if (r < 0) fail(ErrorCode::validation, "bump smoothness must be >= 0");
  if (!(q >= 1.0) || std::isinf(q)) fail(ErrorCode::validation, "bump norm exponent must lie in [1, inf)");
  if (shape_ == Shape::polynomial) {
    // (u(1-u))^{r+1} = sum_i C(r+1, i) (-1)^i u^{r+1+i}
    const int e = r + 1;
    poly_.assign(2 * e + 1, 0.0);
    double binom = 1.0;
    for (int i = 0; i <= e; ++i) {
      poly_[e + i] = (i % 2 == 0 ? 1.0 : -1.0) * binom;
      binom = binom * (e - i) / (i + 1);
    }
  }
  QuadratureSpec spec;
  spec.nodes = 48;
  spec.endpoint_levels = 24;
  const double mass =
      integrate([&](double u) { return std::pow(std::abs(raw_derivative(u, 0)), q_); }, 0.0, 1.0,
                spec);
  if (!(mass > 0.0)) fail(ErrorCode::numeric, "bump normalization failed");
  scale_ = std::pow(mass, -1.0 / q_);
}

double BumpProfile::raw_derivative(double u, int k) const {
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  if (shape_ == Shape::polynomial) return eval_poly_derivative(poly_, u, k);
  const auto jet = exp_bump_jet(u, k);
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return jet[k] * fact;
}

double BumpProfile::derivative(double u, int k) const { return scale_ * raw_derivative(u, k); }

ScaledBump::ScaledBump(std::shared_ptr<const BumpProfile> profile, double x0, double rho,
                       double amplitude)
    : profile_(std::move(profile)), x0_(x0), rho_(rho), amp_(amplitude) {
  if (!profile_) fail(ErrorCode::validation, "bump needs a profile");
  if (!(rho > 0.0)) fail(ErrorCode::validation, "bump width must be positive");
}

double ScaledBump::value(double x) const { return amp_ * profile_->value((x - x0_) / rho_); }

std::optional<double> ScaledBump::derivative(double x, int k) const {
  return amp_ * std::pow(rho_, -k) * profile_->derivative((x - x0_) / rho_, k);
}

PolynomialPiece::PolynomialPiece(std::vector<double> coeffs, Interval support)
    : c_(std::move(coeffs)), support_(support) {
  if (!(support.a <= support.b)) fail(ErrorCode::validation, "polynomial support must be ordered");
}

double PolynomialPiece::value(double x) const {
  return support_.contains(x) ? eval_poly_derivative(c_, x, 0) : 0.0;
}

std::optional<double> PolynomialPiece::derivative(double x, int k) const {
  return support_.contains(x) ? eval_poly_derivative(c_, x, k) : 0.0;
}

CallableFunction::CallableFunction(Value value, Derivative deriv, Interval support,
                                   std::vector<double> breaks)
    : value_(std::move(value)),
      deriv_(std::move(deriv)),
      support_(support),
      breaks_(std::move(breaks)) {}

double CallableFunction::value(double x) const {
  return support_.contains(x) ? value_(x) : 0.0;
}

std::optional<double> CallableFunction::derivative(double x, int k) const {
  if (k == 0) return value(x);
  if (!deriv_) return std::nullopt;
  return support_.contains(x) ? deriv_(x, k) : 0.0;
}

SumFunction::SumFunction(std::vector<FunctionPtr> terms, std::vector<double> coeffs)
    : terms_(std::move(terms)), coeffs_(std::move(coeffs)) {
  if (terms_.size() != coeffs_.size())
    fail(ErrorCode::validation, "sum needs one coefficient per term");
}

double SumFunction::value(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) acc += coeffs_[i] * terms_[i]->value(x);
  return acc;
}

std::optional<double> SumFunction::derivative(double x, int k) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto d = terms_[i]->derivative(x, k);
    if (!d) return std::nullopt;
    acc += coeffs_[i] * *d;
  }
  return acc;
}

Interval SumFunction::support() const {
  Interval hull{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& t : terms_) {
    const Interval s = t->support();
    if (s.length() <= 0.0) continue;
    hull.a = std::min(hull.a, s.a);
    hull.b = std::max(hull.b, s.b);
  }
  return hull.a < hull.b ? hull : Interval{0.0, 0.0};
}

std::vector<double> SumFunction::breakpoints() const {
  std::vector<double> out;
  for (const auto& t : terms_) {
    const Interval s = t->support();
    if (s.length() <= 0.0) continue;
    out.push_back(s.a);
    out.push_back(s.b);
    const auto inner = t->breakpoints();
    out.insert(out.end(), inner.begin(), inner.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FunctionPtr scale_function(FunctionPtr f, double c) {
  if (const auto* b = dynamic_cast<const ScaledBump*>(f.get()))
    return std::make_shared<ScaledBump>(b->scaled(c));
  return std::make_shared<SumFunction>(std::vector<FunctionPtr>{std::move(f)},
                                       std::vector<double>{c});
}

}  // namespace widthlab
