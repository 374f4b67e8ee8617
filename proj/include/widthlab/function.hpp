#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace widthlab {

struct Interval {
  double a = 0.0;
  double b = 0.0;

  double length() const noexcept { return b - a; }
  bool contains(double x) const noexcept { return a <= x && x < b; }
  bool overlaps(const Interval& o) const noexcept { return a < o.b && o.a < b; }
  bool operator==(const Interval&) const = default;
};

/// Real function on the line with known compact (or declared) support.
class Function1D {
 public:
  virtual ~Function1D() = default;

  virtual double value(double x) const = 0;
  /// k-th derivative, or nullopt when the function carries no derivative data.
  virtual std::optional<double> derivative(double x, int k) const = 0;
  /// f vanishes outside the returned interval.
  virtual Interval support() const = 0;
  /// Points inside the support where f is only piecewise smooth.
  virtual std::vector<double> breakpoints() const { return {}; }
};

using FunctionPtr = std::shared_ptr<const Function1D>;

/// The fixed bump on [0, 1]: either (u(1-u))^{r+1} (C^r) or exp(-1/(u(1-u)))
/// (C^inf), scaled to unit L_q norm on [0, 1].
class BumpProfile {
 public:
  enum class Shape { polynomial, exponential };

  BumpProfile(int r, double q, Shape shape = Shape::polynomial);

  int smoothness() const noexcept { return r_; }
  Shape shape() const noexcept { return shape_; }
  double q() const noexcept { return q_; }
  double value(double u) const { return derivative(u, 0); }
  double derivative(double u, int k) const;

 private:
  double raw_derivative(double u, int k) const;

  int r_;
  double q_;
  Shape shape_;
  std::vector<double> poly_;  // monomial coefficients of the polynomial shape
  double scale_ = 1.0;
};

/// c * psi((x - x0) / rho) on [x0, x0 + rho].
class ScaledBump final : public Function1D {
 public:
  ScaledBump(std::shared_ptr<const BumpProfile> profile, double x0, double rho, double amplitude);

  double value(double x) const override;
  std::optional<double> derivative(double x, int k) const override;
  Interval support() const override { return {x0_, x0_ + rho_}; }

  double x0() const noexcept { return x0_; }
  double rho() const noexcept { return rho_; }
  double amplitude() const noexcept { return amp_; }
  ScaledBump scaled(double factor) const { return {profile_, x0_, rho_, amp_ * factor}; }

 private:
  std::shared_ptr<const BumpProfile> profile_;
  double x0_, rho_, amp_;
};

/// Polynomial sum_k c_k x^k restricted to [a, b] (zero outside).
class PolynomialPiece final : public Function1D {
 public:
  PolynomialPiece(std::vector<double> coeffs, Interval support);

  double value(double x) const override;
  std::optional<double> derivative(double x, int k) const override;
  Interval support() const override { return support_; }

 private:
  std::vector<double> c_;
  Interval support_;
};

class ZeroFunction final : public Function1D {
 public:
  double value(double) const override { return 0.0; }
  std::optional<double> derivative(double, int) const override { return 0.0; }
  Interval support() const override { return {0.0, 0.0}; }
};

/// Wraps callables; `deriv` may be empty, in which case no derivative data exists.
class CallableFunction final : public Function1D {
 public:
  using Value = std::function<double(double)>;
  using Derivative = std::function<double(double, int)>;

  CallableFunction(Value value, Derivative deriv, Interval support,
                   std::vector<double> breaks = {});

  double value(double x) const override;
  std::optional<double> derivative(double x, int k) const override;
  Interval support() const override { return support_; }
  std::vector<double> breakpoints() const override { return breaks_; }

 private:
  Value value_;
  Derivative deriv_;
  Interval support_;
  std::vector<double> breaks_;
};

/// Linear combination sum_i c_i f_i.
class SumFunction final : public Function1D {
 public:
  SumFunction(std::vector<FunctionPtr> terms, std::vector<double> coeffs);

  double value(double x) const override;
  std::optional<double> derivative(double x, int k) const override;
  Interval support() const override;
  std::vector<double> breakpoints() const override;

 private:
  std::vector<FunctionPtr> terms_;
  std::vector<double> coeffs_;
};

/// c * f.
FunctionPtr scale_function(FunctionPtr f, double c);

}  // namespace widthlab
