#pragma once

#include <functional>
#include <vector>

namespace widthlab {

struct QuadratureSpec {
  int nodes = 24;           // Gauss-Legendre nodes per panel
  int grading_depth = 40;   // dyadic panels toward a singular origin
  int endpoint_levels = 6;  // geometric panels toward each segment end

  /// Throws Error(validation) unless nodes >= r + 2 and depths are sane.
  void validate(int r = 1) const;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes (Golub-Welsch); cached per n.
const GaussRule& gauss_legendre(int n);

/// Plain n-node Gauss rule on [a, b].
double gauss_panel(const std::function<double(double)>& h, double a, double b, int n);

/// Integral of h over [a, b] on panels graded toward both ends and toward
/// x = 0 when 0 lies in [a, b]. `origin_exponent` s declares a possible
/// |x|^{-s} blow-up at the origin: the innermost panel then uses the
/// substitution x = c u^k. A segment touching the origin with s >= 1 is
/// rejected with Error(domain).
double integrate(const std::function<double(double)>& h, double a, double b,
                 const QuadratureSpec& spec, double origin_exponent = 0.0);

/// Quadrature abscissae used by `integrate` (for sup-norm sampling).
std::vector<double> sample_points(double a, double b, const QuadratureSpec& spec);

}  // namespace widthlab
