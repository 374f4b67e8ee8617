#pragma once

#include <vector>

#include "widthlab/exponents.hpp"
#include "widthlab/function.hpp"
#include "widthlab/quadrature.hpp"

namespace widthlab {

/// One-dimensional computational domain.
///
/// interval_singular_origin: Omega = (0, 1), singular set {0}; ring t is the
/// dyadic shell (2^{-t-1}, 2^{-t}). With log_rings the ring t instead groups
/// the 2^t shells i = 2^t - 1 .. 2^{t+1} - 2, which is the ring structure
/// that matches the log h-function.
///
/// real_line: Omega = R truncated to |x| < 2^{t_max}; ring 0 is (-1, 1) and
/// ring t >= 1 is (2^{t-1}, 2^t) together with its mirror image.
struct DomainSpec {
  enum class Geometry { interval_singular_origin, real_line };

  Geometry geometry = Geometry::interval_singular_origin;
  int t_max = 12;
  bool log_rings = false;

  void validate() const;
  /// Smallest interval containing Omega (truncated for the real line).
  Interval extent() const;
  /// Connected components of ring t, left to right.
  std::vector<Interval> ring(int t) const;
  /// Part of Omega outside rings 0..t_max, as intervals.
  std::vector<Interval> tail() const;
};

const char* to_string(DomainSpec::Geometry g) noexcept;

/// The natural domain of a problem (d = 1 only); t_max as given.
DomainSpec default_domain(const SobolevProblem& p, int t_max = 12);

/// A weight of the form |x|^{-power} |log(|x|/2)|^{log_power} (origin
/// families) or (1 + |x|)^{power} (whole-line family).
struct WeightFactor {
  bool whole_line = false;
  double power = 0.0;
  double log_power = 0.0;

  double operator()(double x) const;
  WeightFactor inverse() const { return {whole_line, -power, -log_power}; }
  /// s such that factor^e behaves like |x|^{-s} at the origin (0 for the
  /// whole-line family); used to grade quadrature and reject singularities.
  double origin_exponent(double e) const;
};

/// g, w, v of a problem: ||f^{(r)} / g||_{p1}, ||w f||_{p0}, ||v f||_q.
struct WeightModel {
  WeightFactor g;
  WeightFactor w;
  WeightFactor v;
};

WeightModel weight_model(const SobolevProblem& p);

/// (int_Omega |weight(x) f^{(k)}(x)|^e dx)^{1/e}, e in [1, inf]; the sup
/// norm is taken over the quadrature abscissae. The integral runs over the
/// support of f clipped to the domain extent and is split at f's
/// breakpoints. A weight that is not e-integrable at the origin where f is
/// nonzero raises Error(domain).
double weighted_norm(const Function1D& f, const WeightFactor& weight, double e,
                     const DomainSpec& dom, const QuadratureSpec& quad, int k = 0);

struct MembershipNorms {
  double sobolev_norm = 0.0;       // ||f^{(r)} / g||_{L_{p1}}
  double weighted_p0_norm = 0.0;   // ||w f||_{L_{p0}}

  bool inside(double slack = 0.0) const {
    return sobolev_norm <= 1.0 + slack && weighted_p0_norm <= 1.0 + slack;
  }
};

/// Both defining norms of M. Error(input) when f carries no derivative data.
MembershipNorms check_membership(const Function1D& f, const SobolevProblem& p,
                                 const DomainSpec& dom, const QuadratureSpec& quad);

}  // namespace widthlab
