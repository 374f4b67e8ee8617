#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "widthlab/exponents.hpp"

namespace widthlab {

struct BallSpec {
  std::int64_t N = 1;
  double p = 2.0;  // in [1, inf]
  double radius = 1.0;

  void validate() const;
  bool operator==(const BallSpec&) const = default;
};

/// {x : ||x||_{p0} <= k0, ||x||_{p1} <= k1} in R^N.
struct IntersectionSpec {
  std::int64_t N = 1;
  BallSpec ball0;
  BallSpec ball1;

  void validate() const;
  bool operator==(const IntersectionSpec&) const = default;
};

using Body = std::variant<BallSpec, IntersectionSpec>;

std::int64_t body_dimension(const Body& body);

enum class EstimateKind { exact, upper, lower, order };

const char* to_string(EstimateKind kind) noexcept;

struct WidthEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::upper;
  std::string method;
  std::int64_t n = 0;
  double target_q = 2.0;
  std::optional<double> tolerance;  // only set by the oracle
};

struct SearchConfig {
  std::uint64_t seed = 20240601;
  int restarts = 8;
  int samples_per_eval = 256;
  int refine_steps = 40;
  double tolerance = 1e-3;
  int max_dimension = 64;

  void validate() const;
};

/// d_n(B_p^N, l_q^N) = (N - n)^{1/q - 1/p} for q <= p.
WidthEstimate exact_width(std::int64_t N, std::int64_t n, double p, double q);

/// Order of d_n(B_p^N, l_q^N) for p < q (q > 2) and p <= q <= 2; no constant.
WidthEstimate gluskin_order(std::int64_t N, std::int64_t n, double p, double q);

struct InterpolatedBall {
  BallSpec ball;
  double lambda = 0.0;  // 1/q~ = (1 - lambda)/p1 + lambda/p0
};

/// The l_{q~} ball containing the intersection by Hoelder interpolation.
InterpolatedBall interpolation_ball(const IntersectionSpec& spec, double q_tilde);

/// Coefficient body W_{t,m}: ball0 carries p0, ball1 carries p1.
IntersectionSpec wtm_body(const AbstractParams& a, const SpaceParams& s, int t, int m);

struct WtmRadii {
  double at_p1 = 1.0;
  double at_p0 = 1.0;
};

/// Radii of W_{t,m} for real depth m (used to locate the balance depth).
WtmRadii wtm_radii(const AbstractParams& a, const SpaceParams& s, double t, double m);

/// Depth at which the two W_{t,m} radii coincide; requires
/// s* + 1/p0 - 1/p1 != 0.
double balance_depth(const AbstractParams& a, const SpaceParams& s, double t);

/// Best formula-level bound for d_n(body, l_q^N): single-ball relaxations,
/// interpolation into B_q and interpolation into B_2 followed by Gluskin.
WidthEstimate intersection_width_upper(const IntersectionSpec& spec, std::int64_t n, double q);

/// Search-based upper bound for d_n(body, l_q^N). Deterministic in cfg.seed
/// and non-increasing in n.
WidthEstimate numeric_width_upper(const Body& body, std::int64_t n, double q,
                                  const SearchConfig& cfg = {});

/// Dense search for N <= 5, n <= 2 with a reported tolerance.
WidthEstimate brute_force_width_oracle(const Body& body, std::int64_t n, double q,
                                       const SearchConfig& cfg = {});

}  // namespace widthlab
