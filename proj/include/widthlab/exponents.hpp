#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace widthlab {

/// Integrability exponents: derivative class in L_{p1}, zero-order ball in
/// L_{p0}, widths measured in L_q. p0 and p1 may be +inf.
struct SpaceParams {
  double p0 = 2.0;
  double p1 = 2.0;
  double q = 2.0;

  void validate() const;
  bool operator==(const SpaceParams&) const = default;
};

enum class ProblemKind { power_hset, log_hset, power_rd };

const char* to_string(ProblemKind kind) noexcept;
ProblemKind problem_kind_from_string(const std::string& name);

/// g, w, v are powers of dist(x, Gamma) and Gamma is an h-set with
/// h(t) = t^theta.
struct PowerHsetWeights {
  double theta = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  bool operator==(const PowerHsetWeights&) const = default;
};

/// g, w, v are t^{-a}|log t|^b of the distance, h(t) = |log t|^{-gamma};
/// beta, sigma, lambda sit on the critical line tying them to r, d, p's.
struct LogHsetWeights {
  double gamma = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double nu = 0.0;
  bool operator==(const LogHsetWeights&) const = default;
};

/// g, w, v are powers of (1 + |x|) on the whole space.
struct PowerRdWeights {
  double beta = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  bool operator==(const PowerRdWeights&) const = default;
};

using WeightFamily = std::variant<PowerHsetWeights, LogHsetWeights, PowerRdWeights>;

struct SobolevProblem {
  int r = 1;
  int d = 1;
  SpaceParams space;
  WeightFamily weights = PowerHsetWeights{};

  ProblemKind kind() const noexcept;
  double s_star() const noexcept { return static_cast<double>(r) / d; }
  /// Throws Error(validation) when an invariant of the weight family fails.
  void validate() const;
  bool operator==(const SobolevProblem&) const = default;
};

/// Parameter tuple of the abstract two-ball class.
struct AbstractParams {
  double s_star = 1.0;
  double gamma_star = 0.0;
  double alpha_star = 0.0;
  double mu_star = 0.0;
  int k_star = 1;
  double c = 1.0;
  int t0 = 0;
  int r0 = 1;

  void validate() const;
  bool operator==(const AbstractParams&) const = default;
};

struct AbstractConfig {
  double c = 1.0;
  int t0 = 0;
  std::optional<int> r0;  // defaults to dim of degree-(r-1) polynomials
};

struct ExponentPair {
  double theta_tilde = 0.0;
  double theta_hat = 0.0;
  bool operator==(const ExponentPair&) const = default;
};

/// Which value to use for theta_4 in the p0 < q, q > 2, min(p0,p1) >= 2
/// regime: q*theta_hat/2 (matches the neighbouring regimes and the rate the
/// upper-bound argument produces) or theta_hat/2 as typeset.
enum class Case8Theta4 { consistent, as_printed };

struct ProfileOptions {
  double tie_tolerance = 1e-12;
  Case8Theta4 case8_theta4 = Case8Theta4::consistent;
};

/// Candidate rate exponents for one (p0, p1, q) regime. j_star is 1-based
/// to match the theta_j labelling; it is set only for a strict minimizer.
struct ExponentProfile {
  int case_id = 1;
  std::vector<double> thetas;
  std::optional<int> j_star;
  std::optional<double> theta_star;
  std::string diagnostic;

  int j0() const noexcept { return static_cast<int>(thetas.size()); }
  bool operator==(const ExponentProfile&) const = default;
};

struct HypothesisCheck {
  std::string name;
  double value = 0.0;
  bool pass = false;
  bool operator==(const HypothesisCheck&) const = default;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool overall = true;

  void add(std::string name, double value, bool pass);
  const HypothesisCheck* find(const std::string& name) const;
  bool operator==(const HypothesisReport&) const = default;
};

struct Prediction {
  std::optional<double> exponent;  // d_n ~ n^{-exponent}
  ExponentPair exponents;
  ExponentProfile profile;
  HypothesisReport report;
};

/// Regime predicates in their fixed order 1..9. On the boundaries where the
/// typeset inequalities overlap or leave a gap, the earlier regime owns the
/// point (regimes 3/4 are closed at p0 = q); exactly one entry is true for
/// every valid SpaceParams.
std::array<bool, 9> regime_predicates(const SpaceParams& s);
int regime_of(const SpaceParams& s);

ExponentPair abstract_exponents(const AbstractParams& a, const SpaceParams& s);
AbstractParams problem_to_abstract(const SobolevProblem& p, const AbstractConfig& cfg = {});
ExponentPair concrete_exponents(const SobolevProblem& p);

ExponentProfile exponent_profile(const SpaceParams& s, double s_star, const ExponentPair& e,
                                 const ProfileOptions& opts = {});

/// Checks the standing assumptions of the two-ball machinery for an
/// abstract parameter tuple (used by the concrete report as well).
void append_abstract_checks(HypothesisReport& report, const AbstractParams& a,
                            const SpaceParams& s);

HypothesisReport check_hypotheses(const SobolevProblem& p, const ProfileOptions& opts = {});

Prediction predicted_width_exponent(const SobolevProblem& p, const ProfileOptions& opts = {});

}  // namespace widthlab
