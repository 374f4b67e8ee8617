#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "widthlab/exponents.hpp"
#include "widthlab/function.hpp"
#include "widthlab/multiscale.hpp"
#include "widthlab/weights.hpp"

namespace widthlab {

struct BumpOptions {
  BumpProfile::Shape shape = BumpProfile::Shape::polynomial;
  QuadratureSpec quadrature;
  int component = 0;  // which component of the ring carries the family
};

/// 2^m disjoint bumps filling the cells of depth m of one ring component,
/// each scaled to unit L_{q,v} norm.
struct BumpFamily {
  int j = 0;
  int m = 0;
  int component = 0;
  double rho = 0.0;
  std::shared_ptr<const BumpProfile> profile;
  std::vector<std::shared_ptr<const ScaledBump>> members;

  std::int64_t count() const noexcept { return static_cast<std::int64_t>(members.size()); }
  /// Normalization constants c_{j,i,l}.
  std::vector<double> constants() const;
};

/// Error(size_limit) when j exceeds the domain's t_max or m > 24.
BumpFamily build_bump_family(const SobolevProblem& p, const DomainSpec& dom, int j, int m,
                             const BumpOptions& opts = {});

/// (||psi^{(r)} / g||_{p1}, ||w psi||_{p0}) for every member.
std::vector<MembershipNorms> bump_norms(const BumpFamily& fam, const SobolevProblem& p,
                                        const DomainSpec& dom, const QuadratureSpec& quad = {});

/// Geometric mean of each norm over the family.
MembershipNorms mean_log_norms(const std::vector<MembershipNorms>& norms);

/// One member of the (j, m) family divided by the larger of its two
/// defining norms, so that it lies in M.
FunctionPtr normalized_bump(const SobolevProblem& p, const DomainSpec& dom, int j, int m,
                            std::int64_t index, const BumpOptions& opts = {});

/// Single normalized bumps for every (t, m) in [0, t_last] x [0, m_last],
/// each in the first cell of its family.
Ensemble bump_grid_ensemble(const SobolevProblem& p, const DomainSpec& dom, int t_last,
                            int m_last, const BumpOptions& opts = {});

struct MatchedScales {
  double m_t = 0.0;        // balance of the two radii at the l_1 vertices
  double m_tilde_t = 0.0;  // balance at the l_inf vertices
};

MatchedScales matched_scales_lower(const AbstractParams& a, const SpaceParams& s, double t);

struct LowerBoundRow {
  std::int64_t n = 0;
  double b94 = 0.0;
  double b95 = 0.0;
  double b96 = 0.0;
  std::optional<double> b97;  // q > 2, p1 < q
  std::optional<double> b98;  // q > 2
  double max = 0.0;
  std::string dominant;       // component attaining the max
};

struct LowerBoundCurve {
  ExponentPair exponents;
  double s_star = 0.0;
  std::vector<LowerBoundRow> rows;
};

/// Constant-free lower bounds per budget. Error(validation) unless the
/// hypothesis report passes.
LowerBoundCurve lower_bound_curve(const SobolevProblem& p, const std::vector<std::int64_t>& budgets,
                                  const ProfileOptions& opts = {});

}  // namespace widthlab
