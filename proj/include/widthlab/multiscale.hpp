#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "widthlab/exponents.hpp"
#include "widthlab/function.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/weights.hpp"

namespace widthlab {

/// Cell `index` of the uniform 2^m split of component `component` of ring t.
struct Cell {
  Interval interval;
  int t = 0;
  int component = 0;
  int m = 0;
  std::int64_t index = 0;
};

/// The family T_{t,m}: every ring component is split into 2^m equal cells.
class RingPartition {
 public:
  RingPartition(DomainSpec dom, int m_max);

  const DomainSpec& domain() const noexcept { return dom_; }
  int m_max() const noexcept { return m_max_; }
  int components(int t) const;
  std::int64_t cardinality(int t, int m) const;
  Cell cell(int t, int component, int m, std::int64_t index) const;
  std::vector<Cell> cells(int t, int m) const;
  /// Cells of T_{t,m} whose interior meets [a, b].
  std::vector<Cell> cells_meeting(int t, int m, const Interval& span) const;

 private:
  DomainSpec dom_;
  int m_max_;
};

RingPartition build_partition(const DomainSpec& dom, int m_max);

// ---------------------------------------------------------------------------
// Local polynomial spaces

/// Orthonormal shifted Legendre basis on `cell`: phi_j(x) = sqrt((2j+1)/h)
/// P_j(2(x - a)/h - 1). Returns phi_0..phi_degree (or their k-th derivatives).
Eigen::VectorXd legendre_basis(const Interval& cell, int degree, double x, int k = 0);

/// sum_j c_j phi_j(x) on the cell, 0 outside.
double legendre_eval(const Eigen::VectorXd& c, const Interval& cell, double x, int k = 0);

/// Coefficients of the L2(cell) projection onto polynomials of degree <= degree.
Eigen::VectorXd l2_project(const Function1D& f, const Interval& cell, int degree,
                           const QuadratureSpec& quad);

// ---------------------------------------------------------------------------
// Critical scales and rank allocation

/// Break-even depths and levels for budget n. m_bar and t_hat are only
/// meaningful for q > 2 (has_bar).
struct CriticalScales {
  AbstractParams a;
  SpaceParams s;
  double n = 2.0;
  double log2n = 1.0;
  double t_tilde = 0.0;
  double t_flat = 0.0;
  double t_hat = 0.0;
  bool has_bar = false;

  double m_hat(double t) const;    // 2^{gamma k t} 2^{m} = n
  double m_bar(double t) const;    // 2^{gamma k t} 2^{m} = n^{q/2}
  double m_tilde(double t) const;  // balance of the tail and ring error terms
  double m_flat(double t) const;   // balance of the two W_{t,m} radii
};

/// Error(degenerate) when a structural coefficient vanishes; Error(domain)
/// unless n >= 2.
CriticalScales critical_scales(const AbstractParams& a, const SpaceParams& s, double n);

struct AllocationOptions {
  std::optional<double> eps;        // default: half the exponent gap
  std::optional<double> t1;         // main anchor (t_* or t_1)
  std::optional<double> t2;         // second-segment anchor (t_**)
  std::optional<double> m1;         // correction-depth anchor
  int correction_span = 8;          // corrections on m in [main, main + span)
  int max_depth = 30;               // cap on 2^m cells per component
};

struct CorrectionBudget {
  int m = 0;               // corrections P_{t,m+1} - P_{t,m}
  std::int64_t l = 0;      // l(t, m)
};

struct RingAllocation {
  int t = 0;
  int components = 1;
  double m_star = 0.0;  // real-valued main depth
  int depth = 0;        // integer depth used
  std::int64_t main_rank = 0;
  std::vector<CorrectionBudget> corrections;
};

struct RankAllocation {
  int case_id = 1;
  std::int64_t n = 0;
  double eps = 0.1;
  double t1 = 0.0;
  double t2 = 0.0;
  double m1 = 0.0;
  double split = 0.0;    // two-segment regimes switch anchors past this t
  int t_cut = -1;        // last ring carrying a projection; -1 for none
  std::vector<RingAllocation> rings;
  std::int64_t total_rank = 0;
  double C = 0.0;        // total_rank / n
  double C_model = 0.0;  // real-valued sum of the allocation formula / n
};

/// Main depths and correction budgets for the regime of `profile`.
RankAllocation rank_allocation(const CriticalScales& cs, const ExponentProfile& profile, int r,
                               const DomainSpec& dom, const AllocationOptions& opts = {});

// ---------------------------------------------------------------------------
// Approximation

/// Piecewise polynomial on the rings t <= t_cut; zero beyond. Blocks are
/// keyed by (t, component) and then by (m, cell index); the value at x is the
/// sum of every stored block whose cell contains x.
struct Approximant {
  using BlockKey = std::pair<int, std::int64_t>;
  using RingKey = std::pair<int, int>;

  RingPartition partition;
  int degree = 0;
  int t_cut = -1;
  std::map<RingKey, std::map<BlockKey, Eigen::VectorXd>> blocks;
  std::vector<std::int64_t> rank_per_ring;  // index t
  std::int64_t total_rank = 0;

  double value(double x) const;
};

Approximant approximate(const Function1D& f, const SobolevProblem& p, const DomainSpec& dom,
                        const RankAllocation& alloc, const QuadratureSpec& quad);

/// ||v (f - A f)||_{L_q(Omega)} including the untouched rings and tail.
double approximation_error(const Function1D& f, const Approximant& A, const SobolevProblem& p,
                           const QuadratureSpec& quad);

// ---------------------------------------------------------------------------
// Experiments

struct Ensemble {
  std::vector<FunctionPtr> members;
  std::vector<std::string> labels;
};

struct ExperimentOptions {
  AllocationOptions allocation;
  ProfileOptions profile;
  QuadratureSpec quadrature;
  double membership_slack = 1e-8;
};

struct ExperimentRow {
  std::int64_t n = 0;
  double error = 0.0;  // sup over the ensemble
  std::int64_t rank = 0;
  double seconds = 0.0;
  double C = 0.0;
  double C_model = 0.0;
};

struct ExperimentResult {
  ExponentProfile profile;
  std::vector<ExperimentRow> rows;
  std::vector<RankAllocation> allocations;
};

/// Simulation support: d = 1 with a point singular set (theta = 0 for
/// power_hset, gamma = 0 for log_hset) or power_rd; Error(unsupported_regime)
/// otherwise.
void require_simulable(const SobolevProblem& p);

RankAllocation allocate_for(const SobolevProblem& p, const DomainSpec& dom, std::int64_t n,
                            const ExperimentOptions& opts = {});

ExperimentResult run_experiment(const SobolevProblem& p, const DomainSpec& dom,
                                const std::vector<std::int64_t>& budgets, const Ensemble& ensemble,
                                const ExperimentOptions& opts = {});

}  // namespace widthlab
