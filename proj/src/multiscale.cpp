#include "widthlab/multiscale.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"

namespace widthlab {

// ---------------------------------------------------------------------------
// Partition

RingPartition::RingPartition(DomainSpec dom, int m_max) : dom_(dom), m_max_(m_max) {
  dom_.validate();
  if (m_max < 0) fail(ErrorCode::validation, "m_max must be >= 0");
  if (m_max > 52) fail(ErrorCode::size_limit, "partition depth above 52");
}

int RingPartition::components(int t) const { return static_cast<int>(dom_.ring(t).size()); }

std::int64_t RingPartition::cardinality(int t, int m) const {
  return static_cast<std::int64_t>(components(t)) << m;
}

Cell RingPartition::cell(int t, int component, int m, std::int64_t index) const {
  const auto comps = dom_.ring(t);
  if (component < 0 || component >= static_cast<int>(comps.size()))
    fail(ErrorCode::validation, "ring component out of range");
  if (index < 0 || index >= (std::int64_t{1} << m))
    fail(ErrorCode::validation, "cell index out of range");
  const Interval& c = comps[component];
  const double h = c.length() / std::exp2(m);
  const double a = c.a + h * static_cast<double>(index);
  const double b = index + 1 == (std::int64_t{1} << m) ? c.b : a + h;
  return {{a, b}, t, component, m, index};
}

std::vector<Cell> RingPartition::cells(int t, int m) const {
  std::vector<Cell> out;
  const int comps = components(t);
  for (int j = 0; j < comps; ++j)
    for (std::int64_t i = 0; i < (std::int64_t{1} << m); ++i) out.push_back(cell(t, j, m, i));
  return out;
}

std::vector<Cell> RingPartition::cells_meeting(int t, int m, const Interval& span) const {
  std::vector<Cell> out;
  const auto comps = dom_.ring(t);
  const std::int64_t count = std::int64_t{1} << m;
  for (int j = 0; j < static_cast<int>(comps.size()); ++j) {
    const Interval& c = comps[j];
    if (!c.overlaps(span)) continue;
    const double h = c.length() / static_cast<double>(count);
    const auto lo = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((span.a - c.a) / h)) - 1, 0, count - 1);
    const auto hi = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::ceil((span.b - c.a) / h)) + 1, 0, count - 1);
    for (std::int64_t i = lo; i <= hi; ++i) {
      Cell cl = cell(t, j, m, i);
      if (cl.interval.overlaps(span)) out.push_back(cl);
    }
  }
  return out;
}

RingPartition build_partition(const DomainSpec& dom, int m_max) { return {dom, m_max}; }

// ---------------------------------------------------------------------------
// Legendre projection

Eigen::VectorXd legendre_basis(const Interval& cell, int degree, double x, int k) {
  const double h = cell.length();
  const double u = 2.0 * (x - cell.a) / h - 1.0;
  // D[o](j): o-th u-derivative of P_j
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k + 1, degree + 1);
  D(0, 0) = 1.0;
  if (degree >= 1) D(0, 1) = u;
  for (int j = 1; j < degree; ++j)
    D(0, j + 1) = ((2.0 * j + 1.0) * u * D(0, j) - j * D(0, j - 1)) / (j + 1.0);
  for (int o = 1; o <= k; ++o) {
    for (int j = 0; j < degree; ++j) {
      const double lower = j >= 1 ? D(o, j - 1) : 0.0;
      D(o, j + 1) = lower + (2.0 * j + 1.0) * D(o - 1, j);
    }
  }
  Eigen::VectorXd out(degree + 1);
  const double chain = std::pow(2.0 / h, k);
  for (int j = 0; j <= degree; ++j) out[j] = std::sqrt((2.0 * j + 1.0) / h) * chain * D(k, j);
  return out;
}

double legendre_eval(const Eigen::VectorXd& c, const Interval& cell, double x, int k) {
  if (!cell.contains(x)) return 0.0;
  return c.dot(legendre_basis(cell, static_cast<int>(c.size()) - 1, x, k));
}

namespace {

/// Cell split at the points where f may lose smoothness.
std::vector<Interval> smooth_pieces(const Function1D& f, const Interval& cell) {
  std::vector<double> cuts{cell.a, cell.b};
  const Interval sup = f.support();
  for (double x : {sup.a, sup.b})
    if (x > cell.a && x < cell.b) cuts.push_back(x);
  for (double x : f.breakpoints())
    if (x > cell.a && x < cell.b) cuts.push_back(x);
  if (cell.a < 0.0 && cell.b > 0.0) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i] < cuts[i + 1]) out.push_back({cuts[i], cuts[i + 1]});
  return out;
}

double piecewise_gauss(const Function1D& f, const Interval& cell, int nodes,
                       const std::function<double(double)>& h) {
  double acc = 0.0;
  for (const auto& piece : smooth_pieces(f, cell)) acc += gauss_panel(h, piece.a, piece.b, nodes);
  return acc;
}

}  // namespace

Eigen::VectorXd l2_project(const Function1D& f, const Interval& cell, int degree,
                           const QuadratureSpec& quad) {
  if (!(cell.length() > 0.0)) fail(ErrorCode::validation, "projection cell is empty");
  if (degree < 0) fail(ErrorCode::validation, "projection degree must be >= 0");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
  const GaussRule& g = gauss_legendre(std::max(quad.nodes, degree + 2));
  for (const auto& piece : smooth_pieces(f, cell)) {
    const double half = 0.5 * piece.length(), mid = 0.5 * (piece.a + piece.b);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double x = mid + half * g.nodes[k];
      c += (g.weights[k] * half * f.value(x)) * legendre_basis(cell, degree, x);
    }
  }
  if (!c.allFinite()) fail(ErrorCode::numeric, "projection produced a non-finite coefficient");
  return c;
}

// ---------------------------------------------------------------------------
// Critical scales

double CriticalScales::m_hat(double t) const { return log2n - a.gamma_star * a.k_star * t; }

double CriticalScales::m_bar(double t) const {
  return 0.5 * s.q * log2n - a.gamma_star * a.k_star * t;
}

double CriticalScales::m_tilde(double t) const {
  const double ip0 = recip(s.p0), ip1 = recip(s.p1);
  return (a.mu_star + a.alpha_star + a.gamma_star * (ip0 - ip1)) * a.k_star * t / a.s_star;
}

double CriticalScales::m_flat(double t) const {
  const double ip0 = recip(s.p0), ip1 = recip(s.p1);
  return (a.mu_star + a.alpha_star) * a.k_star * t / (a.s_star + ip0 - ip1);
}

CriticalScales critical_scales(const AbstractParams& a, const SpaceParams& s, double n) {
  s.validate();
  if (!(n >= 2.0) || !std::isfinite(n)) fail(ErrorCode::domain, "critical scales need n >= 2");
  const double ip0 = recip(s.p0), ip1 = recip(s.p1);
  const double flat = a.s_star + ip0 - ip1;
  const double D = (a.mu_star + a.alpha_star + a.gamma_star * flat) * a.k_star;
  if (std::abs(D) < 1e-14) fail(ErrorCode::degenerate, "mu* + alpha* + gamma*(s* + 1/p0 - 1/p1) = 0");
  if (std::abs(flat) < 1e-14) fail(ErrorCode::degenerate, "s* + 1/p0 - 1/p1 = 0");
  if (!(a.s_star > 0.0)) fail(ErrorCode::degenerate, "s* must be positive");
  CriticalScales cs;
  cs.a = a;
  cs.s = s;
  cs.n = n;
  cs.log2n = std::log2(n);
  cs.t_tilde = a.s_star * cs.log2n / D;
  cs.t_flat = flat * cs.log2n / D;
  cs.has_bar = s.q > 2.0;
  cs.t_hat = flat * 0.5 * s.q * cs.log2n / D;
  return cs;
}

// ---------------------------------------------------------------------------
// Rank allocation

namespace {

enum class Term { first, g2, tilde, hat, hat_shift, q_hat };

std::vector<Term> case_terms(int case_id) {
  using T = Term;
  switch (case_id) {
    case 1: return {T::first, T::tilde};
    case 2: return {T::first, T::tilde, T::hat};
    case 3: return {T::first, T::g2, T::tilde, T::q_hat};
    case 4: return {T::first, T::g2, T::tilde, T::hat_shift, T::q_hat};
    case 5: return {T::first, T::hat};
    case 6: return {T::first, T::tilde, T::hat};
    case 7: return {T::first, T::g2, T::hat_shift, T::q_hat};
    case 8: return {T::first, T::g2, T::tilde, T::q_hat};
    case 9: return {T::first, T::g2, T::tilde, T::hat_shift, T::q_hat};
  }
  fail(ErrorCode::validation, "unknown regime id");
}

struct Anchors {
  double t1 = 0.0, t2 = 0.0, m1 = 0.0, split = 0.0;
  bool two_segments = false;
};

Anchors default_anchors(const CriticalScales& cs, int case_id, std::optional<Term> win) {
  Anchors an;
  an.m1 = cs.m_hat(0.0);
  if (case_id == 2 || case_id == 6) {
    an.two_segments = true;
    const double split = case_id == 2 ? cs.t_flat : cs.t_tilde;
    an.split = split;
    an.t1 = 0.0;
    an.t2 = split;
    if (win == Term::tilde) {
      an.t1 = split;
      an.t2 = cs.t_tilde;
    } else if (win == Term::hat) {
      an.t1 = split;
      an.t2 = cs.t_flat;
    }
    return an;
  }
  if (!win) return an;
  switch (*win) {
    case Term::first:
      break;
    case Term::g2:
      an.m1 = cs.m_bar(0.0);
      break;
    case Term::tilde:
      an.t1 = cs.t_tilde;
      an.m1 = cs.m_hat(cs.t_tilde);
      break;
    case Term::hat:
    case Term::hat_shift:
      an.t1 = cs.t_flat;
      an.m1 = cs.m_hat(cs.t_flat);
      break;
    case Term::q_hat:
      an.t1 = cs.t_hat;
      an.m1 = cs.m_bar(cs.t_hat);
      break;
  }
  return an;
}

}  // namespace

RankAllocation rank_allocation(const CriticalScales& cs, const ExponentProfile& profile, int r,
                               const DomainSpec& dom, const AllocationOptions& opts) {
  dom.validate();
  if (r < 1) fail(ErrorCode::validation, "r must be >= 1");
  const int id = profile.case_id;
  const auto terms = case_terms(id);
  if (static_cast<int>(terms.size()) != profile.j0())
    fail(ErrorCode::validation, "profile length does not match its regime");

  RankAllocation out;
  out.case_id = id;
  out.n = static_cast<std::int64_t>(std::llround(cs.n));

  std::optional<Term> win;
  double gap = 0.0;
  if (profile.j_star) {
    const int js = *profile.j_star - 1;
    win = terms[js];
    gap = kInf;
    for (int j = 0; j < profile.j0(); ++j)
      if (j != js) gap = std::min(gap, profile.thetas[j] - profile.thetas[js]);
  }
  out.eps = opts.eps.value_or(win ? 0.5 * gap : 0.1);
  if (!(out.eps > 0.0) || !std::isfinite(out.eps))
    fail(ErrorCode::validation, "eps must be positive and finite");

  Anchors an = default_anchors(cs, id, win);
  if (opts.t1) an.t1 = *opts.t1;
  if (opts.t2) an.t2 = *opts.t2;
  if (opts.m1) an.m1 = *opts.m1;
  out.t1 = an.t1;
  out.t2 = an.t2;
  out.m1 = an.m1;
  out.split = an.split;

  double t_crit = 0.0;
  switch (id) {
    case 1: case 2: t_crit = snapped_floor(cs.t_tilde); break;
    case 3: case 4: t_crit = snapped_ceil(cs.t_tilde); break;
    case 5: case 6: t_crit = snapped_floor(cs.t_flat); break;
    default: t_crit = snapped_floor(cs.t_hat); break;
  }
  const int t0 = cs.a.t0;
  out.t_cut = static_cast<int>(std::min<double>(t_crit, dom.t_max));
  if (out.t_cut < t0) out.t_cut = -1;

  const bool clamp = id >= 7;
  const bool ceil_depth = id == 3 || id == 4;
  const bool corrections = cs.s.q > 2.0;
  double model = 0.0;
  for (int t = t0; out.t_cut >= 0 && t <= out.t_cut; ++t) {
    RingAllocation ra;
    ra.t = t;
    ra.components = static_cast<int>(dom.ring(t).size());
    const double anchor = an.two_segments && t > an.split + 1e-12 ? an.t2 : an.t1;
    ra.m_star = cs.m_hat(t) - out.eps * std::abs(t - anchor);
    double depth = ceil_depth ? snapped_ceil(ra.m_star) : snapped_floor(ra.m_star);
    if (clamp) depth = std::max(depth, 0.0);
    if (depth < 0.0)
      fail(ErrorCode::allocation, "negative main depth at ring " + std::to_string(t) +
                                      "; lower eps or move the anchors");
    if (depth > opts.max_depth)
      fail(ErrorCode::size_limit, "main depth above the configured cap");
    ra.depth = static_cast<int>(depth);
    ra.main_rank = static_cast<std::int64_t>(r) * ra.components * (std::int64_t{1} << ra.depth);
    model += r * ra.components * std::exp2(clamp ? std::max(ra.m_star, 0.0) : ra.m_star);
    out.total_rank += ra.main_rank;
    if (corrections) {
      const double mbar = cs.m_bar(t);
      for (int m = ra.depth; m < ra.depth + opts.correction_span && m <= mbar + 1e-12; ++m) {
        if (m + 1 > opts.max_depth) break;
        const double decay = out.eps * (std::abs(t - anchor) + std::abs(m - an.m1));
        const double l_real = cs.n * std::exp2(-decay);
        CorrectionBudget cb;
        cb.m = m;
        cb.l = static_cast<std::int64_t>(std::ceil(l_real - 1e-9));
        const std::int64_t blocks =
            std::min<std::int64_t>(cb.l / r, static_cast<std::int64_t>(ra.components) << (m + 1));
        out.total_rank += blocks * r;
        model += l_real;
        ra.corrections.push_back(cb);
      }
    }
    out.rings.push_back(std::move(ra));
  }
  out.C = static_cast<double>(out.total_rank) / cs.n;
  out.C_model = model / cs.n;
  return out;
}

// ---------------------------------------------------------------------------
// Approximant

namespace {

using Blocks = std::map<Approximant::BlockKey, Eigen::VectorXd>;

double component_value(const Blocks& blocks, const std::set<int>& depths, const Interval& comp,
                       double x) {
  double acc = 0.0;
  for (int m : depths) {
    const std::int64_t count = std::int64_t{1} << m;
    const double h = comp.length() / static_cast<double>(count);
    auto i = static_cast<std::int64_t>(std::floor((x - comp.a) / h));
    i = std::clamp<std::int64_t>(i, 0, count - 1);
    auto it = blocks.find({m, i});
    if (it == blocks.end()) continue;
    const double a = comp.a + h * static_cast<double>(i);
    const Interval cell{a, i + 1 == count ? comp.b : a + h};
    acc += legendre_eval(it->second, cell, x);
  }
  return acc;
}

std::set<int> depths_of(const Blocks& blocks) {
  std::set<int> out;
  for (const auto& [key, c] : blocks) out.insert(key.first);
  return out;
}

}  // namespace

double Approximant::value(double x) const {
  const DomainSpec& dom = partition.domain();
  for (int t = 0; t <= t_cut; ++t) {
    const auto comps = dom.ring(t);
    for (int j = 0; j < static_cast<int>(comps.size()); ++j) {
      if (!comps[j].contains(x)) continue;
      auto it = blocks.find({t, j});
      if (it == blocks.end()) return 0.0;
      return component_value(it->second, depths_of(it->second), comps[j], x);
    }
  }
  return 0.0;
}

void require_simulable(const SobolevProblem& p) {
  if (p.d != 1) fail(ErrorCode::unsupported_regime, "simulation runs in d = 1 only");
  if (const auto* w = std::get_if<PowerHsetWeights>(&p.weights); w && w->theta != 0.0)
    fail(ErrorCode::unsupported_regime, "simulation needs a point singular set (theta = 0)");
  if (const auto* w = std::get_if<LogHsetWeights>(&p.weights); w && w->gamma != 0.0)
    fail(ErrorCode::unsupported_regime, "simulation needs a point singular set (gamma = 0)");
}

Approximant approximate(const Function1D& f, const SobolevProblem& p, const DomainSpec& dom,
                        const RankAllocation& alloc, const QuadratureSpec& quad) {
  p.validate();
  quad.validate(p.r);
  int m_needed = 0;
  for (const auto& ra : alloc.rings) {
    m_needed = std::max(m_needed, ra.depth);
    for (const auto& cb : ra.corrections) m_needed = std::max(m_needed, cb.m + 1);
  }
  Approximant A{build_partition(dom, m_needed), p.r - 1, alloc.t_cut, {}, {}, 0};
  A.rank_per_ring.assign(std::max(alloc.t_cut + 1, 0), 0);
  const Interval sup = f.support();
  const WeightFactor v = weight_model(p).v;
  const double q = p.space.q;
  const int deg = A.degree;

  for (const auto& ra : alloc.rings) {
    std::int64_t rank = ra.main_rank;
    if (sup.length() > 0.0) {
      for (const Cell& c : A.partition.cells_meeting(ra.t, ra.depth, sup))
        A.blocks[{ra.t, c.component}][{c.m, c.index}] = l2_project(f, c.interval, deg, quad);
    }
    for (const auto& cb : ra.corrections) {
      const std::int64_t keep = cb.l / p.r;
      if (keep <= 0 || sup.length() <= 0.0) continue;
      struct Candidate {
        double norm;
        Cell cell;
        Eigen::VectorXd diff;
      };
      std::vector<Candidate> cand;
      for (const Cell& child : A.partition.cells_meeting(ra.t, cb.m + 1, sup)) {
        const Cell parent = A.partition.cell(ra.t, child.component, cb.m, child.index / 2);
        const Eigen::VectorXd cp = l2_project(f, parent.interval, deg, quad);
        const Eigen::VectorXd cc = l2_project(f, child.interval, deg, quad);
        // parent polynomial re-expanded in the child basis (exact for polynomials)
        CallableFunction parent_poly(
            [&](double x) { return cp.dot(legendre_basis(parent.interval, deg, x)); }, {},
            parent.interval);
        const Eigen::VectorXd diff = cc - l2_project(parent_poly, child.interval, deg, quad);
        const double norm_q = gauss_panel(
            [&](double x) {
              return std::pow(std::abs(v(x) * legendre_eval(diff, child.interval, x)), q);
            },
            child.interval.a, child.interval.b, quad.nodes);
        cand.push_back({norm_q, child, diff});
      }
      std::stable_sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
        return x.norm > y.norm;
      });
      const auto kept = std::min<std::int64_t>(keep, static_cast<std::int64_t>(cand.size()));
      for (std::int64_t k = 0; k < kept; ++k) {
        const Cell& c = cand[k].cell;
        A.blocks[{ra.t, c.component}][{c.m, c.index}] = cand[k].diff;
      }
      rank += kept * p.r;
    }
    A.rank_per_ring[ra.t] = rank;
    A.total_rank += rank;
  }
  return A;
}

namespace {

double raw_integral(const Function1D& f, const WeightFactor& v, double q, const Interval& span,
                    const QuadratureSpec& quad, double origin_exponent) {
  const Interval sup = f.support();
  const double a = std::max(span.a, sup.a), b = std::min(span.b, sup.b);
  if (!(a < b)) return 0.0;
  std::vector<double> cuts{a, b};
  for (double x : f.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const bool touches = cuts[i] == 0.0 || cuts[i + 1] == 0.0;
    acc += integrate([&](double x) { return std::pow(std::abs(v(x) * f.value(x)), q); }, cuts[i],
                     cuts[i + 1], quad, touches ? origin_exponent : 0.0);
  }
  return acc;
}

}  // namespace

double approximation_error(const Function1D& f, const Approximant& A, const SobolevProblem& p,
                           const QuadratureSpec& quad) {
  const DomainSpec& dom = A.partition.domain();
  const WeightFactor v = weight_model(p).v;
  const double q = p.space.q;
  const Interval sup = f.support();
  if (!(sup.length() > 0.0)) return 0.0;
  double total = 0.0;
  for (int t = 0; t <= dom.t_max; ++t) {
    const auto comps = dom.ring(t);
    for (int j = 0; j < static_cast<int>(comps.size()); ++j) {
      const Interval& comp = comps[j];
      if (!comp.overlaps(sup)) continue;
      auto it = t <= A.t_cut ? A.blocks.find({t, j}) : A.blocks.end();
      if (it == A.blocks.end()) {
        total += raw_integral(f, v, q, comp, quad, 0.0);
        continue;
      }
      const Blocks& blocks = it->second;
      const std::set<int> depths = depths_of(blocks);
      const int m0 = *depths.begin();
      auto residual = [&](double x) {
        return std::pow(std::abs(v(x) * (f.value(x) - component_value(blocks, depths, comp, x))), q);
      };
      // descend into children wherever finer blocks were stored
      std::function<double(int, std::int64_t)> walk = [&](int m, std::int64_t i) -> double {
        if (blocks.count({m + 1, 2 * i}) || blocks.count({m + 1, 2 * i + 1}))
          return walk(m + 1, 2 * i) + walk(m + 1, 2 * i + 1);
        const std::int64_t count = std::int64_t{1} << m;
        const double h = comp.length() / static_cast<double>(count);
        const double a = comp.a + h * static_cast<double>(i);
        const Interval cell{a, i + 1 == count ? comp.b : a + h};
        if (!cell.overlaps(sup)) return 0.0;
        return piecewise_gauss(f, cell, quad.nodes, residual);
      };
      const std::int64_t count = std::int64_t{1} << m0;
      const double h = comp.length() / static_cast<double>(count);
      const auto lo = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((sup.a - comp.a) / h)) - 1, 0, count - 1);
      const auto hi = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::ceil((sup.b - comp.a) / h)) + 1, 0, count - 1);
      for (std::int64_t i = lo; i <= hi; ++i) total += walk(m0, i);
    }
  }
  const WeightFactor& vv = v;
  for (const Interval& tail : dom.tail())
    total += raw_integral(f, vv, q, tail, quad, vv.origin_exponent(q));
  if (!std::isfinite(total)) fail(ErrorCode::numeric, "error integral is not finite");
  return std::pow(total, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Experiments

RankAllocation allocate_for(const SobolevProblem& p, const DomainSpec& dom, std::int64_t n,
                            const ExperimentOptions& opts) {
  const AbstractParams a = problem_to_abstract(p);
  const CriticalScales cs = critical_scales(a, p.space, static_cast<double>(n));
  const ExponentProfile prof =
      exponent_profile(p.space, p.s_star(), concrete_exponents(p), opts.profile);
  return rank_allocation(cs, prof, p.r, dom, opts.allocation);
}

ExperimentResult run_experiment(const SobolevProblem& p, const DomainSpec& dom,
                                const std::vector<std::int64_t>& budgets, const Ensemble& ensemble,
                                const ExperimentOptions& opts) {
  p.validate();
  require_simulable(p);
  dom.validate();
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 2) fail(ErrorCode::validation, "budgets must be >= 2");
    if (i > 0 && budgets[i] <= budgets[i - 1])
      fail(ErrorCode::validation, "budgets must be strictly increasing");
  }
  ExperimentResult res;
  res.profile = exponent_profile(p.space, p.s_star(), concrete_exponents(p), opts.profile);

  const std::size_t count = ensemble.members.size();
  std::vector<MembershipNorms> norms(count);
  parallel_for(count, [&](std::size_t i) {
    norms[i] = check_membership(*ensemble.members[i], p, dom, opts.quadrature);
  });
  for (std::size_t i = 0; i < count; ++i) {
    if (!norms[i].inside(opts.membership_slack)) {
      const std::string label = i < ensemble.labels.size() ? ensemble.labels[i] : std::to_string(i);
      fail(ErrorCode::validation, "ensemble member " + label + " lies outside M");
    }
  }

  for (std::int64_t n : budgets) {
    const auto start = std::chrono::steady_clock::now();
    RankAllocation alloc = allocate_for(p, dom, n, opts);
    std::vector<double> errors(count, 0.0);
    std::vector<std::int64_t> ranks(count, 0);
    parallel_for(count, [&](std::size_t i) {
      const Approximant A = approximate(*ensemble.members[i], p, dom, alloc, opts.quadrature);
      errors[i] = approximation_error(*ensemble.members[i], A, p, opts.quadrature);
      ranks[i] = A.total_rank;
    });
    ExperimentRow row;
    row.n = n;
    row.error = count ? *std::max_element(errors.begin(), errors.end()) : 0.0;
    row.rank = alloc.total_rank;
    for (std::int64_t r : ranks)
      if (r > row.rank) fail(ErrorCode::allocation, "approximant rank exceeds its allocation");
    row.C = alloc.C;
    row.C_model = alloc.C_model;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.rows.push_back(row);
    res.allocations.push_back(std::move(alloc));
  }
  return res;
}

}  // namespace widthlab
