#include "widthlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "widthlab/common.hpp"
#include "widthlab/errors.hpp"

namespace widthlab {

void DomainSpec::validate() const {
  if (t_max < 2) fail(ErrorCode::validation, "t_max must be >= 2");
  if (log_rings && geometry != Geometry::interval_singular_origin)
    fail(ErrorCode::validation, "log rings exist only on the singular interval");
  // Ring t of the log structure reaches down to 2^{-2^{t+1}+1}.
  const int cap = log_rings ? 8 : 60;
  if (t_max > cap) fail(ErrorCode::size_limit, "t_max exceeds the resolvable range");
}

Interval DomainSpec::extent() const {
  if (geometry == Geometry::real_line) {
    const double R = std::exp2(t_max);
    return {-R, R};
  }
  return {0.0, 1.0};
}

std::vector<Interval> DomainSpec::ring(int t) const {
  if (t < 0) fail(ErrorCode::validation, "ring index must be >= 0");
  if (geometry == Geometry::real_line) {
    if (t == 0) return {{-1.0, 1.0}};
    const double lo = std::exp2(t - 1), hi = std::exp2(t);
    return {{-hi, -lo}, {lo, hi}};
  }
  if (!log_rings) return {{std::exp2(-t - 1), std::exp2(-t)}};
  std::vector<Interval> shells;
  const long first = (1L << t) - 1, last = (1L << (t + 1)) - 2;
  for (long i = last; i >= first; --i)
    shells.push_back({std::exp2(-static_cast<double>(i) - 1), std::exp2(-static_cast<double>(i))});
  return shells;
}

std::vector<Interval> DomainSpec::tail() const {
  if (geometry == Geometry::real_line) return {};
  return {{0.0, ring(t_max).front().a}};
}

const char* to_string(DomainSpec::Geometry g) noexcept {
  return g == DomainSpec::Geometry::real_line ? "real_line" : "interval_singular_origin";
}

DomainSpec default_domain(const SobolevProblem& p, int t_max) {
  DomainSpec dom;
  dom.t_max = t_max;
  switch (p.kind()) {
    case ProblemKind::power_rd:
      dom.geometry = DomainSpec::Geometry::real_line;
      break;
    case ProblemKind::log_hset:
      dom.log_rings = true;
      dom.t_max = std::min(t_max, 8);
      break;
    case ProblemKind::power_hset:
      break;
  }
  return dom;
}

double WeightFactor::operator()(double x) const {
  const double ax = std::abs(x);
  if (whole_line) return std::pow(1.0 + ax, power);
  double v = std::pow(ax, -power);
  if (log_power != 0.0) v *= std::pow(std::abs(std::log(ax / 2.0)), log_power);
  return v;
}

double WeightFactor::origin_exponent(double e) const {
  return whole_line ? 0.0 : power * e;
}

WeightModel weight_model(const SobolevProblem& p) {
  return std::visit(
      [](const auto& w) -> WeightModel {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, PowerHsetWeights>) {
          return {{false, w.beta, 0.0}, {false, w.sigma, 0.0}, {false, w.lambda, 0.0}};
        } else if constexpr (std::is_same_v<W, LogHsetWeights>) {
          return {{false, w.beta, w.mu}, {false, w.sigma, w.alpha}, {false, w.lambda, w.nu}};
        } else {
          return {{true, w.beta, 0.0}, {true, w.sigma, 0.0}, {true, w.lambda, 0.0}};
        }
      },
      p.weights);
}

namespace {

/// Pieces of supp f inside the domain, split at f's breakpoints and at 0.
std::vector<Interval> pieces(const Function1D& f, const DomainSpec& dom) {
  const Interval ext = dom.extent();
  const Interval sup = f.support();
  const double a = std::max(ext.a, sup.a), b = std::min(ext.b, sup.b);
  if (!(a < b)) return {};
  std::vector<double> cuts{a, b};
  for (double x : f.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  if (a < 0.0 && b > 0.0) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.push_back({cuts[i], cuts[i + 1]});
  return out;
}

double eval(const Function1D& f, double x, int k) {
  if (k == 0) return f.value(x);
  const auto d = f.derivative(x, k);
  if (!d) fail(ErrorCode::input, "function carries no derivative data");
  return *d;
}

}  // namespace

double weighted_norm(const Function1D& f, const WeightFactor& weight, double e,
                     const DomainSpec& dom, const QuadratureSpec& quad, int k) {
  if (!(e >= 1.0)) fail(ErrorCode::validation, "norm exponent must be >= 1");
  if (k > 0 && !f.derivative(0.5 * (f.support().a + f.support().b), k))
    fail(ErrorCode::input, "function carries no derivative data");
  const auto parts = pieces(f, dom);
  if (std::isinf(e)) {
    double sup = 0.0;
    for (const auto& piece : parts)
      for (double x : sample_points(piece.a, piece.b, quad))
        sup = std::max(sup, std::abs(weight(x) * eval(f, x, k)));
    return sup;
  }
  double acc = 0.0;
  for (const auto& piece : parts) {
    const bool at_origin = !weight.whole_line && (piece.a == 0.0 || piece.b == 0.0);
    const double s = at_origin ? weight.origin_exponent(e) : 0.0;
    acc += integrate(
        [&](double x) { return std::pow(std::abs(weight(x) * eval(f, x, k)), e); }, piece.a,
        piece.b, quad, s);
  }
  return std::pow(acc, 1.0 / e);
}

MembershipNorms check_membership(const Function1D& f, const SobolevProblem& p,
                                 const DomainSpec& dom, const QuadratureSpec& quad) {
  const WeightModel m = weight_model(p);
  MembershipNorms out;
  out.sobolev_norm = weighted_norm(f, m.g.inverse(), p.space.p1, dom, quad, p.r);
  out.weighted_p0_norm = weighted_norm(f, m.w, p.space.p0, dom, quad, 0);
  return out;
}

}  // namespace widthlab
