#include "widthlab/rate_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "widthlab/errors.hpp"

namespace widthlab {

RateFit fit_rate(std::vector<std::pair<double, double>> pairs, const WindowPolicy& policy) {
  if (!(policy.drop_fraction >= 0.0 && policy.drop_fraction < 1.0))
    fail(ErrorCode::validation, "drop fraction must lie in [0, 1)");
  if (pairs.size() < std::max<std::size_t>(policy.min_pairs, 2))
    fail(ErrorCode::validation, "rate fit needs at least " + std::to_string(policy.min_pairs) +
                                    " pairs");
  for (const auto& [n, v] : pairs)
    if (!(n > 0.0) || !(v > 0.0) || !std::isfinite(n) || !std::isfinite(v))
      fail(ErrorCode::domain, "rate fit needs positive finite n and values");
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  auto drop = static_cast<std::size_t>(std::floor(policy.drop_fraction * pairs.size()));
  drop = std::min(drop, pairs.size() - 2);
  const auto first = pairs.begin() + static_cast<std::ptrdiff_t>(drop);

  const Eigen::Index k = static_cast<Eigen::Index>(pairs.end() - first);
  Eigen::MatrixXd X(k, 2);
  Eigen::VectorXd y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log2(first[i].first);
    y[i] = std::log2(first[i].second);
  }
  if (X.col(1).maxCoeff() - X.col(1).minCoeff() <= 0.0)
    fail(ErrorCode::degenerate, "rate fit needs at least two distinct n");
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  RateFit fit;
  fit.intercept = beta[0];
  fit.slope = beta[1];
  fit.n_min = first->first;
  fit.n_max = pairs.back().first;
  fit.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(k));
  fit.used = static_cast<std::size_t>(k);
  return fit;
}

}  // namespace widthlab
