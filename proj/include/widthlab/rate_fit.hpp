#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace widthlab {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log2(value) at log2(n) = 0
  double n_min = 0.0;
  double n_max = 0.0;
  double residual = 0.0;   // RMS of the log2 residuals
  std::size_t used = 0;
};

/// Which pairs enter the fit: after sorting by n, the smallest
/// floor(drop_fraction * count) pairs are discarded.
struct WindowPolicy {
  double drop_fraction = 0.25;
  std::size_t min_pairs = 4;
};

/// Least squares line through (log2 n, log2 value). Error(validation) with
/// fewer than min_pairs pairs in total, Error(domain) on a nonpositive n or
/// value.
RateFit fit_rate(std::vector<std::pair<double, double>> pairs, const WindowPolicy& policy = {});

}  // namespace widthlab
