#pragma once

#include <vector>

namespace wgqed {

// g2(tau) table. Histogram-based estimates carry raw coincidence counts
// and the expected-per-bin normalization for uncorrelated streams;
// analytic (regression-theorem) curves leave those empty.
struct CorrelationFunction {
  std::vector<double> taus_ns;
  std::vector<double> g2;
  std::vector<double> counts;
  double normalization_per_bin = 0.0;
};

} // namespace wgqed
