#include "arcvar/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace arcvar {

std::size_t guarded_floor(std::size_t count, double fraction) {
  const double product = static_cast<double>(count) * fraction;
  // Products that should be integral may land a few ulps below the integer.
  const double nudged = product + 1e-9 * std::max(1.0, product);
  return static_cast<std::size_t>(std::floor(nudged));
}

std::size_t order_stat_rank(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return std::clamp<std::size_t>(guarded_floor(n, alpha), 1, std::max<std::size_t>(n, 1));
}

double kth_smallest(std::span<const double> values, std::size_t k) {
  if (k < 1 || k > values.size()) throw std::out_of_range("order statistic index out of range");
  std::vector<double> copy(values.begin(), values.end());
  auto nth = copy.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(copy.begin(), nth, copy.end());
  return *nth;
}

}  // namespace arcvar
