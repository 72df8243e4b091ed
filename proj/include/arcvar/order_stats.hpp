#pragma once

#include <cstddef>
#include <span>

namespace arcvar {

/// floor(count * fraction), tolerant of the rounding in products such as
/// 10 * (1 - 0.9) = 0.9999999999999998.
std::size_t guarded_floor(std::size_t count, double fraction);

/// Rank k = max(1, floor(n * alpha)) of the order statistic used for VaR.
std::size_t order_stat_rank(std::size_t n, double alpha);

/// k-th smallest value (1-based). Does not modify the input.
double kth_smallest(std::span<const double> values, std::size_t k);

}  // namespace arcvar
