#include "rankreg/comparison_sums.hpp"

#include <algorithm>
#include <numeric>

#include "rankreg/errors.hpp"

namespace rankreg {

ComparisonSums::ComparisonSums(std::span<const double> values, TieRule rule)
    : rule_(rule), order_(values.size()) {
  require_finite_sample(values, "ComparisonSums");
  const std::size_t n = values.size();
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  block_begin_.resize(n);
  block_end_.resize(n);
  std::size_t lo = 0;
  while (lo < n) {
    std::size_t hi = lo + 1;
    while (hi < n && values[order_[hi]] == values[order_[lo]]) ++hi;
    for (std::size_t k = lo; k < hi; ++k) {
      block_begin_[order_[k]] = lo;
      block_end_[order_[k]] = hi;
    }
    lo = hi;
  }
}

Eigen::VectorXd ComparisonSums::operator()(const Eigen::VectorXd& weights) const {
  const std::size_t n = order_.size();
  if (static_cast<std::size_t>(weights.size()) != n) {
    throw InvalidInput("ComparisonSums: weight vector has the wrong length");
  }
  // suffix[k] = sum of weights at sorted positions >= k.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    suffix[k] = suffix[k + 1] + weights(static_cast<Eigen::Index>(order_[k]));
  }
  const double omega = rule_.omega();
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double at_or_above = suffix[block_begin_[i]];
    const double above = suffix[block_end_[i]];
    out(static_cast<Eigen::Index>(i)) = omega * at_or_above + (1.0 - omega) * above;
  }
  return out;
}

}  // namespace rankreg
