#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rankreg/ranks.hpp"

namespace rankreg {

/// Evaluates weighted comparison-kernel sums over a fixed sample,
///
///   out_i = sum_j I(v_i, v_j) * c_j
///         = omega * sum_{v_j >= v_i} c_j + (1 - omega) * sum_{v_j > v_i} c_j,
///
/// in O(n log n) per weight vector instead of O(n^2). The sample is sorted
/// once; each call builds suffix sums of the weights in sorted order and
/// reads them at the boundaries of each observation's tie block.
class ComparisonSums {
 public:
  ComparisonSums(std::span<const double> values, TieRule rule);

  std::size_t size() const noexcept { return order_.size(); }

  Eigen::VectorXd operator()(const Eigen::VectorXd& weights) const;

 private:
  TieRule rule_;
  std::vector<std::size_t> order_;
  // Sorted positions: first element >= v_i and first element > v_i.
  std::vector<std::size_t> block_begin_;
  std::vector<std::size_t> block_end_;
};

}  // namespace rankreg
