#pragma once

// Data generators shared by the unit and acceptance tests.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rankreg/estimators.hpp"
#include "rankreg/rng.hpp"

namespace fixtures {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline std::span<const double> span_of(const VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline rankreg::Dataset bivariate(const VectorXd& y, const VectorXd& x) {
  rankreg::Dataset d;
  d.y = y;
  d.x = x;
  d.w = MatrixXd::Ones(y.size(), 1);
  d.w_names = {"intercept"};
  return d;
}

inline VectorXd table2_sample() {
  VectorXd x(10);
  x << 3, 4, 7, 7, 10, 11, 15, 15, 15, 15;
  return x;
}

/// Education-like marginal on 7 support points.
inline const std::vector<double>& seven_point_pmf() {
  static const std::vector<double> pmf{0.05, 0.10, 0.30, 0.20, 0.15, 0.12, 0.08};
  return pmf;
}

inline int draw_discrete(rankreg::Rng& rng, const std::vector<double>& pmf) {
  double u = rng.uniform();
  for (std::size_t k = 0; k + 1 < pmf.size(); ++k) {
    if (u < pmf[k]) return static_cast<int>(k);
    u -= pmf[k];
  }
  return static_cast<int>(pmf.size()) - 1;
}

struct FuzzCase {
  rankreg::Dataset data;
  rankreg::Spec spec;
  bool ties;
  int covariates;
};

/// Random dataset with n in [20, 120], optional ties (including a 7-point
/// marginal), 0 to 3 covariates besides the intercept and, for the grouped
/// spec, 2 or 3 groups.
inline FuzzCase fuzz_case(std::uint64_t seed, rankreg::Spec spec) {
  rankreg::Rng rng = rankreg::Rng::stream(seed, static_cast<std::uint64_t>(spec));
  const Index n = 20 + static_cast<Index>(rng.below(101));
  const bool ties = rng.bernoulli(0.5);
  const int k = static_cast<int>(rng.below(4));
  FuzzCase fc{{}, spec, ties, k};
  rankreg::Dataset& d = fc.data;
  d.y.resize(n);
  d.x.resize(n);
  d.w.resize(n, 1 + k);
  d.w.col(0).setOnes();
  d.w_names = {"intercept"};
  for (int c = 0; c < k; ++c) d.w_names.push_back("w" + std::to_string(c + 1));
  for (Index i = 0; i < n; ++i) {
    const double z = rng.normal();
    d.x(i) = ties ? static_cast<double>(draw_discrete(rng, seven_point_pmf())) : z;
    for (int c = 0; c < k; ++c) {
      d.w(i, 1 + c) = c == 1 ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : 0.4 * z + rng.normal();
    }
    const double y = 0.5 * d.x(i) + (k > 0 ? 0.3 * d.w(i, 1) : 0.0) + rng.normal();
    d.y(i) = ties ? std::round(2.0 * y) / 2.0 : y;
  }
  if (spec == rankreg::Spec::RankRankByGroup) {
    const int groups = 2 + static_cast<int>(rng.below(2));
    std::vector<long long> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = 1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(groups)));
    d.groups = rankreg::GroupLabels::from_integers(labels);
  }
  return fc;
}

/// group index per row (all zero when ungrouped) and the group count.
inline std::pair<std::vector<int>, int> group_ids(const rankreg::Dataset& d) {
  if (!d.groups) return {std::vector<int>(static_cast<std::size_t>(d.n()), 0), 1};
  return {d.groups->index, d.groups->count()};
}

}  // namespace fixtures
