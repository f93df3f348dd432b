#pragma once

// Nonparametric pairs bootstrap. Whole rows (y, x, w, group) are resampled
// and the ranks are recomputed on every resample; resampling precomputed
// ranks understates the variance.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rankreg/estimators.hpp"
#include "rankreg/inference.hpp"

namespace rankreg {

enum class CiKind { Percentile, NormalWithBootstrapSE };

std::string_view to_string(CiKind k);
/// Accepts "percentile" and "normal".
CiKind parse_ci_kind(std::string_view name);

struct BootstrapPlan {
  int reps = 999;
  std::uint64_t seed = 1;
  CiKind ci_kind = CiKind::Percentile;
  double alpha = 0.05;
  unsigned threads = 1;  // 0 = all hardware threads; output does not depend on it

  /// Throws InvalidInput unless reps >= 1 and 0 < alpha < 1.
  void validate() const;
};

struct BootstrapDraws {
  Eigen::MatrixXd replicates;  // reps x q, one row per resample
  std::vector<std::string> names;
  int rejected = 0;            // degenerate resamples that were redrawn
};

/// Maps a resampled dataset to the statistic vector. Must throw
/// SingularDesign, AssumptionViolation or DegenerateInput for a degenerate
/// resample so it can be redrawn.
using ReplicateStatistic = std::function<Eigen::VectorXd(const Dataset&)>;

/// Default statistic: every coefficient of fit(spec, resample, rule).
BootstrapDraws bootstrap_distribution(const Dataset& d, Spec spec, TieRule rule,
                                      const BootstrapPlan& plan);

/// Generic driver. Replicate b draws from Rng::stream(plan.seed, b); a
/// degenerate resample is redrawn from the same stream. More than
/// 10% rejections relative to reps throws ResamplingFailure.
BootstrapDraws bootstrap_distribution(const Dataset& d, const ReplicateStatistic& stat,
                                      std::vector<std::string> names,
                                      const BootstrapPlan& plan);

/// Row indices of resample b, before any redraw.
std::vector<Eigen::Index> bootstrap_indices(Eigen::Index n, std::uint64_t seed,
                                            std::uint64_t replicate);

/// Percentile: type-1 empirical quantiles at alpha/2 and 1 - alpha/2
/// (order statistic ceil(q B)); needs B >= 50.
/// NormalWithBootstrapSE: point +/- z_{alpha/2} * sd(replicates); needs B >= 2.
Interval bootstrap_ci(std::span<const double> replicates, double point,
                      const BootstrapPlan& plan);

/// Type-1 empirical quantile: the ceil(q B)-th order statistic.
double empirical_quantile(std::span<const double> values, double q);

/// Sample standard deviation with divisor B - 1.
double sample_sd(std::span<const double> values);

/// Bootstrap report on the sqrt(n) scale: variance = n * Cov(replicates);
/// intervals follow plan.ci_kind.
InferenceReport bootstrap_report(const BootstrapDraws& draws, const Eigen::VectorXd& point,
                                 Eigen::Index n, const BootstrapPlan& plan);

}  // namespace rankreg
