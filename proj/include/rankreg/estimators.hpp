#pragma once

// OLS fits for regressions involving ranks.
//
//   RankRank          R^Y on (R^X, W)
//   RankRankByGroup   R^Y on (R^X, W) separately within each group; ranks
//                     are computed on the pooled sample
//   LevelRank         Y on (R^X, W)
//   RankLevel         R^Y on W (the regressor of interest is a column of W)
//
// W is taken as given; no intercept is added here.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rankreg/ranks.hpp"

namespace rankreg {

enum class Spec { RankRank, RankRankByGroup, LevelRank, RankLevel };

std::string_view to_string(Spec spec);
/// Accepts "rank-rank", "rank-rank-group", "level-rank", "rank-level".
Spec parse_spec(std::string_view name);

/// Dense group ids with the original labels kept for reporting.
struct GroupLabels {
  std::vector<int> index;          // per observation, in [0, count())
  std::vector<std::string> names;  // original label of each dense id

  int count() const noexcept { return static_cast<int>(names.size()); }

  /// Ids follow the lexicographic order of the labels.
  static GroupLabels from_strings(const std::vector<std::string>& labels);
  /// Ids follow the numeric order of the labels.
  static GroupLabels from_integers(std::span<const long long> labels);
};

struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd x;  // unused by RankLevel
  Eigen::MatrixXd w;  // n x p covariates, may be n x 0
  std::vector<std::string> w_names;
  std::optional<GroupLabels> groups;

  Eigen::Index n() const noexcept { return y.size(); }
  Eigen::Index p() const noexcept { return w.cols(); }

  /// Checks shapes, finiteness, n >= p + 2 and, when grouped, that every
  /// group holds at least two observations. Throws InvalidInput.
  void validate(Spec spec) const;

  /// Copy restricted to the given rows, in the given order.
  Dataset subset(std::span<const Eigen::Index> rows) const;
};

struct LeastSquares {
  Eigen::VectorXd coef;
  double rcond;  // reciprocal condition number estimate of Z'Z
};

/// Least squares via column-pivoted Householder QR. Throws SingularDesign
/// naming the first dependent column when rcond(Z'Z) < 1e-12.
LeastSquares least_squares(const Eigen::MatrixXd& z, const Eigen::VectorXd& r);

inline Eigen::VectorXd ols(const Eigen::MatrixXd& z, const Eigen::VectorXd& r) {
  return least_squares(z, r).coef;
}

inline constexpr double kSingularRcond = 1e-12;

/// Projection W_l = tau * R^X + W_{-l}' delta + residual. For RankLevel
/// there is no ranked regressor and tau is zero.
struct Projection {
  double tau = 0.0;
  Eigen::VectorXd delta;
};

struct GroupFit {
  std::string label;
  std::vector<Eigen::Index> rows;
  double rho = 0.0;          // unused by RankLevel
  Eigen::VectorXd beta;      // coefficients on W
  Eigen::VectorXd gamma;     // first stage: R^X on W
  std::vector<Projection> aux;  // one per column of W
  double rcond = 1.0;
};

struct FitResult {
  Spec spec;
  TieRule rule;
  std::vector<GroupFit> groups;  // a single entry unless RankRankByGroup
  RankVector ranks_x;            // empty for RankLevel
  RankVector ranks_y;            // empty for LevelRank
  Eigen::VectorXd residuals;     // each row against its own group's fit

  bool has_ranked_regressor() const noexcept { return spec != Spec::RankLevel; }
  bool has_ranked_outcome() const noexcept { return spec != Spec::LevelRank; }

  /// Coefficients per group stacked group-major: (rho_g, beta_g) with rho
  /// omitted for RankLevel.
  Eigen::VectorXd coefficients() const;
  Eigen::Index coefficients_per_group() const;
  std::vector<std::string> coefficient_names(
      const std::vector<std::string>& w_names) const;
};

FitResult fit_rank_rank(const Dataset& d, TieRule rule);
FitResult fit_rank_rank_by_group(const Dataset& d, TieRule rule);
FitResult fit_level_rank(const Dataset& d, TieRule rule);
FitResult fit_rank_level(const Dataset& d, TieRule rule);

/// Dispatches on spec.
FitResult fit(Spec spec, const Dataset& d, TieRule rule);

/// Fits with externally supplied ranks. Pass an empty vector for the rank
/// a spec does not use.
FitResult fit_with_ranks(Spec spec, const Dataset& d, TieRule rule,
                         RankVector ranks_x, RankVector ranks_y);

/// theta_p = beta + rho * p, the expected outcome rank at regressor rank p.
double mobility_theta(double beta_intercept, double rho, double p);

}  // namespace rankreg
