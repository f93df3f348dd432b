#pragma once

// Asymptotic inference for the fits in estimators.hpp.
//
// Every variance here lives on the sqrt(n) scale: `variance` estimates the
// asymptotic covariance of sqrt(n) * (estimate - truth) and intervals are
// estimate +/- z_{alpha/2} * se / sqrt(n).
//
// The plugin estimators account for the estimation error in the ranks. For
// the rank-rank slope the per-observation influence value is
//
//   psi_i = (H1_i + H2_i + H3_i) / sigma_nu^2
//   H1_i  = eps_i * nu_i
//   H2_i  = n^-1 sum_j (I(Y_i,Y_j) - rho I(X_i,X_j) - W_j'beta) nu_j
//   H3_i  = n^-1 sum_j eps_j (I(X_i,X_j) - W_j'gamma)
//
// with nu_j = R^X_j - W_j'gamma the first-stage residual. The other
// coefficients and specifications follow the same pattern with the
// residualised regressor of the coefficient in place of nu. The kernel sums
// are evaluated through ComparisonSums in O(n log n).

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rankreg/estimators.hpp"

namespace rankreg {

enum class Method { Plugin, Hom, EW, Bootstrap };

std::string_view to_string(Method m);
/// Accepts "plugin", "hom", "ew", "bootstrap".
Method parse_method(std::string_view name);

struct Interval {
  double lower;
  double upper;
};

struct InferenceReport {
  Method method = Method::Plugin;
  double alpha = 0.05;
  Eigen::Index n = 0;
  std::vector<std::string> names;
  Eigen::VectorXd estimates;
  Eigen::MatrixXd variance;  // symmetric, q x q
  Eigen::VectorXd se;        // sqrt of the diagonal
  std::vector<Interval> ci;
};

/// Per-observation influence values, one column per coefficient.
struct InfluenceRows {
  Eigen::MatrixXd psi;  // (h1 + h2 + h3) / scale, column-wise
  Eigen::MatrixXd h1;
  Eigen::MatrixXd h2;
  Eigen::MatrixXd h3;   // zero for RankLevel
  Eigen::VectorXd scale;  // n^-1 sum of the squared residualised regressor

  /// sigma_nu^2 of the first coefficient's regressor.
  double sigma_nu2() const { return scale(0); }
};

struct PluginResult {
  InferenceReport report;
  InfluenceRows rows;
};

/// Rank-rank slope only (1 x 1 report).
PluginResult plugin_variance_rho(const FitResult& fit, const Dataset& d,
                                 double alpha = 0.05);
/// Rank-rank, all coefficients (rho, beta_1..beta_p).
PluginResult plugin_sigma_joint(const FitResult& fit, const Dataset& d,
                                double alpha = 0.05);
/// Rank-rank by group; coefficients ordered group-major (rho_g, beta_g).
/// Cross-group blocks are generally nonzero because ranks are pooled.
PluginResult plugin_sigma_joint_groups(const FitResult& fit, const Dataset& d,
                                       double alpha = 0.05);
PluginResult plugin_variance_level_rank(const FitResult& fit, const Dataset& d,
                                        double alpha = 0.05);
PluginResult plugin_variance_rank_level(const FitResult& fit, const Dataset& d,
                                        double alpha = 0.05);

/// Dispatches on fit.spec; all coefficients.
PluginResult plugin_inference(const FitResult& fit, const Dataset& d,
                              double alpha = 0.05);

/// Classical OLS variances that treat the ranks as data. With a single
/// ranked regressor and an intercept these reduce to
///   hom: (n S_X^2)^-1 sum eps_i^2
///   EW:  (n S_X^4)^-1 sum eps_i^2 (R^X_i - mean R^X)^2.
/// Groups get block-diagonal estimates.
InferenceReport naive_hom_variance(const FitResult& fit, const Dataset& d,
                                   double alpha = 0.05);
InferenceReport naive_ew_variance(const FitResult& fit, const Dataset& d,
                                  double alpha = 0.05);

/// estimate +/- z_{alpha/2} * se / sqrt(n).
Interval confidence_interval(double estimate, double se, Eigen::Index n,
                             double alpha);

/// Delta method for w'theta: se = sqrt(w' Sigma w).
InferenceReport linear_combo_inference(const Eigen::MatrixXd& sigma,
                                       const Eigen::VectorXd& weights,
                                       const Eigen::VectorXd& estimates,
                                       Eigen::Index n, double alpha);

struct SweepRow {
  double omega;
  Eigen::VectorXd estimates;
  Eigen::VectorXd se;
};

struct SweepTable {
  std::vector<std::string> names;
  std::vector<SweepRow> rows;
  Eigen::VectorXd grid_average;  // mean estimate over the grid
};

/// One fit plus plugin inference per omega in the grid.
SweepTable omega_sweep(const Dataset& d, Spec spec, std::span<const double> grid,
                       double alpha = 0.05);

/// Builds the report fields shared by every method from a covariance.
InferenceReport make_report(Method method, std::vector<std::string> names,
                            Eigen::VectorXd estimates, Eigen::MatrixXd variance,
                            Eigen::Index n, double alpha);

}  // namespace rankreg
