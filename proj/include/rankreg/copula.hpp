#pragma once

// Copula simulation lab: samplers, population variance oracles for the
// rank-rank slope, variance curves, calibration and coverage experiments.
//
// With U = F_X(X) and V = F_Y(Y) the asymptotic variance of the bivariate
// rank-rank slope is 144 Var(h(U, V)) where
//
//   h(u, v) = u v - E[1{U <= u} V] - E[1{V <= v} U],
//
// while the classical formulas converge to 1 - rho^2 (homoskedastic) and
// 144 (M22 - 2 rho M31 + rho^2 / 80) (Eicker-White), with M_kl the centred
// moments E[(U - 1/2)^k (V - 1/2)^l].

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rankreg/inference.hpp"
#include "rankreg/ranks.hpp"
#include "rankreg/resampling.hpp"
#include "rankreg/rng.hpp"

namespace rankreg {

enum class Family { Gaussian, StudentT1, Quadratic, Lemma2, Independence };

std::string_view to_string(Family f);
/// Accepts "gaussian", "t1", "quadratic", "lemma2", "independence".
Family parse_family(std::string_view name);

/// Closed parameter interval of a family. Lemma2 is open at both ends and
/// Independence ignores its parameter.
std::pair<double, double> family_range(Family f);

struct CopulaModel {
  Family family = Family::Independence;
  double param = 0.0;

  /// Throws InvalidInput when param is outside the family range.
  void validate() const;
};

struct CopulaSample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Underlying independent draws. Every family is a deterministic transform
/// of these, so a fixed seed gives common random numbers across parameters.
struct BaseDraws {
  Eigen::VectorXd u;   // U(0,1)
  Eigen::VectorXd z1;  // N(0,1)
  Eigen::VectorXd z2;  // N(0,1)
  Eigen::VectorXd z3;  // N(0,1), shared chi-square(1) mixing for StudentT1
};

BaseDraws draw_base(Eigen::Index n, Rng& rng);
CopulaSample transform_base(const CopulaModel& model, const BaseDraws& base);

/// n i.i.d. pairs from the model:
///   Gaussian      (Z1, theta Z1 + sqrt(1 - theta^2) Z2)
///   StudentT1     Gaussian pair divided by |Z3|
///   Quadratic     X ~ U[-1/2, 1/2], Y = 1/2 + theta X + (1 - theta) X^2 + eps,
///                 eps ~ N(0, 1e-6)
///   Lemma2        X ~ U[0, 1], Y = (a - X) 1{X <= a} + X 1{X > a}
///   Independence  (U, Z2)
CopulaSample sample_copula(const CopulaModel& model, Eigen::Index n, std::uint64_t seed);

struct VarianceTriple {
  double sigma2 = 0.0;
  double sigma2_hom = 0.0;
  double sigma2_ew = 0.0;
  double rho = 0.0;
};

/// Exact values for the Lemma2 construction, 0 < a < 1.
VarianceTriple lemma2_closed_forms(double a);

/// Population quantities estimated from a single sample; ranks / n stand in
/// for U and V and the conditional expectations in h come from one sorted
/// pass per margin.
VarianceTriple variance_triple_from_sample(std::span<const double> x,
                                           std::span<const double> y);

/// Requires n_mc >= 10^4.
VarianceTriple variance_triple_mc(const CopulaModel& model, Eigen::Index n_mc,
                                  std::uint64_t seed);

struct CurvePoint {
  double param;
  VarianceTriple value;
};

/// 41 equally spaced points: [0, 1] for Gaussian, StudentT1 and Quadratic,
/// [0.02, 0.98] for Lemma2.
std::vector<double> default_curve_grid(Family f);

/// One triple per grid point, all from the same seed (common random
/// numbers keep the curve smooth).
std::vector<CurvePoint> variance_curve(Family f, std::span<const double> grid,
                                       Eigen::Index n_mc, std::uint64_t seed,
                                       unsigned threads = 1);

/// Population Spearman correlation, which is also the population rank-rank
/// slope. Exact for Independence, Gaussian ((6 / pi) asin(theta / 2)) and
/// Lemma2 (1 - 2 a^3); otherwise a 10^6-draw Monte Carlo with a fixed seed,
/// cached per model.
double population_rank_correlation(const CopulaModel& model);

/// Rank correlation of a common-random-numbers sample of size n_mc.
double mc_rank_correlation(const CopulaModel& model, const BaseDraws& base);

struct CalibrationOptions {
  double tolerance = 0.005;
  Eigen::Index n_mc = 200000;
  std::uint64_t seed = 20240101;
  int max_iterations = 200;
};

/// Bisection on the Monte Carlo rank correlation over the family range.
/// Throws CalibrationFailure when the target is not bracketed.
double calibrate_parameter(Family f, double target, const CalibrationOptions& opt = {});

struct CoverageRow {
  Method method;
  double coverage = 0.0;
  double mc_se = 0.0;       // sqrt(c (1 - c) / reps)
  double mean_width = 0.0;
  double mean_se = 0.0;     // mean se on the sqrt(n) scale
  int failures = 0;         // reps where the method could not be computed
};

struct CoverageConfig {
  CopulaModel model;
  Eigen::Index n = 1000;
  int reps = 1000;
  std::vector<Method> methods{Method::Plugin, Method::Hom, Method::EW};
  double alpha = 0.05;
  TieRule rule{};
  std::uint64_t seed = 1;
  int bootstrap_reps = 199;
  CiKind bootstrap_ci = CiKind::Percentile;
  unsigned threads = 1;
};

struct CoverageResult {
  double truth = 0.0;
  std::vector<CoverageRow> rows;  // in the order of config.methods
};

/// Rank-rank regression with an intercept on reps samples of size n;
/// records whether each method's interval covers the population slope.
CoverageResult coverage_experiment(const CoverageConfig& config);

}  // namespace rankreg
