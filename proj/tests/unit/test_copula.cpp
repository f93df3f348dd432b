#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <catch_amalgamated.hpp>

#include "rankreg/copula.hpp"
#include "rankreg/errors.hpp"
#include "support/fixtures.hpp"

using namespace rankreg;
using Catch::Approx;

namespace {

double sample_spearman(const CopulaModel& m, Eigen::Index n, std::uint64_t seed) {
  const CopulaSample s = sample_copula(m, n, seed);
  return spearman(fixtures::span_of(s.x), fixtures::span_of(s.y), TieRule());
}

}  // namespace

TEST_CASE("samplers") {
  CHECK(std::abs(sample_spearman({Family::Gaussian, 0.0}, 100000, 1)) < 0.01);
  CHECK(sample_spearman({Family::Lemma2, 0.5}, 100000, 2) == Approx(0.75).margin(0.01));
  CHECK(sample_spearman({Family::Quadratic, 1.0}, 100000, 3) >= 0.999);
  CHECK(sample_spearman({Family::StudentT1, 0.5}, 100000, 4) > 0.2);
  CHECK_THROWS_AS(sample_copula({Family::Gaussian, 1.5}, 10, 1), InvalidInput);
  CHECK_THROWS_AS(sample_copula({Family::Lemma2, 1.0}, 10, 1), InvalidInput);
  CHECK_THROWS_AS(sample_copula({Family::Quadratic, -0.1}, 10, 1), InvalidInput);
  const CopulaSample a = sample_copula({Family::StudentT1, 0.3}, 50, 8);
  const CopulaSample b = sample_copula({Family::StudentT1, 0.3}, 50, 8);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
}

TEST_CASE("closed forms of the piecewise construction") {
  const VarianceTriple h = lemma2_closed_forms(0.5);
  CHECK(h.sigma2 == Approx(0.5625).epsilon(1e-14));
  CHECK(h.sigma2_hom == Approx(0.4375).epsilon(1e-14));
  CHECK(h.sigma2_ew == Approx(0.375).epsilon(1e-14));
  CHECK(h.rho == Approx(0.75).epsilon(1e-14));

  // Horner evaluation of the same polynomial as a second path.
  const double a = 0.2;
  const double ew = 144.0 * a * a * a *
                    (1.0 / 12.0 + a * (-1.0 / 6.0 + a * (2.0 / 15.0 + a * (-9.0 / 20.0 + a * (1.0 - 3.0 * a / 5.0)))));
  const VarianceTriple t = lemma2_closed_forms(a);
  CHECK(t.sigma2_ew == Approx(ew).margin(1e-6));
  CHECK(t.sigma2_ew == Approx(0.0612188).margin(1e-6));
  CHECK(t.sigma2 == Approx(0.009216).margin(1e-12));
  CHECK(t.sigma2_hom == Approx(0.031744).margin(1e-12));

  CHECK(lemma2_closed_forms(0.1).sigma2_hom / lemma2_closed_forms(0.1).sigma2 >
        lemma2_closed_forms(0.5).sigma2_hom / lemma2_closed_forms(0.5).sigma2);
  CHECK_THROWS_AS(lemma2_closed_forms(0.0), InvalidInput);
  CHECK_THROWS_AS(lemma2_closed_forms(1.2), InvalidInput);
}

TEST_CASE("Monte Carlo variance triple") {
  SECTION("independence") {
    const VarianceTriple v = variance_triple_mc({Family::Independence, 0.0}, 200000, 5);
    CHECK(v.sigma2 == Approx(1.0).margin(0.05));
    CHECK(v.sigma2_hom == Approx(1.0).margin(0.05));
    CHECK(v.sigma2_ew == Approx(1.0).margin(0.05));
    CHECK(v.rho == Approx(0.0).margin(0.01));
  }
  SECTION("closed forms across the construction parameter") {
    for (double a : {0.2, 0.5, 0.8}) {
      const VarianceTriple mc = variance_triple_mc({Family::Lemma2, a}, 500000, 6);
      const VarianceTriple cf = lemma2_closed_forms(a);
      INFO("a = " << a);
      CHECK(mc.sigma2 == Approx(cf.sigma2).margin(0.02));
      CHECK(mc.sigma2_hom == Approx(cf.sigma2_hom).margin(0.02));
      CHECK(mc.sigma2_ew == Approx(cf.sigma2_ew).margin(0.02));
      CHECK(mc.rho == Approx(cf.rho).margin(0.01));
    }
  }
  SECTION("marginal transforms change nothing") {
    const CopulaSample s = sample_copula({Family::Gaussian, 0.5}, 20000, 7);
    const Eigen::VectorXd tx = s.x.array().exp();
    const Eigen::VectorXd ty = s.y.array().atan();
    const VarianceTriple a = variance_triple_from_sample(fixtures::span_of(s.x), fixtures::span_of(s.y));
    const VarianceTriple b = variance_triple_from_sample(fixtures::span_of(tx), fixtures::span_of(ty));
    CHECK(a.sigma2 == b.sigma2);
    CHECK(a.sigma2_ew == b.sigma2_ew);
    CHECK(a.rho == b.rho);
  }
  CHECK_THROWS_AS(variance_triple_mc({Family::Gaussian, 0.2}, 100, 1), InvalidInput);
}

TEST_CASE("variance curves") {
  const std::vector<double> grid = default_curve_grid(Family::Gaussian);
  REQUIRE(grid.size() == 41);
  const auto curve = variance_curve(Family::Gaussian, grid, 100000, 3, 2);
  CHECK(curve[0].value.sigma2 == Approx(1.0).margin(0.05));
  CHECK(curve[0].value.sigma2_hom == Approx(1.0).margin(0.05));
  CHECK(curve[0].value.sigma2_ew == Approx(1.0).margin(0.05));
  // Smoothness: no jump exceeds five times the median neighbour difference.
  std::vector<double> diffs;
  for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
    diffs.push_back(std::abs(curve[k].value.sigma2 - curve[k - 1].value.sigma2));
  }
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (double d : diffs) CHECK(d <= 5.0 * median + 1e-3);
  const auto serial = variance_curve(Family::Gaussian, grid, 100000, 3, 1);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(serial[k].value.sigma2 == curve[k].value.sigma2);

  // The bivariate t with a shared mixing variable is uncorrelated but not
  // independent at zero, so only the classical formulas sit at one.
  const std::vector<double> t0{0.0};
  const auto t = variance_curve(Family::StudentT1, t0, 200000, 4);
  CHECK(t[0].value.rho == Approx(0.0).margin(0.01));
  CHECK(t[0].value.sigma2_hom == Approx(1.0).margin(0.01));
  CHECK(t[0].value.sigma2 > 1.2);
}

TEST_CASE("calibrated families order the three variances as expected") {
  const double q = calibrate_parameter(Family::Quadratic, 0.384);
  const VarianceTriple vq = variance_triple_mc({Family::Quadratic, q}, 500000, 9);
  CHECK(vq.sigma2_hom < vq.sigma2);
  CHECK(vq.sigma2_ew < vq.sigma2);

  const double t = calibrate_parameter(Family::StudentT1, 0.384);
  const VarianceTriple vt = variance_triple_mc({Family::StudentT1, t}, 500000, 9);
  CHECK(vt.sigma2_hom < vt.sigma2);
  CHECK(vt.sigma2_ew == Approx(vt.sigma2).epsilon(0.1));

  const double g = calibrate_parameter(Family::Gaussian, 0.384);
  const VarianceTriple vg = variance_triple_mc({Family::Gaussian, g}, 500000, 9);
  CHECK(vg.sigma2_hom > vg.sigma2);
  CHECK(vg.sigma2_ew > vg.sigma2);
  // sigma2 is about 0.764 here against 1 - rho^2 = 0.853.
  CHECK(vg.sigma2_hom < 1.15 * vg.sigma2);
  CHECK(vg.sigma2_ew < 1.15 * vg.sigma2);
}

TEST_CASE("calibration") {
  CHECK(calibrate_parameter(Family::Gaussian, 0.0) == Approx(0.0).margin(0.01));
  CalibrationOptions tight;
  tight.tolerance = 1e-4;
  tight.n_mc = 2000000;
  CHECK(calibrate_parameter(Family::Lemma2, 0.75, tight) == Approx(0.5).margin(1e-3));
  const double g = calibrate_parameter(Family::Gaussian, 0.384, tight);
  CHECK(g == Approx(2.0 * std::sin(std::numbers::pi * 0.384 / 6.0)).margin(0.005));
  CHECK(calibrate_parameter(Family::Gaussian, 0.2) < g);
  CHECK(calibrate_parameter(Family::Gaussian, 0.6) > g);
  CHECK_THROWS_AS(calibrate_parameter(Family::Quadratic, -0.5), CalibrationFailure);
  CHECK_THROWS_AS(calibrate_parameter(Family::Independence, 0.1), CalibrationFailure);

  for (Family f : {Family::Gaussian, Family::StudentT1, Family::Quadratic, Family::Lemma2}) {
    for (double target : {0.2, 0.384, 0.6}) {
      const double p = calibrate_parameter(f, target);
      INFO(to_string(f) << " target " << target);
      CHECK(sample_spearman({f, p}, 400000, 31) == Approx(target).margin(0.01));
    }
  }
}

TEST_CASE("population rank correlation") {
  CHECK(population_rank_correlation({Family::Gaussian, 0.5}) ==
        Approx(6.0 / std::numbers::pi * std::asin(0.25)));
  CHECK(population_rank_correlation({Family::Lemma2, 0.2}) == Approx(1.0 - 2.0 * 0.008));
  const double t = population_rank_correlation({Family::StudentT1, 0.6});
  CHECK(t == population_rank_correlation({Family::StudentT1, 0.6}));
  CHECK(sample_spearman({Family::StudentT1, 0.6}, 200000, 12) == Approx(t).margin(0.01));
}

TEST_CASE("coverage experiment bookkeeping") {
  CoverageConfig c;
  c.model = {Family::Independence, 0.0};
  c.n = 200;
  c.reps = 100;
  c.methods = {Method::Plugin, Method::Hom};
  c.seed = 5;
  const CoverageResult a = coverage_experiment(c);
  c.threads = 3;
  const CoverageResult b = coverage_experiment(c);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.truth == 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.rows[k].coverage == b.rows[k].coverage);
    CHECK(a.rows[k].mean_width == b.rows[k].mean_width);
    CHECK(a.rows[k].mc_se == Approx(std::sqrt(a.rows[k].coverage * (1 - a.rows[k].coverage) / 100)));
    CHECK(a.rows[k].coverage > 0.8);
  }
}
