#include <algorithm>
#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "oracles/brute_force.hpp"
#include "rankreg/errors.hpp"
#include "rankreg/ranks.hpp"
#include "rankreg/rng.hpp"
#include "support/fixtures.hpp"

using namespace rankreg;
using Catch::Approx;

namespace {

const std::vector<double> kTable{3, 4, 7, 7, 10, 11, 15, 15, 15, 15};

std::vector<double> random_sample(Rng& rng, std::size_t n, bool ties) {
  std::vector<double> s(n);
  for (auto& v : s) v = ties ? static_cast<double>(rng.below(6)) : rng.normal();
  return s;
}

}  // namespace

TEST_CASE("ecdf and its left limit on the tied fixture") {
  CHECK(ecdf(kTable, 7) == 0.4);
  CHECK(ecdf_left(kTable, 7) == 0.2);
  CHECK(ecdf(std::vector<double>{5}, 5) == 1.0);
  CHECK(ecdf_left(std::vector<double>{5}, 5) == 0.0);
  CHECK(ecdf(std::vector<double>{1, 2, 3}, 0) == 0.0);
  CHECK(ecdf_left(std::vector<double>{1, 2, 3}, 10) == 1.0);
  CHECK_THROWS_AS(ecdf(std::vector<double>{}, 1.0), InvalidInput);
  CHECK_THROWS_AS(ecdf_left(std::vector<double>{NAN}, 1.0), InvalidInput);
}

TEST_CASE("ecdf is monotone and dominates the left limit") {
  Rng rng(11);
  const auto s = random_sample(rng, 40, true);
  double prev = 0.0;
  for (double t = -1.0; t <= 6.0; t += 0.25) {
    CHECK(ecdf_left(s, t) <= ecdf(s, t));
    CHECK(ecdf(s, t) >= prev);
    prev = ecdf(s, t);
  }
}

TEST_CASE("comparison kernel") {
  CHECK(comparison_kernel(TieRule(0.5), 3, 5) == 1.0);
  CHECK(comparison_kernel(TieRule(0.5), 5, 5) == 0.5);
  CHECK(comparison_kernel(TieRule(1.0), 7, 5) == 0.0);
}

TEST_CASE("tie rule rejects weights outside the unit interval") {
  CHECK_THROWS_AS(TieRule(-0.1), InvalidInput);
  CHECK_THROWS_AS(TieRule(1.5), InvalidInput);
  CHECK_THROWS_AS(TieRule(NAN), InvalidInput);
  CHECK(TieRule().omega() == 1.0);
}

TEST_CASE("rank transform reproduces the three tie conventions exactly") {
  CHECK(rank_transform(kTable, TieRule(0.0)) ==
        RankVector{0.1, 0.2, 0.3, 0.3, 0.5, 0.6, 0.7, 0.7, 0.7, 0.7});
  CHECK(rank_transform(kTable, TieRule(0.5)) ==
        RankVector{0.1, 0.2, 0.35, 0.35, 0.5, 0.6, 0.85, 0.85, 0.85, 0.85});
  CHECK(rank_transform(kTable, TieRule(1.0)) ==
        RankVector{0.1, 0.2, 0.4, 0.4, 0.5, 0.6, 1, 1, 1, 1});
  CHECK_THROWS_AS(rank_transform(std::vector<double>{}, TieRule()), InvalidInput);
  CHECK_THROWS_AS(rank_transform(std::vector<double>{1.0, INFINITY}, TieRule()), InvalidInput);
}

TEST_CASE("tie-free ranks are k/n for every omega") {
  Rng rng(3);
  for (double omega : {0.0, 0.3, 0.5, 1.0}) {
    const auto s = random_sample(rng, 57, false);
    const RankVector r = rank_transform(s, TieRule(omega));
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a] < s[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      CHECK(r[order[k]] == static_cast<double>(k + 1) / 57.0);
    }
  }
}

TEST_CASE("rank equals the averaged kernel plus the tie offset") {
  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(60);
    const double omega = rng.uniform();
    const auto s = random_sample(rng, n, rep % 2 == 0);
    const RankVector r = rank_transform(s, TieRule(omega));
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += comparison_kernel(TieRule(omega), s[j], s[i]);
      const double expected = acc / static_cast<double>(n) + (1.0 - omega) / static_cast<double>(n);
      REQUIRE(r[i] == Approx(expected).margin(1e-15));
      REQUIRE(r[i] > 0.0);
      REQUIRE(r[i] <= 1.0);
    }
  }
}

TEST_CASE("ranks agree with the independent oracle and ignore monotone transforms") {
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = random_sample(rng, 33, true);
    const double omega = rep / 49.0;
    const RankVector r = rank_transform(s, TieRule(omega));
    const Eigen::VectorXd o =
        oracle::ranks(Eigen::Map<const Eigen::VectorXd>(s.data(), 33), omega);
    std::vector<double> t(s);
    for (auto& v : t) v = std::exp(v) * 3.0 - 2.0;
    const RankVector rt = rank_transform(t, TieRule(omega));
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(r[i] == Approx(o(static_cast<Eigen::Index>(i))).margin(1e-15));
      CHECK(rt[i] == r[i]);
    }
  }
}

TEST_CASE("spearman correlation") {
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}, TieRule(0.3)) ==
        Approx(1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{30, 20, 10}, TieRule()) ==
        Approx(-1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3}, TieRule()) ==
        Approx(0.6).margin(1e-15));
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}, TieRule()),
                  DegenerateInput);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}, TieRule()),
                  InvalidInput);
}

TEST_CASE("spearman is symmetric and invariant to monotone transforms") {
  Rng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const auto x = random_sample(rng, 45, rep % 2 == 0);
    auto y = random_sample(rng, 45, rep % 3 == 0);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
    const TieRule rule(0.5);
    const double r = spearman(x, y, rule);
    CHECK(spearman(y, x, rule) == Approx(r).margin(1e-14));
    std::vector<double> tx(x), ty(y);
    for (auto& v : tx) v = std::atan(v);
    for (auto& v : ty) v = v * v * v + 5.0;
    CHECK(spearman(tx, ty, rule) == Approx(r).margin(1e-14));
  }
}

TEST_CASE("centered rank moments") {
  Rng rng(4);
  const auto x = random_sample(rng, 30, true);
  const auto y = random_sample(rng, 30, false);
  CHECK(std::abs(centered_rank_moment(x, y, 1, 0, TieRule())) < 1e-15);

  const std::size_t n = 1000000;
  std::vector<double> big_x(n), big_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    big_x[i] = rng.normal();
    big_y[i] = big_x[i] + rng.normal();
  }
  CHECK(centered_rank_moment(big_x, big_y, 2, 0, TieRule()) == Approx(1.0 / 12.0).margin(1e-3));
  CHECK(centered_rank_moment(big_x, big_y, 4, 0, TieRule()) == Approx(1.0 / 80.0).margin(1e-3));
}

TEST_CASE("slope decomposition") {
  SECTION("fixture with ties in x") {
    const std::vector<double> x{1, 1, 2, 3};
    const std::vector<double> y{1, 2, 3, 4};
    const SlopeDecomposition s = slope_decomposition(x, y, TieRule(1.0));
    CHECK(s.sd_ratio == Approx(1.3483997249264843).margin(1e-14));
    CHECK(s.rho_s == Approx(0.9438798074485388).margin(1e-14));
    CHECK(s.rho_hat == Approx(1.2727272727272727).margin(1e-14));
  }
  SECTION("identical samples") {
    const std::vector<double> x{4, 1, 9, 2};
    const SlopeDecomposition s = slope_decomposition(x, x, TieRule());
    CHECK(s.rho_hat == Approx(1.0));
    CHECK(s.rho_s == Approx(1.0));
    CHECK(s.sd_ratio == Approx(1.0));
  }
  SECTION("product identity on random data") {
    Rng rng(99);
    for (int rep = 0; rep < 100; ++rep) {
      const auto x = random_sample(rng, 25, rep % 2 == 0);
      const auto y = random_sample(rng, 25, rep % 3 == 0);
      const double omega = rng.uniform();
      const SlopeDecomposition s = slope_decomposition(x, y, TieRule(omega));
      CHECK(std::abs(s.rho_hat - s.rho_s * s.sd_ratio) <= 1e-12);
      if (rep % 6 == 5) CHECK(s.sd_ratio == Approx(1.0).margin(1e-14));
    }
  }
}

TEST_CASE("tied observation count") {
  CHECK(tied_observations(kTable) == 6);
  CHECK(tied_observations(std::vector<double>{1, 2, 3}) == 0);
}
