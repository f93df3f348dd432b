#include "rankreg/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rankreg/errors.hpp"

namespace rankreg {

TieRule::TieRule(double omega) : omega_(omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw InvalidInput("tie rule omega must lie in [0, 1], got " +
                       std::to_string(omega));
  }
}

void require_finite_sample(std::span<const double> sample, const char* name) {
  if (sample.empty()) {
    throw InvalidInput(std::string(name) + ": sample is empty");
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!std::isfinite(sample[i])) {
      throw InvalidInput(std::string(name) + ": non-finite value at index " +
                         std::to_string(i));
    }
  }
}

double ecdf(std::span<const double> sample, double t) {
  require_finite_sample(sample, "ecdf");
  const auto count =
      std::count_if(sample.begin(), sample.end(), [t](double v) { return v <= t; });
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

double ecdf_left(std::span<const double> sample, double t) {
  require_finite_sample(sample, "ecdf_left");
  const auto count =
      std::count_if(sample.begin(), sample.end(), [t](double v) { return v < t; });
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

RankVector rank_transform(std::span<const double> sample, TieRule rule) {
  require_finite_sample(sample, "rank_transform");
  const std::size_t n = sample.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample[a] < sample[b];
  });

  RankVector ranks(n);
  std::size_t lo = 0;
  while (lo < n) {
    std::size_t hi = lo + 1;
    while (hi < n && sample[order[hi]] == sample[order[lo]]) ++hi;
    // lo points strictly below the block, hi points at or below it:
    // omega*hi + (1-omega)*lo + (1-omega) rearranged so that a singleton
    // block gives exactly lo + 1.
    const double count = static_cast<double>(lo + 1) +
                         rule.omega() * static_cast<double>(hi - lo - 1);
    const double r = count / static_cast<double>(n);
    for (std::size_t k = lo; k < hi; ++k) ranks[order[k]] = r;
    lo = hi;
  }
  return ranks;
}

namespace {

struct RankMoments {
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

void require_paired(std::span<const double> x, std::span<const double> y,
                    std::size_t min_n, const char* what) {
  if (x.size() != y.size()) {
    throw InvalidInput(std::string(what) + ": x and y differ in length");
  }
  if (x.size() < min_n) {
    throw InvalidInput(std::string(what) + ": need at least " +
                       std::to_string(min_n) + " observations");
  }
}

double mean_of(const RankVector& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

RankMoments rank_moments(std::span<const double> x, std::span<const double> y,
                         TieRule rule) {
  const RankVector rx = rank_transform(x, rule);
  const RankVector ry = rank_transform(y, rule);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  RankMoments m;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  const double n = static_cast<double>(rx.size());
  m.sxx /= n;
  m.syy /= n;
  m.sxy /= n;
  if (m.sxx <= 0.0 || m.syy <= 0.0) {
    throw DegenerateInput("rank variance is zero: all values tied");
  }
  return m;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y,
                TieRule rule) {
  require_paired(x, y, 2, "spearman");
  const RankMoments m = rank_moments(x, y, rule);
  const double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

double centered_rank_moment(std::span<const double> x,
                            std::span<const double> y, int k, int l,
                            TieRule rule) {
  require_paired(x, y, 1, "centered_rank_moment");
  if (k < 0 || l < 0) {
    throw InvalidInput("centered_rank_moment: exponents must be non-negative");
  }
  const RankVector rx = rank_transform(x, rule);
  const RankVector ry = rank_transform(y, rule);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double acc = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    acc += std::pow(rx[i] - mx, k) * std::pow(ry[i] - my, l);
  }
  return acc / static_cast<double>(rx.size());
}

SlopeDecomposition slope_decomposition(std::span<const double> x,
                                       std::span<const double> y,
                                       TieRule rule) {
  require_paired(x, y, 2, "slope_decomposition");
  const RankMoments m = rank_moments(x, y, rule);
  const double sx = std::sqrt(m.sxx);
  const double sy = std::sqrt(m.syy);
  SlopeDecomposition d;
  d.rho_s = m.sxy / (sx * sy);
  d.sd_ratio = sy / sx;
  d.rho_hat = m.sxy / m.sxx;
  return d;
}

std::size_t tied_observations(std::span<const double> sample) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t tied = 0;
  std::size_t lo = 0;
  while (lo < sorted.size()) {
    std::size_t hi = lo + 1;
    while (hi < sorted.size() && sorted[hi] == sorted[lo]) ++hi;
    if (hi - lo > 1) tied += hi - lo;
    lo = hi;
  }
  return tied;
}

}  // namespace rankreg
