#pragma once

// Empirical CDFs, the omega-parameterised rank transform and rank-based
// correlation summaries.
//
// For a sample s_1..s_n and tie weight omega in [0,1] the rank of s_i is
//
//   R_i = omega * F(s_i) + (1 - omega) * F^-(s_i) + (1 - omega) / n
//
// with F the empirical CDF and F^- its left limit. omega = 1 gives the
// largest rank within a tie block, omega = 0 the smallest and omega = 1/2
// the mid-rank. On tie-free data every omega yields {1/n, ..., n/n}.

#include <cstddef>
#include <span>
#include <vector>

namespace rankreg {

/// Tie-handling weight omega in [0, 1].
class TieRule {
 public:
  /// Throws InvalidInput when omega is outside [0, 1] or not finite.
  explicit TieRule(double omega = 1.0);

  double omega() const noexcept { return omega_; }

  friend bool operator==(TieRule, TieRule) = default;

 private:
  double omega_;
};

using RankVector = std::vector<double>;

/// Fraction of the sample <= t.
double ecdf(std::span<const double> sample, double t);

/// Fraction of the sample strictly below t.
double ecdf_left(std::span<const double> sample, double t);

/// I(a, b) = omega * 1{a <= b} + (1 - omega) * 1{a < b}.
///
/// Averaging over the first argument reproduces the rank:
///   rank_transform(s)[i] = n^-1 sum_j I(s_j, s_i) + (1 - omega) / n.
inline double comparison_kernel(TieRule rule, double a, double b) noexcept {
  if (a < b) return 1.0;
  if (a == b) return rule.omega();
  return 0.0;
}

/// Sort-based O(n log n) rank transform. Ties are exact equality.
RankVector rank_transform(std::span<const double> sample, TieRule rule);

/// Pearson correlation of the two rank vectors.
double spearman(std::span<const double> x, std::span<const double> y,
                TieRule rule);

/// n^-1 sum_i (R^X_i - mean R^X)^k (R^Y_i - mean R^Y)^l.
double centered_rank_moment(std::span<const double> x,
                            std::span<const double> y, int k, int l,
                            TieRule rule);

struct SlopeDecomposition {
  double rho_hat;   // S_YX / S_X^2
  double rho_s;     // S_YX / (S_X S_Y)
  double sd_ratio;  // S_Y / S_X
};

/// Splits the bivariate rank-rank slope into Spearman's rho and the ratio
/// of rank standard deviations.
SlopeDecomposition slope_decomposition(std::span<const double> x,
                                       std::span<const double> y,
                                       TieRule rule);

/// Number of observations sharing their value with at least one other.
std::size_t tied_observations(std::span<const double> sample);

/// Throws InvalidInput on an empty sample or any non-finite value.
void require_finite_sample(std::span<const double> sample, const char* name);

}  // namespace rankreg
