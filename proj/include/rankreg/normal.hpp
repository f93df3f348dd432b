#pragma once

namespace rankreg {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, |error| below 1e-12 on (0, 1).
///
/// Rational approximation (Acklam) refined by one Halley step on erfc.
/// normal_quantile(0.975) = 1.959963984540054.
double normal_quantile(double p);

/// z such that P(N(0,1) > z) = alpha / 2. Throws InvalidInput unless
/// 0 < alpha < 1.
double two_sided_critical_value(double alpha);

}  // namespace rankreg
