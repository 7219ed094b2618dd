#pragma once

#include "neuroprior/rng.hpp"

namespace neuroprior {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_pdf(double x) noexcept;
double normal_log_pdf(double x) noexcept;
/// Standard normal CDF via erfc; relative accuracy near machine precision.
double normal_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate for large positive x.
double normal_sf(double x) noexcept;
/// log Phi(x), finite for all finite x (asymptotic series below -30).
double normal_log_cdf(double x) noexcept;
/// log(1 - Phi(x)).
double normal_log_sf(double x) noexcept;

/// Phi^{-1}(p) for p in (0, 1). Acklam's rational approximation followed by
/// one Newton refinement. Throws std::domain_error outside (0, 1).
double normal_quantile(double p);

/// x such that log(1 - Phi(x)) == log_tail, for log_tail < log(1/2).
/// Works where the tail probability itself underflows.
double normal_quantile_from_log_sf(double log_tail);

/// Draw from N(mean, sd^2) restricted to (lower, +inf) by inverse CDF.
/// Standardized bounds above zero go through the complementary quantile, and
/// very large bounds through the log-tail quantile.
double sample_truncated_normal_above(Rng& rng, double mean, double sd, double lower);

/// Draw from N(mean, sd^2) restricted to (-inf, upper).
double sample_truncated_normal_below(Rng& rng, double mean, double sd, double upper);

}  // namespace neuroprior
