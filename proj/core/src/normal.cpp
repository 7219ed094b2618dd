#include "neuroprior/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace neuroprior {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// log(1 - Phi(x)) for x > 30 from the asymptotic expansion of Mills' ratio.
double log_sf_asymptotic(double x) {
  const double z = 1.0 / (x * x);
  // 1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - 945/x^10
  const double series =
      1.0 + z * (-1.0 + z * (3.0 + z * (-15.0 + z * (105.0 + z * (-945.0)))));
  return -0.5 * x * x - std::log(x) - kLogSqrt2Pi + std::log(series);
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / kSqrt2); }

double normal_log_cdf(double x) noexcept {
  if (x < -30.0) return log_sf_asymptotic(-x);
  if (x > 5.0) return std::log1p(-normal_sf(x));
  return std::log(normal_cdf(x));
}

double normal_log_sf(double x) noexcept { return normal_log_cdf(-x); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: probability must lie in (0, 1)");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Newton step on the tail that is represented accurately.
  if (p < 0.5) {
    x -= (normal_cdf(x) - p) / normal_pdf(x);
  } else {
    x += (normal_sf(x) - (1.0 - p)) / normal_pdf(x);
  }
  return x;
}

double normal_quantile_from_log_sf(double log_tail) {
  if (!(log_tail < -std::numbers::ln2)) {
    throw std::domain_error("normal_quantile_from_log_sf: tail must be below 1/2");
  }
  if (log_tail > -600.0) {
    return -normal_quantile(std::exp(log_tail));
  }
  // Asymptotic start, then Newton on log(1 - Phi(x)), whose derivative is
  // -pdf(x)/sf(x) = -exp(log_pdf - log_sf).
  const double l = -2.0 * log_tail;
  double x = std::sqrt(l - std::log(l) - 2.0 * kLogSqrt2Pi);
  for (int it = 0; it < 50; ++it) {
    const double ls = normal_log_sf(x);
    const double hazard = std::exp(normal_log_pdf(x) - ls);
    const double step = (ls - log_tail) / hazard;
    x += step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double sample_truncated_normal_above(Rng& rng, double mean, double sd, double lower) {
  const double a = (lower - mean) / sd;
  const double u = rng.uniform();
  double z;
  if (a < 0.0) {
    const double fa = normal_cdf(a);
    z = normal_quantile(std::min(fa + u * (1.0 - fa), 1.0 - 0x1.0p-53));
  } else if (a < 30.0) {
    // Q(z) = u Q(a) with Q the upper tail.
    z = -normal_quantile(u * normal_sf(a));
  } else {
    z = normal_quantile_from_log_sf(std::log(u) + normal_log_sf(a));
  }
  return mean + sd * std::max(z, a);
}

double sample_truncated_normal_below(Rng& rng, double mean, double sd, double upper) {
  return -sample_truncated_normal_above(rng, -mean, sd, -upper);
}

}  // namespace neuroprior
