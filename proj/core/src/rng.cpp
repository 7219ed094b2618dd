#include "neuroprior/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace neuroprior {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::split(std::uint64_t stream) const {
  // Hash the parent's state snapshot with the stream id; the parent is untouched.
  std::mt19937_64 copy = engine_;
  const std::uint64_t base = copy();
  return Rng(base, stream);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection of the incomplete top block keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % n;
  }
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_normal_ = true;
  return u * f;
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale by U^{1/shape}.
    const double g = gamma(shape + 1.0);
    return g * std::exp(std::log(uniform()) / shape);
  }
  // Marsaglia and Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::inverse_gamma(double shape, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("inverse_gamma: rate must be positive");
  return rate / gamma(shape);
}

double Rng::inverse_gaussian(double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("inverse_gaussian: mu and lambda must be positive");
  }
  if (!std::isfinite(mu)) {
    // Limit mu -> inf is the Levy distribution with scale lambda.
    const double z = normal();
    return lambda / (z * z);
  }
  const double nu = normal();
  const double y = nu * nu;
  const double muy = mu * y;
  const double x = mu + mu * muy / (2.0 * lambda) -
                   mu / (2.0 * lambda) * std::sqrt(4.0 * lambda * muy + muy * muy);
  if (uniform() <= mu / (mu + x)) return x;
  return mu * mu / x;
}

double Rng::half_cauchy() {
  return std::abs(std::tan(std::numbers::pi * (uniform() - 0.5)));
}

double Rng::laplace(double scale) {
  const double u = uniform() - 0.5;
  return u < 0.0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
}

}  // namespace neuroprior
