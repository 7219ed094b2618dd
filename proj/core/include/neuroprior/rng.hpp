#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace neuroprior {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// (seed, stream) pair so that worker k of a run always sees the same draws.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

/// Random source for every sampler in the library.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. The continuous variates are generated here rather than through
/// <random> distributions, whose algorithms differ between standard library
/// implementations, so a seed reproduces the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix_seed(seed, stream)) {}

  /// Independent child generator; does not advance this one.
  [[nodiscard]] Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, rate = 1).
  double gamma(double shape);
  double gamma(double shape, double rate) { return gamma(shape) / rate; }
  /// Inverse-gamma with density proportional to x^{-shape-1} exp(-rate / x).
  double inverse_gamma(double shape, double rate);
  /// Inverse Gaussian with mean mu and shape lambda (Michael, Schucany and Haas).
  double inverse_gaussian(double mu, double lambda);
  double exponential(double rate) { return -std::log(uniform()) / rate; }
  /// Standard half-Cauchy.
  double half_cauchy();
  double laplace(double scale);

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}

  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace neuroprior
