#pragma once

#include "neuroprior/activation.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace neuroprior {

/// theta = T(alpha - alpha0) * w with alpha ~ N(0, 1) and
/// w ~ N(0, tau_w_sq), or N(0, sigma^2 tau_w_sq) when sigma_scaled.
struct NeuronizedPrior {
  ActivationSpec activation = ActivationSpec::relu();
  double alpha0 = 0.0;
  double tau_w_sq = 1.0;
  bool sigma_scaled = true;

  /// Throws std::invalid_argument unless tau_w_sq > 0 and alpha0 is finite.
  void validate() const;
};

/// -Phi^{-1}(eta). Throws std::domain_error unless 0 < eta < 1.
double alpha0_from_sparsity(double eta);

/// alpha0 for the inclusion rate (p + p^a)^{-1}.
double alpha0_from_dimension(std::size_t p, double a = 1.0);

/// Prior probability that theta is exactly zero.
double zero_mass(const NeuronizedPrior& prior);

/// `count` i.i.d. prior draws of theta. The weight is drawn as
/// sqrt(tau_w_sq) * z with z standard normal, so rescaling tau_w_sq by c^2
/// rescales every draw by c under the same seed. When sigma_scaled is set the
/// caller's sigma_sq multiplies the weight variance.
std::vector<double> sample_prior(const NeuronizedPrior& prior, std::size_t count,
                                 std::uint64_t seed, double sigma_sq = 1.0);

/// p^{-2}.
double default_tau_sq(std::size_t p);

/// 2 sigma_sq_cv / lambda_cv^2. Throws std::domain_error for non-positive inputs.
double tau_sq_from_lasso_cv(double lambda_cv, double sigma_sq_cv);

}  // namespace neuroprior
