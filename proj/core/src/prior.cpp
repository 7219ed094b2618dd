#include "neuroprior/prior.hpp"

#include "neuroprior/normal.hpp"
#include "neuroprior/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace neuroprior {

void NeuronizedPrior::validate() const {
  if (!(tau_w_sq > 0.0) || !std::isfinite(tau_w_sq)) {
    throw std::invalid_argument("prior: tau_w_sq must be positive and finite");
  }
  if (!std::isfinite(alpha0)) throw std::invalid_argument("prior: alpha0 must be finite");
}

double alpha0_from_sparsity(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("alpha0_from_sparsity: eta must lie in (0, 1)");
  return -normal_quantile(eta);
}

double alpha0_from_dimension(std::size_t p, double a) {
  if (p == 0) throw std::domain_error("alpha0_from_dimension: p must be positive");
  const auto pd = static_cast<double>(p);
  return alpha0_from_sparsity(1.0 / (pd + std::pow(pd, a)));
}

double zero_mass(const NeuronizedPrior& prior) {
  return prior.activation.has_zero_region() ? normal_cdf(prior.alpha0) : 0.0;
}

std::vector<double> sample_prior(const NeuronizedPrior& prior, std::size_t count,
                                 std::uint64_t seed, double sigma_sq) {
  prior.validate();
  if (count == 0) throw std::invalid_argument("sample_prior: count must be at least 1");
  const double scale = std::sqrt(prior.sigma_scaled ? sigma_sq * prior.tau_w_sq : prior.tau_w_sq);
  Rng rng(seed);
  std::vector<double> draws(count);
  for (auto& d : draws) {
    const double alpha = rng.normal();
    const double z = rng.normal();
    d = scale * (prior.activation(alpha - prior.alpha0) * z);
  }
  return draws;
}

double default_tau_sq(std::size_t p) {
  if (p == 0) throw std::domain_error("default_tau_sq: p must be positive");
  const auto pd = static_cast<double>(p);
  return 1.0 / (pd * pd);
}

double tau_sq_from_lasso_cv(double lambda_cv, double sigma_sq_cv) {
  if (!(lambda_cv > 0.0) || !(sigma_sq_cv > 0.0)) {
    throw std::domain_error("tau_sq_from_lasso_cv: inputs must be positive");
  }
  return 2.0 * sigma_sq_cv / (lambda_cv * lambda_cv);
}

}  // namespace neuroprior
