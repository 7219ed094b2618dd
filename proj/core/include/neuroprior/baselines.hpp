#pragma once

#include "neuroprior/data.hpp"
#include "neuroprior/sampler.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace neuroprior {

/// Point-mass spike and N(0, sigma^2 c) slab with independent inclusion
/// probability eta and pi(sigma^2) ~ 1/sigma^2.
struct SpslGammaConfig {
  double slab_variance = 1.0;
  double eta = 0.5;
  double single_flip_probability = 0.7;
};

/// Inclusion vector with its cached log marginal likelihood and log model prior.
struct GammaState {
  std::vector<char> gamma;
  double log_marginal = 0.0;
  double log_model_prior = 0.0;
};

/// log m_gamma(y) up to a gamma-independent constant:
/// -k/2 log c - 1/2 log det A - n/2 log(y'y - b'A^{-1}b), A = X_g'X_g + I/c, b = X_g'y.
double spsl_log_marginal(const RegressionData& data, const std::vector<char>& gamma, double slab_variance);
double spsl_log_model_prior(const std::vector<char>& gamma, double eta);

/// Metropolis over gamma with single-flip / double-flip proposals; theta_gamma
/// and sigma^2 are drawn from their conjugate conditionals every sweep.
/// Acceptance counts are reported in PosteriorSamples; the trace statistic is
/// the log model posterior.
PosteriorSamples spsl_gamma_mcmc(const RegressionData& data, const SpslGammaConfig& spsl,
                                 const SamplerConfig& config);

/// Bayesian Lasso Gibbs sampler with theta_j | sigma^2 ~ Laplace(scale sigma sqrt(tau_w_sq)),
/// i.e. rate lambda = 1 / sqrt(tau_w_sq) on the sigma-scaled coefficients.
PosteriorSamples bayesian_lasso_gibbs(const RegressionData& data, double tau_w_sq, const SamplerConfig& config);

/// Horseshoe Gibbs sampler with fixed global variance tau_w_sq and half-Cauchy
/// local scales updated by an inverse-CDF slice step.
PosteriorSamples horseshoe_gibbs(const RegressionData& data, double tau_w_sq, const SamplerConfig& config);

/// Coordinate-descent Lasso on 1/2 ||y - X theta||^2 + lambda ||theta||_1,
/// optionally warm-started. Stops when no coordinate moves by more than tolerance.
Eigen::VectorXd lasso_coordinate_descent(const RegressionData& data, double lambda,
                                         const Eigen::VectorXd* start = nullptr, double tolerance = 1e-9,
                                         std::size_t max_sweeps = 10000);

struct LassoCvResult {
  /// Selected penalty on the 1/2 ||y - X theta||^2 + lambda ||theta||_1 scale
  /// of the full data (fold fits use lambda * n_train / n).
  double lambda = 0.0;
  /// ||y - X theta_hat(lambda)||^2 / n on the full data.
  double sigma_sq = 0.0;
  Eigen::VectorXd theta;
  std::vector<double> grid;  ///< decreasing
  std::vector<double> cv_error;  ///< mean held-out squared error per grid value
};

/// K-fold cross-validated Lasso over a geometric grid from the smallest
/// penalty that zeroes every coefficient down to min_ratio times that value.
/// Folds are a seeded random partition of the rows.
LassoCvResult lasso_cv(const RegressionData& data, std::size_t folds = 10, std::size_t grid_size = 50,
                       double min_ratio = 1e-3, std::uint64_t seed = 1);

/// {j : |theta_mean_j| > c sigma_hat} as 0-based indices.
std::vector<std::size_t> hard_threshold_select(const Eigen::VectorXd& theta_mean, double sigma_hat, double c = 0.1);

}  // namespace neuroprior
