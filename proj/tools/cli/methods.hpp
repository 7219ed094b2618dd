#pragma once

#include "common.hpp"

#include <neuroprior/baselines.hpp>
#include <neuroprior/prior.hpp>
#include <neuroprior/sampler.hpp>

#include <string>
#include <vector>

namespace neuroprior::cli {

/// nspsl, nspsl-exact, n-horseshoe, n-blasso, spsl-gamma, blasso, horseshoe.
const std::vector<std::string>& method_names();

/// Hyperparameter flags shared by `sample` and `bench`. "auto" follows the
/// defaults of each method:
///   nspsl / nspsl-exact: alpha0 = -Phi^{-1}(1/p), tau_w^2 = 1
///   spsl-gamma:          eta = 1/p, slab variance (tau-sq) = 1
///   horseshoe variants:  tau_w^2 = p^{-2}
///   blasso variants:     tau_w^2 = 2 sigma^2_CV / lambda_CV^2 from 10-fold Lasso CV
struct MethodOptions {
  std::string alpha0 = "auto";
  std::string tau_sq = "auto";
  std::string eta = "auto";
  int inner_repeats = 10;
  double proposal_sd = 2.0;
  std::string w_update = "auto";
  std::size_t cv_folds = 10;

  void bind(CLI::App* app, OptionTable& table);
};

struct ResolvedMethod {
  std::string name;
  bool neuronized = false;
  NeuronizedPrior prior;
  AlphaUpdate alpha_update = AlphaUpdate::random_walk;
  WUpdate w_update = WUpdate::automatic;
  int inner_repeats = 10;
  double proposal_sd = 2.0;
  SpslGammaConfig spsl;
  double tau_sq = 1.0;  ///< for blasso / horseshoe
  json hyperparameters;
};

/// Throws UsageError for an unknown method or bad hyperparameter text.
ResolvedMethod resolve_method(const std::string& name, const MethodOptions& options, const RegressionData& data,
                              std::uint64_t seed);

/// Default post-burn-in draw count: 200000 for spsl-gamma, 20000 otherwise.
std::size_t default_samples(const std::string& method);

PosteriorSamples run_method(const ResolvedMethod& method, const RegressionData& data, SamplerConfig config);

}  // namespace neuroprior::cli
