#include "methods.hpp"

#include <neuroprior/serialization.hpp>

#include <algorithm>
#include <cmath>

namespace neuroprior::cli {

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"nspsl",      "nspsl-exact", "n-horseshoe", "n-blasso",
                                              "spsl-gamma", "blasso",      "horseshoe"};
  return names;
}

void MethodOptions::bind(CLI::App* app, OptionTable& table) {
  table.add(app, "alpha0", alpha0, "Neuronized bias alpha0 (auto or a number)");
  table.add(app, "tau-sq", tau_sq, "Weight / global / slab variance (auto or a number)");
  table.add(app, "eta", eta, "spsl-gamma inclusion probability (auto = 1/p)");
  table.add(app, "inner-repeats", inner_repeats, "Alpha random-walk steps per coordinate");
  table.add(app, "proposal-sd", proposal_sd, "Alpha random-walk proposal sd");
  table.add(app, "w-update", w_update, "auto | full | block_relu | fast_np");
  table.add(app, "cv-folds", cv_folds, "Lasso CV folds for the blasso tau-sq rule");
}

namespace {

double lasso_cv_tau_sq(const RegressionData& data, std::size_t folds, std::uint64_t seed, json& hyper) {
  const auto cv = lasso_cv(data, folds, 100, 1e-3, seed);
  hyper["lambda_cv"] = cv.lambda;
  hyper["sigma_sq_cv"] = cv.sigma_sq;
  return tau_sq_from_lasso_cv(cv.lambda, cv.sigma_sq);
}

}  // namespace

ResolvedMethod resolve_method(const std::string& name, const MethodOptions& options, const RegressionData& data,
                              std::uint64_t seed) {
  const auto& names = method_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw UsageError("--method: unknown method \"" + name + "\"");
  }
  const auto p = static_cast<std::size_t>(data.p());
  const double pd = static_cast<double>(p);
  ResolvedMethod m;
  m.name = name;
  m.inner_repeats = options.inner_repeats;
  m.proposal_sd = options.proposal_sd;
  m.w_update = as_usage("w-update", [&] { return w_update_from_string(options.w_update); });
  const auto alpha0 = parse_auto(options.alpha0, "alpha0");
  const auto tau_sq = parse_auto(options.tau_sq, "tau-sq");
  const auto eta = parse_auto(options.eta, "eta");
  json& hyper = m.hyperparameters;

  if (name == "nspsl" || name == "nspsl-exact") {
    m.neuronized = true;
    m.alpha_update = name == "nspsl" ? AlphaUpdate::random_walk : AlphaUpdate::exact_relu;
    m.prior = {ActivationSpec::relu(),
               alpha0 ? *alpha0 : as_usage("alpha0", [&] { return alpha0_from_sparsity(1.0 / pd); }),
               tau_sq.value_or(1.0), true};
  } else if (name == "n-horseshoe") {
    m.neuronized = true;
    m.prior = {make_horseshoe_like(), alpha0.value_or(0.0), tau_sq ? *tau_sq : default_tau_sq(p), true};
  } else if (name == "n-blasso") {
    m.neuronized = true;
    m.prior = {ActivationSpec::identity(), alpha0.value_or(0.0),
               tau_sq ? *tau_sq : lasso_cv_tau_sq(data, options.cv_folds, seed, hyper), true};
  } else if (name == "spsl-gamma") {
    m.spsl.slab_variance = tau_sq.value_or(1.0);
    m.spsl.eta = eta ? *eta : 1.0 / pd;
    hyper["slab_variance"] = m.spsl.slab_variance;
    hyper["eta"] = m.spsl.eta;
  } else if (name == "horseshoe") {
    m.tau_sq = tau_sq ? *tau_sq : default_tau_sq(p);
  } else {
    m.tau_sq = tau_sq ? *tau_sq : lasso_cv_tau_sq(data, options.cv_folds, seed, hyper);
  }

  if (m.neuronized) {
    as_usage("alpha0", [&] { m.prior.validate(); });
    hyper["activation"] = m.prior.activation;
    hyper["alpha0"] = m.prior.alpha0;
    hyper["tau_w_sq"] = m.prior.tau_w_sq;
    hyper["alpha_update"] = std::string(to_string(m.alpha_update));
  } else if (name != "spsl-gamma") {
    if (!(m.tau_sq > 0.0)) throw UsageError("--tau-sq must be positive");
    hyper["tau_w_sq"] = m.tau_sq;
  } else if (!(m.spsl.slab_variance > 0.0) || !(m.spsl.eta > 0.0 && m.spsl.eta < 1.0)) {
    throw UsageError("spsl-gamma needs --tau-sq > 0 and 0 < --eta < 1");
  }
  return m;
}

std::size_t default_samples(const std::string& method) { return method == "spsl-gamma" ? 200000 : 20000; }

PosteriorSamples run_method(const ResolvedMethod& method, const RegressionData& data, SamplerConfig config) {
  if (method.neuronized) {
    config.alpha_update = method.alpha_update;
    config.w_update = method.w_update;
    config.inner_repeats = method.inner_repeats;
    config.rw_proposal_sd = method.proposal_sd;
    auto out = run_chain(data, method.prior, config);
    out.method = method.name;
    return out;
  }
  if (method.name == "spsl-gamma") return spsl_gamma_mcmc(data, method.spsl, config);
  if (method.name == "horseshoe") return horseshoe_gibbs(data, method.tau_sq, config);
  return bayesian_lasso_gibbs(data, method.tau_sq, config);
}

}  // namespace neuroprior::cli
