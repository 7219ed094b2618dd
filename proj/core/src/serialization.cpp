#include "neuroprior/serialization.hpp"

#include <string>

namespace nlohmann {

void adl_serializer<neuroprior::ActivationSpec>::to_json(json& j, const neuroprior::ActivationSpec& spec) {
  using neuroprior::ActivationKind;
  j = json{{"kind", std::string(neuroprior::to_string(spec.kind()))}};
  if (spec.kind() == ActivationKind::signed_exp_quad) {
    const auto& p = spec.signed_exp_quad_params();
    j["quadratic"] = p.quadratic;
    j["linear"] = p.linear;
    j["intercept"] = p.intercept;
  } else if (spec.kind() == ActivationKind::spline) {
    j["breakpoints"] = spec.spline_curve().breakpoints();
    j["coefficients"] = spec.spline_curve().coefficients();
  }
}

neuroprior::ActivationSpec adl_serializer<neuroprior::ActivationSpec>::from_json(const json& j) {
  using neuroprior::ActivationKind;
  using neuroprior::ActivationSpec;
  switch (neuroprior::activation_kind_from_string(j.at("kind").get<std::string>())) {
    case ActivationKind::relu:
      return ActivationSpec::relu();
    case ActivationKind::identity:
      return ActivationSpec::identity();
    case ActivationKind::signed_exp_quad:
      return ActivationSpec::signed_exp_quad(j.value("quadratic", 0.37), j.value("linear", 0.89),
                                             j.value("intercept", 0.08));
    case ActivationKind::spline:
      return ActivationSpec::spline(j.at("breakpoints").get<std::vector<double>>(),
                                    j.at("coefficients").get<std::vector<double>>());
  }
  throw std::invalid_argument("unreachable activation kind");
}

}  // namespace nlohmann

namespace neuroprior {

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) {
    if (j.at(key).is_null()) {
      out.reset();
    } else {
      out = j.at(key).get<T>();
    }
  }
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void to_json(nlohmann::json& j, const NeuronizedPrior& prior) {
  j = nlohmann::json{{"activation", prior.activation},
                     {"alpha0", prior.alpha0},
                     {"tau_w_sq", prior.tau_w_sq},
                     {"sigma_scaled", prior.sigma_scaled}};
}

void from_json(const nlohmann::json& j, NeuronizedPrior& prior) {
  if (j.contains("activation")) prior.activation = j.at("activation").get<ActivationSpec>();
  read(j, "alpha0", prior.alpha0);
  read(j, "tau_w_sq", prior.tau_w_sq);
  read(j, "sigma_scaled", prior.sigma_scaled);
  prior.validate();
}

void to_json(nlohmann::json& j, const SamplerConfig& c) {
  j = nlohmann::json{{"iterations", c.iterations},
                     {"burn_in", c.burn_in},
                     {"thin", c.thin},
                     {"inner_repeats", c.inner_repeats},
                     {"rw_proposal_sd", c.rw_proposal_sd},
                     {"alpha_update", std::string(to_string(c.alpha_update))},
                     {"w_update", std::string(to_string(c.w_update))},
                     {"sigma_shape", c.sigma_shape},
                     {"sigma_rate", c.sigma_rate},
                     {"fixed_sigma_sq", optional_json(c.fixed_sigma_sq)},
                     {"seed", c.seed},
                     {"store_theta", c.store_theta},
                     {"store_alpha_w", c.store_alpha_w},
                     {"trace", std::string(to_string(c.trace))},
                     {"time_budget_seconds", c.time_budget_seconds}};
}

void from_json(const nlohmann::json& j, SamplerConfig& c) {
  read(j, "iterations", c.iterations);
  read(j, "burn_in", c.burn_in);
  read(j, "thin", c.thin);
  read(j, "inner_repeats", c.inner_repeats);
  read(j, "rw_proposal_sd", c.rw_proposal_sd);
  if (j.contains("alpha_update")) c.alpha_update = alpha_update_from_string(j.at("alpha_update").get<std::string>());
  if (j.contains("w_update")) c.w_update = w_update_from_string(j.at("w_update").get<std::string>());
  read(j, "sigma_shape", c.sigma_shape);
  read(j, "sigma_rate", c.sigma_rate);
  read_optional(j, "fixed_sigma_sq", c.fixed_sigma_sq);
  read(j, "seed", c.seed);
  read(j, "store_theta", c.store_theta);
  read(j, "store_alpha_w", c.store_alpha_w);
  if (j.contains("trace")) c.trace = trace_statistic_from_string(j.at("trace").get<std::string>());
  read(j, "time_budget_seconds", c.time_budget_seconds);
}

void to_json(nlohmann::json& j, const MapConfig& c) {
  j = nlohmann::json{{"tolerance", c.tolerance},
                     {"max_sweeps", c.max_sweeps},
                     {"objective", std::string(to_string(c.objective))},
                     {"sigma_sq", optional_json(c.sigma_sq)},
                     {"audit", c.audit}};
}

void from_json(const nlohmann::json& j, MapConfig& c) {
  read(j, "tolerance", c.tolerance);
  read(j, "max_sweeps", c.max_sweeps);
  if (j.contains("objective")) c.objective = alpha_objective_from_string(j.at("objective").get<std::string>());
  read_optional(j, "sigma_sq", c.sigma_sq);
  read(j, "audit", c.audit);
}

void to_json(nlohmann::json& j, const WarmStartSchedule& s) {
  j = nlohmann::json{{"kind", std::string(to_string(s.kind))}, {"values", s.values}};
}

void from_json(const nlohmann::json& j, WarmStartSchedule& s) {
  if (j.contains("kind")) s.kind = schedule_kind_from_string(j.at("kind").get<std::string>());
  read(j, "values", s.values);
}

void to_json(nlohmann::json& j, const MatchConfig& c) {
  j = nlohmann::json{{"sample_size", c.sample_size},
                     {"basis_count", c.basis_count},
                     {"knot_lower", c.knot_lower},
                     {"knot_upper", c.knot_upper},
                     {"alpha0", c.alpha0},
                     {"tau_w_sq", c.tau_w_sq},
                     {"distance", std::string(to_string(c.distance))},
                     {"optimizer", std::string(to_string(c.optimizer))},
                     {"initial_temperature", c.initial_temperature},
                     {"cooling", c.cooling},
                     {"steps", c.steps},
                     {"step_fraction", c.step_fraction},
                     {"grid_points", c.grid_points},
                     {"grid_sweeps", c.grid_sweeps},
                     {"initial_coefficients", optional_json(c.initial_coefficients)},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, MatchConfig& c) {
  read(j, "sample_size", c.sample_size);
  read(j, "basis_count", c.basis_count);
  read(j, "knot_lower", c.knot_lower);
  read(j, "knot_upper", c.knot_upper);
  read(j, "alpha0", c.alpha0);
  read(j, "tau_w_sq", c.tau_w_sq);
  if (j.contains("distance")) c.distance = match_distance_from_string(j.at("distance").get<std::string>());
  if (j.contains("optimizer")) c.optimizer = match_optimizer_from_string(j.at("optimizer").get<std::string>());
  read(j, "initial_temperature", c.initial_temperature);
  read(j, "cooling", c.cooling);
  read(j, "steps", c.steps);
  read(j, "step_fraction", c.step_fraction);
  read(j, "grid_points", c.grid_points);
  read(j, "grid_sweeps", c.grid_sweeps);
  read_optional(j, "initial_coefficients", c.initial_coefficients);
  read(j, "seed", c.seed);
}

void to_json(nlohmann::json& j, const Scenario& s) {
  j = nlohmann::json{{"n", s.n},
                     {"p", s.p},
                     {"design", s.design == DesignKind::ar1 ? "ar1" : "independent"},
                     {"rho", s.rho},
                     {"signal", s.signal == SignalKind::high_dim ? "high_dim" : "low_dim"},
                     {"magnitude", s.magnitude},
                     {"sigma_sq", s.sigma_sq},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, Scenario& s) {
  read(j, "n", s.n);
  read(j, "p", s.p);
  if (j.contains("design")) {
    const auto d = j.at("design").get<std::string>();
    if (d == "ar1") {
      s.design = DesignKind::ar1;
    } else if (d == "independent") {
      s.design = DesignKind::independent;
    } else {
      throw std::invalid_argument("scenario: unknown design '" + d + "'");
    }
  }
  read(j, "rho", s.rho);
  if (j.contains("signal")) {
    const auto k = j.at("signal").get<std::string>();
    if (k == "low_dim") {
      s.signal = SignalKind::low_dim;
    } else if (k == "high_dim") {
      s.signal = SignalKind::high_dim;
    } else {
      throw std::invalid_argument("scenario: unknown signal '" + k + "'");
    }
  }
  read(j, "magnitude", s.magnitude);
  read(j, "sigma_sq", s.sigma_sq);
  read(j, "seed", s.seed);
  s.validate();
}

void to_json(nlohmann::json& j, const SpslGammaConfig& c) {
  j = nlohmann::json{{"slab_variance", c.slab_variance},
                     {"eta", c.eta},
                     {"single_flip_probability", c.single_flip_probability}};
}

void from_json(const nlohmann::json& j, SpslGammaConfig& c) {
  read(j, "slab_variance", c.slab_variance);
  read(j, "eta", c.eta);
  read(j, "single_flip_probability", c.single_flip_probability);
}

}  // namespace neuroprior
