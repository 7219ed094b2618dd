#pragma once

#include "neuroprior/activation.hpp"
#include "neuroprior/baselines.hpp"
#include "neuroprior/data.hpp"
#include "neuroprior/map.hpp"
#include "neuroprior/matchfit.hpp"
#include "neuroprior/prior.hpp"
#include "neuroprior/sampler.hpp"

#include <nlohmann/json.hpp>

namespace neuroprior {

// JSON forms used for configuration files and provenance output. Readers
// accept partial objects: missing keys keep their defaults.

void to_json(nlohmann::json& j, const NeuronizedPrior& prior);
void from_json(const nlohmann::json& j, NeuronizedPrior& prior);

void to_json(nlohmann::json& j, const SamplerConfig& config);
void from_json(const nlohmann::json& j, SamplerConfig& config);

void to_json(nlohmann::json& j, const MapConfig& config);
void from_json(const nlohmann::json& j, MapConfig& config);

void to_json(nlohmann::json& j, const WarmStartSchedule& schedule);
void from_json(const nlohmann::json& j, WarmStartSchedule& schedule);

void to_json(nlohmann::json& j, const MatchConfig& config);
void from_json(const nlohmann::json& j, MatchConfig& config);

void to_json(nlohmann::json& j, const Scenario& scenario);
void from_json(const nlohmann::json& j, Scenario& scenario);

void to_json(nlohmann::json& j, const SpslGammaConfig& config);
void from_json(const nlohmann::json& j, SpslGammaConfig& config);

}  // namespace neuroprior

namespace nlohmann {

/// {"kind": "relu"} | {"kind": "identity"} |
/// {"kind": "signed_exp_quad", "quadratic": .., "linear": .., "intercept": ..} |
/// {"kind": "spline", "breakpoints": [..], "coefficients": [..]}
template <>
struct adl_serializer<neuroprior::ActivationSpec> {
  static void to_json(json& j, const neuroprior::ActivationSpec& spec);
  static neuroprior::ActivationSpec from_json(const json& j);
};

}  // namespace nlohmann
