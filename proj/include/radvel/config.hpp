#pragma once

// JSON configuration for the estimator. Sections mirror EstimatorConfig:
//
//   {
//     "rejector":      { "method": "ransac", "inlier_threshold": 0.15, ... },
//     "loss":          { "kind": "cauchy", "scale": 0.2, ... },
//     "solver":        { "grad_tolerance": 1e-8, ... },
//     "zero_velocity": { "doppler_threshold": 0.05, ... },
//     "filter":        { "enabled": true, "window_size": 5, ... },
//     "doppler_sign":  "as_is"
//   }
//
// Every key is optional and falls back to the defaults in the C++ structs;
// unknown keys are rejected. Environment variables named
// RADVEL_CFG__<SECTION>__<KEY> (case-insensitive) override file values,
// e.g. RADVEL_CFG__REJECTOR__SEED=7 or RADVEL_CFG__DOPPLER_SIGN=flipped.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "radvel/pipeline.hpp"
#include "radvel/synth.hpp"

namespace radvel::config {

inline constexpr const char* kEnvPrefix = "RADVEL_CFG__";

/// Strict conversion. Throws Errc::ConfigError naming the offending key.
EstimatorConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const EstimatorConfig& cfg);

/// Applies KEY=VALUE overrides (prefix already stripped is not required;
/// entries without the prefix are ignored). Values parse as JSON when
/// possible and as plain strings otherwise.
void apply_env_overrides(nlohmann::json& j, const std::vector<std::pair<std::string, std::string>>& env);

/// The process environment, filtered to kEnvPrefix.
std::vector<std::pair<std::string, std::string>> environment_overrides();

/// File (may be empty for defaults) + environment. Throws Errc::IoError and
/// Errc::ConfigError.
EstimatorConfig load(const std::string& path);

/// Scene/stream description consumed by the synth command:
///   { "scene": {...}, "profile": {"type": "constant"|"sinusoid", ...},
///     "stream": { "rate_hz": 10, "duration": 78.9, "wild_indices": [...],
///                 "wild_offset": [9,0,0] } }
/// "stream" is optional; without it a single scan is produced at t = 0.
struct SynthJob {
  synth::SceneSpec scene;
  synth::VelocityProfile profile;
  std::optional<synth::StreamSpec> stream;
};

SynthJob synth_job_from_json(const nlohmann::json& j);

}  // namespace radvel::config
