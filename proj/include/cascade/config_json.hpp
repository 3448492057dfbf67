#pragma once

#include <json.hpp>
#include <string>

#include "cascade/adversarial.hpp"
#include "cascade/model.hpp"

namespace cascade {

// Experiment config schema (unknown keys rejected):
// {
//   "gamma": 10.0,
//   "truth":   {"kind": "optimal", "epsilon": 0.0},
//   "assumed": {"kind": "scaled", "of": "truth", "rho": 1.5},
//   "horizon": 100000,
//   "checkpoints": {"kind": "geometric", "count": 25},
//   "trials": 200000,
//   "seed": 42
// }
// Schedule kinds: optimal{epsilon}, scaled{of, rho}, harmonic{c_p},
// powerlaw{coefficient, exponent}, constant{q}, table{values}.
// "of" is "truth" or an inline schedule object.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);

// Canonical resolved form (sorted keys, schedules normalized); the digest of
// this document goes into every output header.
nlohmann::json resolved_config_json(const ExperimentConfig& cfg);

nlohmann::json schedule_to_json(const Schedule& s);

// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& resolved);

// Adversarial job schema:
// {
//   "gamma": 2.0, "n_players": 1000, "v": 100,
//   "placements": ["end", "start", "uniform"],
//   "rules": ["majority"],                  // and/or "map"
//   "assumed": {...},                       // required when rules has "map"
//   "trials": 10000, "seed": 7
// }
struct AdversarialJob {
  UrnModel urn;
  uint64_t n_players = 0;
  uint64_t v = 0;
  std::vector<std::string> placements;
  std::vector<adversarial::DecisionRule> rules;
  uint64_t trials = 0;
  uint64_t seed = 0;
};
AdversarialJob parse_adversarial_config(const nlohmann::json& j);
nlohmann::json resolved_adversarial_json(const AdversarialJob& job);

}  // namespace cascade
