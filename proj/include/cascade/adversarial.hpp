#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/montecarlo.hpp"

namespace cascade::adversarial {

// Decision rule of the rational players. Majority is the assumed-always-
// revealer special case (Q == 1) of the mismatched MAP rule, so one code
// path serves both.
struct DecisionRule {
  enum class Kind { Majority, MismatchedMap };
  Kind kind = Kind::Majority;
  // Assumed schedule for MismatchedMap; ignored for Majority.
  std::vector<double> assumed_table;  // empty => use `assumed` schedule
  Schedule assumed = Schedule::constant(1.0);

  static DecisionRule majority() { return DecisionRule{}; }
  static DecisionRule mismatched_map(Schedule q) {
    return DecisionRule{Kind::MismatchedMap, {}, std::move(q)};
  }
  std::string name() const {
    return kind == Kind::Majority ? "majority" : "map";
  }
};

// Fixed (non-probabilistic) revealer placement: players in the set announce
// their signal, everyone else applies the decision rule.
struct PlacementExperiment {
  uint64_t n_players = 0;
  std::vector<uint32_t> revealer_set;  // sorted 1-based indices
  UrnModel urn;
  DecisionRule rule;
};

struct AdversarialResult {
  std::vector<uint64_t> per_player_errors;  // tallies, index t-1
  uint64_t trials = 0;
  double te_mean = 0.0;
  double te_stderr = 0.0;
  double lower_bound = 0.0;  // (N - V) / (1+gamma)^2

  double player_error_rate(size_t t) const {
    return static_cast<double>(per_player_errors[t]) /
           static_cast<double>(trials);
  }
};

// Structured placements.
std::vector<uint32_t> placement_all_end(uint64_t n, uint64_t v);
std::vector<uint32_t> placement_all_start(uint64_t n, uint64_t v);
std::vector<uint32_t> placement_uniform(uint64_t n, uint64_t v);

AdversarialResult simulate_placement(const PlacementExperiment& exp,
                                     uint64_t trials, uint64_t seed,
                                     const RunOptions& opts = {});

struct ReportRow {
  std::string placement;
  std::string rule;
  uint64_t n = 0, v = 0;
  double te_mean = 0.0, te_stderr = 0.0, lower_bound = 0.0;
};

// Evaluates the structured placement family x decision rules and reports TE
// against the analytic lower bound. This demonstrates (not proves) that no
// tested rule escapes the bound.
std::vector<ReportRow> worst_case_report(uint64_t n, uint64_t v,
                                         const UrnModel& urn,
                                         const std::vector<DecisionRule>& rules,
                                         uint64_t trials, uint64_t seed,
                                         const RunOptions& opts = {});

}  // namespace cascade::adversarial
