#include "cascade/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cascade::adversarial {

std::vector<uint32_t> placement_all_end(uint64_t n, uint64_t v) {
  std::vector<uint32_t> out;
  for (uint64_t t = n - v + 1; t <= n; ++t)
    out.push_back(static_cast<uint32_t>(t));
  return out;
}

std::vector<uint32_t> placement_all_start(uint64_t n, uint64_t v) {
  (void)n;
  std::vector<uint32_t> out;
  for (uint64_t t = 1; t <= v; ++t) out.push_back(static_cast<uint32_t>(t));
  return out;
}

std::vector<uint32_t> placement_uniform(uint64_t n, uint64_t v) {
  // v evenly spaced indices in [1, n]; distinct because v <= n.
  std::vector<uint32_t> out;
  for (uint64_t j = 1; j <= v; ++j)
    out.push_back(static_cast<uint32_t>((j * n) / v));
  return out;
}

AdversarialResult simulate_placement(const PlacementExperiment& exp,
                                     uint64_t trials, uint64_t seed,
                                     const RunOptions& opts) {
  if (exp.n_players < 1) throw std::domain_error("need at least one player");
  for (uint32_t idx : exp.revealer_set)
    if (idx < 1 || idx > exp.n_players)
      throw std::domain_error("revealer index outside [1, N]");

  // Set membership as a 0/1 truth schedule: Bernoulli(1)/Bernoulli(0) is the
  // deterministic special case of the probabilistic revealer draw, so the
  // dynamics code path is reused unchanged.
  std::vector<double> p(exp.n_players, 0.0);
  for (uint32_t idx : exp.revealer_set) p[idx - 1] = 1.0;

  ExperimentConfig cfg{
      exp.urn,
      Schedule::table(std::move(p)),
      exp.rule.kind == DecisionRule::Kind::Majority ? Schedule::constant(1.0)
                                                    : exp.rule.assumed,
      exp.n_players,
      CheckpointSpec{CheckpointSpec::Kind::Explicit,
                     0,
                     {static_cast<uint32_t>(exp.n_players)}},
      trials,
      seed};

  // Per-player tallies ride on the per-step recording mode of the engine.
  RunOptions run_opts = opts;
  run_opts.collect_masks = false;
  PerStepSeries per_step = run_experiment_per_step(cfg, run_opts);

  AdversarialResult result;
  result.per_player_errors = std::move(per_step.step_errors);
  result.trials = trials;
  result.te_mean = per_step.te_mean;
  result.te_stderr = per_step.te_stderr;
  const double g = exp.urn.gamma();
  result.lower_bound =
      static_cast<double>(exp.n_players - exp.revealer_set.size()) /
      ((1.0 + g) * (1.0 + g));
  return result;
}

std::vector<ReportRow> worst_case_report(uint64_t n, uint64_t v,
                                         const UrnModel& urn,
                                         const std::vector<DecisionRule>& rules,
                                         uint64_t trials, uint64_t seed,
                                         const RunOptions& opts) {
  struct Named {
    const char* name;
    std::vector<uint32_t> set;
  };
  const Named placements[] = {
      {"all_end", placement_all_end(n, v)},
      {"all_start", placement_all_start(n, v)},
      {"uniform", placement_uniform(n, v)},
  };
  std::vector<ReportRow> rows;
  for (const auto& placement : placements) {
    for (const auto& rule : rules) {
      PlacementExperiment exp{n, placement.set, urn, rule};
      const AdversarialResult res = simulate_placement(exp, trials, seed, opts);
      rows.push_back(ReportRow{placement.name, rule.name(), n, v, res.te_mean,
                               res.te_stderr, res.lower_bound});
    }
  }
  return rows;
}

}  // namespace cascade::adversarial
