#include "cascade/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

Regime regime_of(const CascadeState& state, const UrnModel& urn) {
  if (std::abs(state.c) < kTieTolerance) {
    if (state.k < -1) return Regime::Low;
    if (state.k > 1) return Regime::High;
    return Regime::Mid;
  }
  // Inclusive Mid band widened by the tie tolerance: correction products can
  // land exactly on gamma^{+-1} (e.g. q = 1 rows), where the exact rule says
  // Mid while the rounded sum sits an ulp off the boundary.
  const double x = state.log_ratio(urn);
  const double band = urn.log_gamma() + kTieTolerance;
  if (x < -band) return Regime::Low;
  if (x > band) return Regime::High;
  return Regime::Mid;
}

int rational_decision(Regime regime, int signal) {
  switch (regime) {
    case Regime::Low: return 2;
    case Regime::High: return 1;
    case Regime::Mid: return signal;
  }
  throw std::logic_error("unreachable");
}

double correction_high(double q_t, const UrnModel& urn) {
  // log[(1 - q b) / (1 - q a)] with a = alpha/(alpha+beta), b = beta/(alpha+beta).
  const double a = urn.p_correct(), b = urn.p_wrong();
  return std::log1p(-b * q_t) - std::log1p(-a * q_t);
}

CascadeState assumed_update(const CascadeState& state, Regime regime, int z,
                            double q_t, const UrnModel& urn) {
  CascadeState next = state;
  next.t = state.t + 1;
  switch (regime) {
    case Regime::Mid:
      next.k += z == 1 ? 1 : -1;
      break;
    case Regime::Low:
      if (z == 1) {
        next.k += 1;  // q factors cancel: (a q)/(b q) = gamma
      } else {
        next.c += -correction_high(q_t, urn);
      }
      break;
    case Regime::High:
      if (z == 2) {
        next.k -= 1;
      } else {
        next.c += correction_high(q_t, urn);
      }
      break;
  }
  return next;
}

StepOutcome step(CascadeState& state, const WorldState& world, double p_t,
                 double q_t, const UrnModel& urn, Xoshiro256pp& rng) {
  const uint64_t u_rev = rng.next();
  const uint64_t u_sig = rng.next();
  const bool revealer = bernoulli(u_rev, bernoulli_threshold(p_t));
  const bool correct_signal =
      bernoulli(u_sig, bernoulli_threshold(urn.p_correct()));
  const int signal = correct_signal ? world.theta : 3 - world.theta;

  const Regime regime = regime_of(state, urn);
  const int z = revealer ? signal : rational_decision(regime, signal);

  // Regime/decision consistency holds by construction; keep the check on the
  // reference path, the optimized kernels are equivalence-tested against it.
  if (!revealer) {
    const bool ok = (regime == Regime::Low && z == 2) ||
                    (regime == Regime::High && z == 1) ||
                    (regime == Regime::Mid && z == signal);
    if (!ok) throw std::logic_error("regime/decision invariant violated");
  }

  state = assumed_update(state, regime, z, q_t, urn);
  return StepOutcome{z, revealer, signal, z == world.theta};
}

TrajectoryResult simulate_trajectory(const ExperimentConfig& cfg,
                                     uint64_t trial_index,
                                     const WorldState* world_override) {
  Xoshiro256pp rng(trial_seed(cfg.master_seed, trial_index));
  const uint64_t u_theta = rng.next();
  WorldState world{world_override ? world_override->theta
                                  : (u_theta >> 63) ? 2 : 1};

  const std::vector<uint32_t> ckpts = cfg.checkpoints.resolve(cfg.horizon);
  TrajectoryResult result;
  result.checkpoint_errors.resize(ckpts.size());
  result.cumulative_errors_at.resize(ckpts.size());

  CascadeState state;
  size_t next_ckpt = 0;
  const double band = cfg.urn.log_gamma();
  for (uint64_t t = 1; t <= cfg.horizon; ++t) {
    if (std::abs(state.c) >= kTieTolerance) {
      const double x = state.log_ratio(cfg.urn);
      if (std::abs(std::abs(x) - band) <= kTieTolerance)
        ++result.boundary_tie_count;
    }
    const StepOutcome out =
        step(state, world, cfg.truth.value_at(t), cfg.assumed.value_at(t),
             cfg.urn, rng);
    if (!out.correct) ++result.total_errors;
    if (next_ckpt < ckpts.size() && t == ckpts[next_ckpt]) {
      result.checkpoint_errors[next_ckpt] = out.correct ? 0 : 1;
      result.cumulative_errors_at[next_ckpt] = result.total_errors;
      ++next_ckpt;
    }
  }
  return result;
}

std::vector<int> decision_sequence(const UrnModel& urn, const Schedule& truth,
                                   const Schedule& assumed, uint64_t horizon,
                                   uint64_t seed, int theta) {
  Xoshiro256pp rng(seed);
  WorldState world{theta};
  CascadeState state;
  std::vector<int> decisions;
  decisions.reserve(horizon);
  for (uint64_t t = 1; t <= horizon; ++t) {
    decisions.push_back(step(state, world, truth.value_at(t),
                             assumed.value_at(t), urn, rng)
                            .decision);
  }
  return decisions;
}

}  // namespace cascade
