#pragma once

#include <cstdint>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/rng.hpp"

namespace cascade {

// Band of the assumed likelihood ratio R relative to [beta/alpha, alpha/beta].
// The middle band is inclusive on both ends, which reproduces the first two
// players following their own signals without special-casing them.
enum class Regime { Low, Mid, High };

// Assumed log-likelihood ratio, decomposed as log R = k*log(gamma) + c.
// The frequent exact gamma^{+-1} factors live in the integer k; only the
// extreme-regime correction factors touch the float c.
struct CascadeState {
  uint64_t t = 0;  // steps taken
  int64_t k = 0;   // count of exact gamma^{+-1} factors
  double c = 0.0;  // log of accumulated extreme-regime corrections

  double log_ratio(const UrnModel& urn) const {
    return static_cast<double>(k) * urn.log_gamma() + c;
  }
};

struct StepOutcome {
  int decision;       // Z_t in {1, 2}
  bool was_revealer;  // implies decision == private_signal
  int private_signal; // X_t in {1, 2}
  bool correct;       // Z_t == theta
};

// Comparisons reduce to the integer k when |c| is below this tolerance.
inline constexpr double kTieTolerance = 1e-9;

Regime regime_of(const CascadeState& state, const UrnModel& urn);

// Low -> 2, High -> 1 regardless of the signal; Mid -> the signal. MAP ties
// follow the signal, which the Mid rule subsumes.
int rational_decision(Regime regime, int signal);

// One multiplicative update of R by the cancelled-form conditional ratio
// P1(Z_t = z | history) / P2(Z_t = z | history) under the assumed schedule.
// The cancelled forms are finite for every q_t in [0, 1].
CascadeState assumed_update(const CascadeState& state, Regime regime, int z,
                            double q_t, const UrnModel& urn);

// The two extreme-regime correction increments. low is defined as -high so
// that mirrored trajectories are bit-exact.
double correction_high(double q_t, const UrnModel& urn);

// One step: revealer draw (Bernoulli p_t), signal draw, decision, update.
// Consumes exactly two rng draws, revealer first.
StepOutcome step(CascadeState& state, const WorldState& world, double p_t,
                 double q_t, const UrnModel& urn, Xoshiro256pp& rng);

struct TrajectoryResult {
  std::vector<uint8_t> checkpoint_errors;  // 1{Z_t != theta} per checkpoint
  std::vector<uint64_t> cumulative_errors_at;  // running error count there
  uint64_t total_errors = 0;
  uint64_t boundary_tie_count = 0;  // float log-ratio landed exactly on a band edge
};

// Reference trajectory: draws theta from the stream (one draw) unless
// world_override is given (the draw is still consumed so the stream layout
// never changes), then runs `horizon` steps. The optimized engines are
// equivalence-tested against this path.
TrajectoryResult simulate_trajectory(const ExperimentConfig& cfg,
                                     uint64_t trial_index,
                                     const WorldState* world_override = nullptr);

// Decision sequence under forced trial seed; test hook for rule-equivalence
// checks (e.g. majority rule vs frozen-cascade dynamics).
std::vector<int> decision_sequence(const UrnModel& urn, const Schedule& truth,
                                   const Schedule& assumed, uint64_t horizon,
                                   uint64_t seed, int theta);

}  // namespace cascade
