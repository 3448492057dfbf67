#pragma once

// Trajectory kernels for the Monte Carlo engine. The simulation runs in
// coordinates relative to the true world state (k > 0 favors the truth),
// which is an exact mirror of the absolute dynamics for either theta; the
// per-trial theta draw is still consumed so the stream layout matches the
// reference path in dynamics.cpp. Kernels must produce bit-identical
// counters for a given master seed: the scalar kernel is the reference, the
// AVX2 kernel is equivalence-tested against it.

#include <cstdint>
#include <vector>

namespace cascade::engine {

// Per-step tables, index 0 <-> t = 1.
struct StepTables {
  std::vector<uint64_t> rev_threshold;  // Bernoulli(p_t) threshold
  std::vector<double> corr_high;        // extreme-regime log correction, >= 0
  uint64_t signal_threshold = 0;        // Bernoulli(P(X = theta)) threshold
  double log_gamma = 0.0;
  uint64_t horizon() const { return rev_threshold.size(); }
};

struct Job {
  const StepTables* tables = nullptr;
  const uint32_t* checkpoints = nullptr;  // sorted, 1-based steps
  uint32_t n_checkpoints = 0;
  uint64_t master_seed = 0;
  uint64_t trial_begin = 0;
  uint64_t trial_end = 0;
  bool record_per_step = false;  // per-player error tallies (adversarial)
  uint64_t* mask_out = nullptr;  // per-trial checkpoint-error bits, or null
  uint32_t mask_words = 0;       // stride of mask_out per trial
};

struct Counters {
  std::vector<uint64_t> ckpt_err;  // 1{Z_t != theta} tallies per checkpoint
  std::vector<uint64_t> ckpt_te;   // cumulative error count at checkpoint
  std::vector<uint64_t> step_err;  // per-step tallies (record_per_step)
  uint64_t te_sum = 0;             // total errors at horizon, summed
  uint64_t te_sumsq = 0;           // and its square, for the te stderr

  void init(const Job& job);
  void add(const Counters& other);
};

using KernelFn = void (*)(const Job&, Counters&);

void run_trials_scalar(const Job& job, Counters& out);
#if defined(CASCADE_HAVE_AVX2_KERNEL)
void run_trials_avx2(const Job& job, Counters& out);
#endif

enum class SimdMode { Auto, Scalar, Avx2 };

// Runtime kernel choice; Auto probes cpu support. Avx2 on unsupported
// hardware falls back to scalar.
KernelFn select_kernel(SimdMode mode);
bool avx2_available();

}  // namespace cascade::engine
