#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cascade/analytic.hpp"
#include "cascade/model.hpp"

namespace cascade {

// Per-checkpoint error-frequency estimates. Tallies are integer counts and
// reproduce bit-exactly from the master seed regardless of worker count.
struct ErrorSeries {
  std::vector<uint32_t> checkpoints;
  std::vector<double> p_at, q_at;          // schedule values at checkpoints
  std::vector<uint64_t> error_counts;      // 1{Z_t != theta} tallies
  std::vector<uint64_t> te_counts;         // summed cumulative errors there
  uint64_t trials = 0;
  uint64_t horizon = 0;
  uint64_t te_sum = 0, te_sumsq = 0;       // total errors at horizon

  // Per-trial checkpoint-error bitmasks (mask_words u64 per trial), kept for
  // the trial-resampling bootstrap. Empty when not collected.
  std::vector<uint64_t> trial_masks;
  uint32_t mask_words = 0;

  double p_hat(size_t i) const {
    return static_cast<double>(error_counts[i]) / static_cast<double>(trials);
  }
  double stderr_at(size_t i) const;
  double te_mean() const {
    return static_cast<double>(te_sum) / static_cast<double>(trials);
  }
  double te_mean_at(size_t i) const {
    return static_cast<double>(te_counts[i]) / static_cast<double>(trials);
  }
  double te_stderr() const;
};

struct FitWindow {
  double t_min = 1.0;
  double t_max = 1e18;
};

struct FitOptions {
  uint64_t min_count = 50;        // error-count floor per usable checkpoint
  size_t min_points = 4;
  uint32_t bootstrap_resamples = 200;
};

struct SlopeFit {
  double slope = 0.0;      // of log p_hat on log t; empirical rate is -slope
  double intercept = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // bootstrap 95% interval for slope
  FitWindow window;
  size_t points_used = 0;
};

enum class SimdChoice { Auto, Scalar, Avx2 };

struct RunOptions {
  unsigned workers = 0;  // 0 = hardware concurrency
  SimdChoice simd = SimdChoice::Auto;
  bool collect_masks = true;
};

ErrorSeries run_experiment(const ExperimentConfig& cfg,
                           const RunOptions& opts = {});

// Per-step error tallies over the whole horizon (per-player frequencies in
// the fixed-placement experiments). Checkpoint config is ignored.
struct PerStepSeries {
  std::vector<uint64_t> step_errors;  // index t-1
  uint64_t trials = 0;
  double te_mean = 0.0;
  double te_stderr = 0.0;
};
PerStepSeries run_experiment_per_step(const ExperimentConfig& cfg,
                                      const RunOptions& opts = {});

// Weighted least squares of log p_hat on log t; weights are 1/stderr^2
// propagated to the log scale. Bootstrap resamples trials (from the stored
// masks) when available, otherwise per-checkpoint binomial counts.
SlopeFit fit_rate(const ErrorSeries& series, FitWindow window,
                  const FitOptions& opts = {});

// Analytic prediction for a (truth, assumed) pair, dispatching on the truth
// schedule family. The norm ratio rho is taken from a Scaled assumed
// schedule when present, otherwise estimated from prefix norms.
analytic::RateResult analytic_rate_for(const ExperimentConfig& cfg);

struct SweepRow {
  double gamma = 0.0, rho = 0.0;
  double empirical_rate = 0.0;  // -slope
  double ci_low = 0.0, ci_high = 0.0;  // for the empirical rate
  double analytic_rate = 0.0;
  analytic::RegimeTag tag = analytic::RegimeTag::NoLearning;
  size_t points_used = 0;
};

// Grid run: per rho, assumed := rho * truth; per gamma the urn and truth are
// rebuilt with the same family.
std::vector<SweepRow> sweep(const ExperimentConfig& base,
                            const std::vector<double>& gammas,
                            const std::vector<double>& rhos, FitWindow window,
                            const RunOptions& opts = {},
                            const FitOptions& fit_opts = {});

}  // namespace cascade
