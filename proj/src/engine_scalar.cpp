#include <cmath>

#include "cascade/dynamics.hpp"
#include "cascade/rng.hpp"
#include "engine.hpp"

namespace cascade::engine {

void Counters::init(const Job& job) {
  ckpt_err.assign(job.n_checkpoints, 0);
  ckpt_te.assign(job.n_checkpoints, 0);
  step_err.assign(job.record_per_step ? job.tables->horizon() : 0, 0);
  te_sum = te_sumsq = 0;
}

void Counters::add(const Counters& other) {
  for (size_t i = 0; i < ckpt_err.size(); ++i) ckpt_err[i] += other.ckpt_err[i];
  for (size_t i = 0; i < ckpt_te.size(); ++i) ckpt_te[i] += other.ckpt_te[i];
  for (size_t i = 0; i < step_err.size(); ++i) step_err[i] += other.step_err[i];
  te_sum += other.te_sum;
  te_sumsq += other.te_sumsq;
}

void run_trials_scalar(const Job& job, Counters& out) {
  const StepTables& tb = *job.tables;
  const uint64_t horizon = tb.horizon();
  const double band = tb.log_gamma;
  const double band_tol = tb.log_gamma + kTieTolerance;

  for (uint64_t trial = job.trial_begin; trial < job.trial_end; ++trial) {
    Xoshiro256pp rng(trial_seed(job.master_seed, trial));
    (void)rng.next();  // theta draw; relative coordinates make it inert

    int64_t k = 0;
    double c = 0.0;
    uint64_t te = 0;
    uint32_t next_ckpt = 0;
    uint64_t* mask =
        job.mask_out ? job.mask_out + trial * job.mask_words : nullptr;

    for (uint64_t t = 1; t <= horizon; ++t) {
      const uint64_t u_rev = rng.next();
      const uint64_t u_sig = rng.next();
      const bool revealer = bernoulli(u_rev, tb.rev_threshold[t - 1]);
      const bool sig_correct = bernoulli(u_sig, tb.signal_threshold);

      bool low, high;
      if (std::abs(c) < kTieTolerance) {
        low = k < -1;
        high = k > 1;
      } else {
        const double x = static_cast<double>(k) * band + c;
        low = x < -band_tol;
        high = x > band_tol;
      }

      const bool z_correct =
          revealer ? sig_correct : (high ? true : (low ? false : sig_correct));
      const bool err = !z_correct;
      te += err;

      if (next_ckpt < job.n_checkpoints && t == job.checkpoints[next_ckpt]) {
        out.ckpt_err[next_ckpt] += err;
        out.ckpt_te[next_ckpt] += te;
        if (mask && err) mask[next_ckpt >> 6] |= 1ULL << (next_ckpt & 63);
        ++next_ckpt;
      }
      if (job.record_per_step) out.step_err[t - 1] += err;

      if (low) {
        if (z_correct)
          k += 1;
        else
          c -= tb.corr_high[t - 1];
      } else if (high) {
        if (z_correct)
          c += tb.corr_high[t - 1];
        else
          k -= 1;
      } else {
        k += z_correct ? 1 : -1;
      }
    }
    out.te_sum += te;
    out.te_sumsq += te * te;
  }
}

}  // namespace cascade::engine
