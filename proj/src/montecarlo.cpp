#include "cascade/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/rng.hpp"
#include "engine.hpp"

namespace cascade {

namespace {

engine::StepTables build_tables(const ExperimentConfig& cfg) {
  engine::StepTables tb;
  tb.rev_threshold.resize(cfg.horizon);
  tb.corr_high.resize(cfg.horizon);
  for (uint64_t t = 1; t <= cfg.horizon; ++t) {
    tb.rev_threshold[t - 1] = bernoulli_threshold(cfg.truth.value_at(t));
    tb.corr_high[t - 1] = correction_high(cfg.assumed.value_at(t), cfg.urn);
  }
  tb.signal_threshold = bernoulli_threshold(cfg.urn.p_correct());
  tb.log_gamma = cfg.urn.log_gamma();
  return tb;
}

engine::SimdMode to_engine(SimdChoice c) {
  switch (c) {
    case SimdChoice::Scalar: return engine::SimdMode::Scalar;
    case SimdChoice::Avx2: return engine::SimdMode::Avx2;
    default: return engine::SimdMode::Auto;
  }
}

// Shared worker-pool driver; counters merge by integer addition, so the
// result is identical for any worker count and chunk schedule.
engine::Counters run_pool(const engine::Job& base_job, uint64_t trials,
                          unsigned workers, engine::KernelFn kernel) {
  engine::Counters total;
  total.init(base_job);
  const uint64_t chunk = std::max<uint64_t>(
      1024, trials / (static_cast<uint64_t>(workers) * 8) + 1);
  std::atomic<uint64_t> next_begin{0};
  std::mutex merge_mutex;
  auto work = [&]() {
    engine::Counters local;
    local.init(base_job);
    for (;;) {
      const uint64_t begin = next_begin.fetch_add(chunk);
      if (begin >= trials) break;
      engine::Job job = base_job;
      job.trial_begin = begin;
      job.trial_end = std::min(trials, begin + chunk);
      kernel(job, local);
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    total.add(local);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return total;
}

unsigned resolve_workers(const RunOptions& opts, uint64_t trials) {
  unsigned workers = opts.workers
                         ? opts.workers
                         : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<uint64_t>(workers, trials));
}

}  // namespace

double ErrorSeries::stderr_at(size_t i) const {
  const double p = p_hat(i);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double ErrorSeries::te_stderr() const {
  const double n = static_cast<double>(trials);
  const double mean = te_mean();
  const double var =
      std::max(0.0, static_cast<double>(te_sumsq) / n - mean * mean);
  return std::sqrt(var / n);
}

ErrorSeries run_experiment(const ExperimentConfig& cfg,
                           const RunOptions& opts) {
  const std::vector<uint32_t> ckpts = cfg.checkpoints.resolve(cfg.horizon);
  if (ckpts.empty()) throw ConfigError("checkpoints", "resolved to empty set");
  if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");

  const engine::StepTables tables = build_tables(cfg);
  const engine::KernelFn kernel = engine::select_kernel(to_engine(opts.simd));

  ErrorSeries series;
  series.checkpoints = ckpts;
  series.trials = cfg.trials;
  series.horizon = cfg.horizon;
  series.p_at.reserve(ckpts.size());
  series.q_at.reserve(ckpts.size());
  for (uint32_t t : ckpts) {
    series.p_at.push_back(cfg.truth.value_at(t));
    series.q_at.push_back(cfg.assumed.value_at(t));
  }
  if (opts.collect_masks) {
    series.mask_words = static_cast<uint32_t>((ckpts.size() + 63) / 64);
    series.trial_masks.assign(cfg.trials * series.mask_words, 0);
  }

  engine::Job base_job;
  base_job.tables = &tables;
  base_job.checkpoints = ckpts.data();
  base_job.n_checkpoints = static_cast<uint32_t>(ckpts.size());
  base_job.master_seed = cfg.master_seed;
  base_job.mask_out = series.trial_masks.empty() ? nullptr
                                                 : series.trial_masks.data();
  base_job.mask_words = series.mask_words;

  engine::Counters total =
      run_pool(base_job, cfg.trials, resolve_workers(opts, cfg.trials), kernel);

  series.error_counts = std::move(total.ckpt_err);
  series.te_counts = std::move(total.ckpt_te);
  series.te_sum = total.te_sum;
  series.te_sumsq = total.te_sumsq;
  return series;
}

PerStepSeries run_experiment_per_step(const ExperimentConfig& cfg,
                                      const RunOptions& opts) {
  if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");
  const engine::StepTables tables = build_tables(cfg);
  const engine::KernelFn kernel = engine::select_kernel(to_engine(opts.simd));

  // One checkpoint at the horizon keeps the job struct valid; tallies come
  // from the per-step recording.
  const uint32_t last = static_cast<uint32_t>(cfg.horizon);
  engine::Job base_job;
  base_job.tables = &tables;
  base_job.checkpoints = &last;
  base_job.n_checkpoints = 1;
  base_job.master_seed = cfg.master_seed;
  base_job.record_per_step = true;

  engine::Counters total =
      run_pool(base_job, cfg.trials, resolve_workers(opts, cfg.trials), kernel);

  PerStepSeries out;
  out.step_errors = std::move(total.step_err);
  out.trials = cfg.trials;
  const double n = static_cast<double>(cfg.trials);
  out.te_mean = static_cast<double>(total.te_sum) / n;
  const double var = std::max(
      0.0, static_cast<double>(total.te_sumsq) / n - out.te_mean * out.te_mean);
  out.te_stderr = std::sqrt(var / n);
  return out;
}

namespace {

struct WlsPoint {
  double log_t, log_p, weight;
  size_t index;
};

std::vector<WlsPoint> usable_points(const ErrorSeries& s, FitWindow window,
                                    const FitOptions& opts) {
  std::vector<WlsPoint> pts;
  for (size_t i = 0; i < s.checkpoints.size(); ++i) {
    const double t = static_cast<double>(s.checkpoints[i]);
    const uint64_t count = s.error_counts[i];
    if (t < window.t_min || t > window.t_max) continue;
    if (count < opts.min_count || count >= s.trials) continue;
    const double p = s.p_hat(i);
    const double se_log = s.stderr_at(i) / p;
    pts.push_back({std::log(t), std::log(p), 1.0 / (se_log * se_log), i});
  }
  return pts;
}

struct WlsLine {
  double slope, intercept;
};

WlsLine wls(const std::vector<WlsPoint>& pts) {
  double w_sum = 0, x_mean = 0, y_mean = 0;
  for (const auto& p : pts) w_sum += p.weight;
  for (const auto& p : pts) {
    x_mean += p.weight * p.log_t / w_sum;
    y_mean += p.weight * p.log_p / w_sum;
  }
  double num = 0, den = 0;
  for (const auto& p : pts) {
    num += p.weight * (p.log_t - x_mean) * (p.log_p - y_mean);
    den += p.weight * (p.log_t - x_mean) * (p.log_t - x_mean);
  }
  const double slope = num / den;
  return {slope, y_mean - slope * x_mean};
}

}  // namespace

SlopeFit fit_rate(const ErrorSeries& series, FitWindow window,
                  const FitOptions& opts) {
  std::vector<WlsPoint> pts = usable_points(series, window, opts);
  if (pts.size() < opts.min_points)
    throw InsufficientData("fewer than " + std::to_string(opts.min_points) +
                           " checkpoints above the count floor in the window");
  const WlsLine line = wls(pts);

  SlopeFit fit;
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.window = window;
  fit.points_used = pts.size();

  // Bootstrap over trial resampling when masks exist, otherwise parametric
  // binomial resampling of the counts. Point selection is kept fixed.
  const uint32_t B = opts.bootstrap_resamples;
  if (B == 0) {
    fit.ci_low = fit.ci_high = line.slope;
    return fit;
  }
  std::vector<double> slopes;
  slopes.reserve(B);
  SplitMix64 boot_rng(0x626F6F74ULL);  // fixed salt: CI reproducible per series
  const double n = static_cast<double>(series.trials);
  for (uint32_t b = 0; b < B; ++b) {
    std::vector<uint64_t> counts(pts.size(), 0);
    if (!series.trial_masks.empty()) {
      for (uint64_t i = 0; i < series.trials; ++i) {
        // Lemire-style bounded draw is biased by < 2^-32 here; fine for a CI.
        const uint64_t trial =
            static_cast<uint64_t>((static_cast<unsigned __int128>(boot_rng.next()) *
                                   series.trials) >> 64);
        const uint64_t* mask = series.trial_masks.data() + trial * series.mask_words;
        for (size_t j = 0; j < pts.size(); ++j) {
          const size_t ck = pts[j].index;
          counts[j] += (mask[ck >> 6] >> (ck & 63)) & 1;
        }
      }
    } else {
      for (size_t j = 0; j < pts.size(); ++j) {
        const double p = series.p_hat(pts[j].index);
        uint64_t c = 0;  // binomial via normal approximation, counts >= 50
        const double z = [&] {
          // Box-Muller from two uniforms.
          const double u1 = (boot_rng.next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
          const double u2 = (boot_rng.next() >> 11) * 0x1.0p-53;
          return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        }();
        const double mean = n * p, sd = std::sqrt(n * p * (1.0 - p));
        c = static_cast<uint64_t>(std::max(1.0, std::round(mean + z * sd)));
        counts[j] = c;
      }
    }
    std::vector<WlsPoint> bpts = pts;
    bool ok = true;
    for (size_t j = 0; j < bpts.size(); ++j) {
      if (counts[j] == 0 || counts[j] >= series.trials) {
        ok = false;
        break;
      }
      const double p = static_cast<double>(counts[j]) / n;
      const double se_log = std::sqrt(p * (1.0 - p) / n) / p;
      bpts[j].log_p = std::log(p);
      bpts[j].weight = 1.0 / (se_log * se_log);
    }
    if (!ok) continue;
    slopes.push_back(wls(bpts).slope);
  }
  if (slopes.size() < 8) {
    fit.ci_low = fit.ci_high = line.slope;
    return fit;
  }
  std::sort(slopes.begin(), slopes.end());
  const auto pick = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, slopes.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return slopes[lo] * (1.0 - frac) + slopes[hi] * frac;
  };
  fit.ci_low = pick(0.025);
  fit.ci_high = pick(0.975);
  return fit;
}

analytic::RateResult analytic_rate_for(const ExperimentConfig& cfg) {
  const double gamma = cfg.urn.gamma();

  // rho: declared for Scaled assumed, otherwise a prefix-norm ratio estimate.
  double rho;
  if (const auto* sc = std::get_if<Schedule::Scaled>(&cfg.assumed.spec())) {
    rho = sc->rho;
  } else {
    const uint64_t t_ref = std::max<uint64_t>(cfg.horizon, 1000);
    const double pn = cfg.truth.prefix_norm(t_ref);
    rho = pn > 0 ? cfg.assumed.prefix_norm(t_ref) / pn : 0.0;
  }
  if (rho <= 0.0) return {0.0, analytic::RegimeTag::NoLearning};

  // scale accumulates Scaled factors on the truth side; it multiplies the
  // ||P_t||/log t constant, not the mismatch ratio rho.
  struct Visitor {
    double gamma, rho, scale;
    analytic::RateResult operator()(const Schedule::OptimalMatched& s) const {
      if (scale == 1.0) return analytic::rate_thm3(gamma, rho);
      return analytic::rate_thm5(gamma, rho, scale * s.coefficient);
    }
    analytic::RateResult operator()(const Schedule::Scaled& s) const {
      return std::visit(Visitor{gamma, rho, scale * s.rho}, s.base->spec());
    }
    analytic::RateResult operator()(const Schedule::Harmonic& s) const {
      return analytic::rate_thm5(gamma, rho, scale * s.c_p);
    }
    analytic::RateResult operator()(const Schedule::PowerLaw& s) const {
      if (s.exponent >= 1.0)
        return analytic::rate_thm5(gamma, rho, scale * s.coefficient);
      return analytic::rate_thm6(gamma, s.exponent, rho);
    }
    analytic::RateResult operator()(const Schedule::Constant& s) const {
      // ||P_t|| grows linearly (omega(log t)); p_t = Theta(t^0), rate 0.
      (void)s;
      return {0.0, analytic::RegimeTag::NoLearning};
    }
    analytic::RateResult operator()(const Schedule::Table&) const {
      // Finite ||P||: almost surely finitely many revealers, no learning.
      return {0.0, analytic::RegimeTag::NoLearning};
    }
  };
  return std::visit(Visitor{gamma, rho, 1.0}, cfg.truth.spec());
}

std::vector<SweepRow> sweep(const ExperimentConfig& base,
                            const std::vector<double>& gammas,
                            const std::vector<double>& rhos, FitWindow window,
                            const RunOptions& opts, const FitOptions& fit_opts) {
  std::vector<SweepRow> rows;
  const std::vector<double> gamma_list =
      gammas.empty() ? std::vector<double>{base.urn.gamma()} : gammas;
  for (double g : gamma_list) {
    ExperimentConfig cfg = base;
    cfg.urn = UrnModel::from_gamma(g);
    if (std::holds_alternative<Schedule::OptimalMatched>(base.truth.spec())) {
      const auto& om = std::get<Schedule::OptimalMatched>(base.truth.spec());
      cfg.truth = Schedule::optimal_matched(g, om.epsilon);
    }
    for (double rho : rhos) {
      cfg.assumed = Schedule::scaled(cfg.truth, rho);
      const ErrorSeries series = run_experiment(cfg, opts);
      SweepRow row;
      row.gamma = g;
      row.rho = rho;
      const analytic::RateResult ar = analytic_rate_for(cfg);
      row.analytic_rate = ar.value;
      row.tag = ar.tag;
      try {
        const SlopeFit fit = fit_rate(series, window, fit_opts);
        row.empirical_rate = -fit.slope;
        row.ci_low = -fit.ci_high;
        row.ci_high = -fit.ci_low;
        row.points_used = fit.points_used;
      } catch (const InsufficientData&) {
        row.empirical_rate = std::nan("");
        row.ci_low = row.ci_high = std::nan("");
        row.points_used = 0;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace cascade
