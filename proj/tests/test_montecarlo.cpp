#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/montecarlo.hpp"
#include "cascade/oracle.hpp"
#include "engine.hpp"
#include "test_util.hpp"

using namespace cascade;

namespace {

ExperimentConfig small_cfg() {
  ExperimentConfig cfg{UrnModel::from_gamma(3.0),
                       Schedule::harmonic(2.0),
                       Schedule::scaled(Schedule::harmonic(2.0), 1.5),
                       300,
                       CheckpointSpec{CheckpointSpec::Kind::Geometric, 8, {}},
                       500,
                       20240615};
  return cfg;
}

}  // namespace

TEST_CASE("scalar kernel reproduces the reference trajectory, trial by trial") {
  const ExperimentConfig cfg = small_cfg();
  RunOptions opts;
  opts.workers = 1;
  opts.simd = SimdChoice::Scalar;
  const ErrorSeries series = run_experiment(cfg, opts);
  REQUIRE(series.mask_words == 1);

  std::vector<uint64_t> counts(series.checkpoints.size(), 0);
  uint64_t te_sum = 0, te_sumsq = 0;
  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    const TrajectoryResult ref = simulate_trajectory(cfg, trial);
    const uint64_t mask = series.trial_masks[trial];
    for (size_t i = 0; i < series.checkpoints.size(); ++i) {
      CHECK(((mask >> i) & 1) == ref.checkpoint_errors[i]);
      counts[i] += ref.checkpoint_errors[i];
    }
    te_sum += ref.total_errors;
    te_sumsq += ref.total_errors * ref.total_errors;
  }
  CHECK(counts == series.error_counts);
  CHECK(te_sum == series.te_sum);
  CHECK(te_sumsq == series.te_sumsq);
}

TEST_CASE("avx2 kernel is bit-identical to the scalar kernel") {
  if (!engine::avx2_available()) {
    MESSAGE("AVX2 not available on this host; kernel falls back to scalar");
    return;
  }
  for (double gamma : {2.0, 10.0}) {
    ExperimentConfig cfg = small_cfg();
    cfg.urn = UrnModel::from_gamma(gamma);
    cfg.truth = Schedule::optimal_matched(gamma);
    cfg.assumed = Schedule::scaled(cfg.truth, 2.2);
    cfg.trials = 1003;  // forces an avx2 tail remainder
    RunOptions scalar, avx2;
    scalar.workers = 1;
    scalar.simd = SimdChoice::Scalar;
    avx2.workers = 1;
    avx2.simd = SimdChoice::Avx2;
    const ErrorSeries a = run_experiment(cfg, scalar);
    const ErrorSeries b = run_experiment(cfg, avx2);
    CHECK(a.error_counts == b.error_counts);
    CHECK(a.te_counts == b.te_counts);
    CHECK(a.te_sum == b.te_sum);
    CHECK(a.te_sumsq == b.te_sumsq);
    CHECK(a.trial_masks == b.trial_masks);
  }
}

TEST_CASE("worker count does not change any tally") {
  const ExperimentConfig cfg = small_cfg();
  RunOptions w1, w3, w8;
  w1.workers = 1;
  w3.workers = 3;
  w8.workers = 8;
  const ErrorSeries a = run_experiment(cfg, w1);
  const ErrorSeries b = run_experiment(cfg, w3);
  const ErrorSeries c = run_experiment(cfg, w8);
  CHECK(a.error_counts == b.error_counts);
  CHECK(a.error_counts == c.error_counts);
  CHECK(a.te_counts == b.te_counts);
  CHECK(a.te_sum == b.te_sum);
  CHECK(a.te_sumsq == c.te_sumsq);
  CHECK(a.trial_masks == b.trial_masks);
  CHECK(a.trial_masks == c.trial_masks);
}

TEST_CASE("all revealers: p_hat near 1/(1+gamma) at every checkpoint") {
  ExperimentConfig cfg{UrnModel::from_gamma(2.0),
                       Schedule::constant(1.0),
                       Schedule::constant(1.0),
                       1000,
                       CheckpointSpec{CheckpointSpec::Kind::Geometric, 6, {}},
                       100000,
                       7};
  const ErrorSeries s = run_experiment(cfg);
  for (size_t i = 0; i < s.checkpoints.size(); ++i)
    CHECK(testutil::binomial_sigmas(s.p_hat(i), 1.0 / 3.0, s.trials) < 4.0);
}

TEST_CASE("monte carlo matches the exact oracle within 4 sigma (small t)") {
  CheckpointSpec every;
  every.kind = CheckpointSpec::Kind::Explicit;
  every.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  ExperimentConfig cfg{UrnModel::from_gamma(2.0),
                       Schedule::harmonic(2.0),
                       Schedule::scaled(Schedule::harmonic(2.0), 0.5),
                       10,
                       every,
                       200000,
                       5150};
  const ErrorSeries s = run_experiment(cfg);
  const auto exact = oracle::exact_error_series(cfg, 10);
  for (size_t i = 0; i < 10; ++i) {
    const double p_true = static_cast<double>(exact.p_e[i]);
    CHECK(testutil::binomial_sigmas(s.p_hat(i), p_true, s.trials) < 4.0);
  }
}

TEST_CASE("fit_rate on synthetic series") {
  SUBCASE("exact power law gives slope -1") {
    ErrorSeries s;
    s.checkpoints = {10, 20, 40, 80};
    s.trials = 1000000;
    s.error_counts = {8000, 4000, 2000, 1000};  // p_hat = 0.08 / t
    s.te_counts = {0, 0, 0, 0};
    s.p_at = s.q_at = {0, 0, 0, 0};
    FitOptions opts;
    opts.bootstrap_resamples = 0;
    const SlopeFit fit = fit_rate(s, {1.0, 1e9}, opts);
    CHECK(std::abs(fit.slope + 1.0) < 1e-12);
    CHECK(fit.points_used == 4);
  }
  SUBCASE("constant series gives slope 0") {
    ErrorSeries s;
    s.checkpoints = {10, 100, 1000, 10000};
    s.trials = 1000000;
    s.error_counts = {5000, 5000, 5000, 5000};
    s.te_counts = {0, 0, 0, 0};
    s.p_at = s.q_at = {0, 0, 0, 0};
    FitOptions opts;
    opts.bootstrap_resamples = 0;
    CHECK(std::abs(fit_rate(s, {1.0, 1e9}, opts).slope) < 1e-12);
  }
  SUBCASE("count floor empties the window") {
    ErrorSeries s;
    s.checkpoints = {10, 20, 40, 80};
    s.trials = 1000;
    s.error_counts = {30, 20, 10, 5};  // all below the default floor of 50
    s.te_counts = {0, 0, 0, 0};
    s.p_at = s.q_at = {0, 0, 0, 0};
    CHECK_THROWS_AS(fit_rate(s, {1.0, 1e9}), InsufficientData);
  }
  SUBCASE("bootstrap interval brackets the estimate on real data") {
    ExperimentConfig cfg{UrnModel::from_gamma(10.0),
                         Schedule::optimal_matched(10.0),
                         Schedule::scaled(Schedule::optimal_matched(10.0), 1.0),
                         1000,
                         CheckpointSpec{CheckpointSpec::Kind::Geometric, 12, {}},
                         100000,
                         99};
    const ErrorSeries s = run_experiment(cfg);
    const SlopeFit fit = fit_rate(s, {10.0, 1000.0});
    CHECK(fit.ci_low <= fit.slope);
    CHECK(fit.ci_high >= fit.slope);
    CHECK(fit.ci_high - fit.ci_low < 1.0);
    CHECK(fit.ci_high - fit.ci_low > 0.0);
  }
}

TEST_CASE("te growth: sublinear when learning, linear when not") {
  auto te_mean_at = [](double gamma, double rho, uint64_t horizon) {
    ExperimentConfig cfg{
        UrnModel::from_gamma(gamma),
        Schedule::optimal_matched(gamma),
        Schedule::scaled(Schedule::optimal_matched(gamma), rho),
        horizon,
        CheckpointSpec{CheckpointSpec::Kind::Geometric, 4, {}},
        20000,
        1234};
    return run_experiment(cfg).te_mean();
  };
  // matched: te/t collapses by more than 4x from horizon 1e2 to 1e4
  CHECK(te_mean_at(10.0, 1.0, 10000) / 10000.0 <
        0.25 * te_mean_at(10.0, 1.0, 100) / 100.0);
  // no learning: the marginal error rate is roughly constant once past the
  // early transient, i.e. te grows linearly
  const double te3 = te_mean_at(2.0, 5.0, 1000);
  const double te4 = te_mean_at(2.0, 5.0, 10000);
  const double te5 = te_mean_at(2.0, 5.0, 100000);
  const double rate_34 = (te4 - te3) / 9.0e3;
  const double rate_45 = (te5 - te4) / 9.0e4;
  CHECK(rate_45 > 0.5 * rate_34);
  CHECK(rate_45 < 2.0 * rate_34);
}

TEST_CASE("analytic_rate_for dispatches on the truth family") {
  using analytic::RegimeTag;
  ExperimentConfig cfg = small_cfg();

  cfg.urn = UrnModel::from_gamma(10.0);
  cfg.truth = Schedule::optimal_matched(10.0);
  cfg.assumed = Schedule::scaled(cfg.truth, 1.0);
  CHECK(analytic_rate_for(cfg).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(analytic_rate_for(cfg).tag == RegimeTag::MatchedOptimal);

  cfg.assumed = Schedule::scaled(cfg.truth, 5.0);
  CHECK(analytic_rate_for(cfg).value == 0.0);
  CHECK(analytic_rate_for(cfg).tag == RegimeTag::NoLearning);

  cfg.truth = Schedule::harmonic(2.0);
  cfg.assumed = Schedule::scaled(cfg.truth, 1.0);
  CHECK(testutil::close_rel(analytic_rate_for(cfg).value,
                            2.0 * 0.21996282268449896, 1e-10));

  cfg.truth = Schedule::power_law(1.0, 0.5);
  cfg.assumed = Schedule::scaled(cfg.truth, 1.0);
  CHECK(analytic_rate_for(cfg).value == 0.5);
  CHECK(analytic_rate_for(cfg).tag == RegimeTag::RevealDominated);

  cfg.truth = Schedule::optimal_matched(10.0);
  cfg.assumed = Schedule::table({1.0, 1.0});
  const auto res = analytic_rate_for(cfg);
  CHECK(res.value == 0.0);  // finite ||Q||: rho estimate ~ 0
}

TEST_CASE("sweep attaches analytic predictions") {
  ExperimentConfig base{UrnModel::from_gamma(10.0),
                        Schedule::optimal_matched(10.0),
                        Schedule::optimal_matched(10.0),
                        400,
                        CheckpointSpec{CheckpointSpec::Kind::Geometric, 8, {}},
                        20000,
                        42};
  const auto rows = sweep(base, {}, {0.1, 1.0}, {5.0, 400.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].rho == 0.1);
  CHECK(rows[0].analytic_rate == 0.0);
  CHECK(rows[1].analytic_rate == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rows[1].tag == analytic::RegimeTag::MatchedOptimal);
}
