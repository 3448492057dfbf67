#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>

#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/model.hpp"
#include "cascade/oracle.hpp"

using namespace cascade;
using oracle::Rational;

namespace {

ExperimentConfig make_cfg(double gamma, Schedule truth, Schedule assumed) {
  return ExperimentConfig{UrnModel::from_gamma(gamma),
                          std::move(truth),
                          std::move(assumed),
                          32,
                          CheckpointSpec{CheckpointSpec::Kind::Geometric, 5, {}},
                          1,
                          0};
}

const ExperimentConfig kClassic =
    make_cfg(2.0, Schedule::constant(0.0), Schedule::constant(0.0));
const ExperimentConfig kFixtureB =
    make_cfg(2.0, Schedule::harmonic(2.0),
             Schedule::scaled(Schedule::harmonic(2.0), 0.5));
const ExperimentConfig kFixtureC =
    make_cfg(3.0, Schedule::harmonic(2.0),
             Schedule::scaled(Schedule::harmonic(2.0), 2.0));

// Exact distribution of the FLOAT dynamics: branch every (revealer, signal)
// pair with exact rational masses while the state itself evolves through the
// double-precision CascadeState. Agreement with the oracle's all-rational DP
// confirms that no floating regime decision ever deviates from the exact one.
std::vector<Rational> float_dynamics_exact_series(const ExperimentConfig& cfg,
                                                  uint32_t horizon) {
  struct Key {
    int64_t k;
    uint64_t c_bits;
    bool operator<(const Key& o) const {
      return k != o.k ? k < o.k : c_bits < o.c_bits;
    }
  };
  const Rational gamma = oracle::rationalize(cfg.urn.gamma());
  const Rational sig_maj = gamma / (1 + gamma);
  const Rational sig_min = Rational(1) / (1 + gamma);

  std::map<Key, std::pair<CascadeState, Rational>> dist;
  dist[{0, std::bit_cast<uint64_t>(0.0)}] = {CascadeState{}, Rational(1)};
  std::vector<Rational> out;
  for (uint32_t t = 1; t <= horizon; ++t) {
    const double p_f = cfg.truth.value_at(t);
    const double q_f = cfg.assumed.value_at(t);
    const Rational p = oracle::rationalize(p_f);
    std::map<Key, std::pair<CascadeState, Rational>> next;
    Rational err = 0;
    for (const auto& [key, entry] : dist) {
      const auto& [state, mass] = entry;
      const Regime regime = regime_of(state, cfg.urn);
      for (int rev = 0; rev < 2; ++rev) {
        const Rational w1 = rev ? p : 1 - p;
        if (w1 == 0) continue;
        for (int correct = 0; correct < 2; ++correct) {
          const Rational w2 = correct ? sig_maj : sig_min;
          const int x = correct ? 1 : 2;  // theta = 1
          const int z = rev ? x : rational_decision(regime, x);
          const Rational w = mass * w1 * w2;
          if (z != 1) err += w;
          const CascadeState ns = assumed_update(state, regime, z, q_f, cfg.urn);
          next[{ns.k, std::bit_cast<uint64_t>(ns.c)}].first = ns;
          next[{ns.k, std::bit_cast<uint64_t>(ns.c)}].second += w;
        }
      }
    }
    dist = std::move(next);
    out.push_back(err);
  }
  return out;
}

}  // namespace

TEST_CASE("rationalize") {
  CHECK(oracle::rationalize(0.5) == Rational(1, 2));
  CHECK(oracle::rationalize(2.0 / 3.0) == Rational(2, 3));
  CHECK(oracle::rationalize(2.0) == Rational(2));
  CHECK(oracle::rationalize(0.0) == Rational(0));
  CHECK(oracle::rationalize(1.0) == Rational(1));
  CHECK_THROWS_AS(oracle::rationalize(std::sqrt(2.0), 1e-12, 100000),
                  std::domain_error);
}

TEST_CASE("classic cascade fixture: exact values") {
  const auto series = oracle::exact_error_series(kClassic, 6);
  const std::vector<Rational> expected = {
      Rational(1, 3),  Rational(1, 3),   Rational(7, 27),
      Rational(7, 27), Rational(55, 243), Rational(55, 243)};
  REQUIRE(series.p_e.size() == 6);
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(series.p_e[i] == expected[i]);
  CHECK(oracle::exact_total_errors(kClassic, 1) == Rational(1, 3));
  CHECK(oracle::exact_total_errors(kClassic, 2) == Rational(2, 3));
  CHECK(oracle::exact_total_errors(kClassic, 3) == Rational(25, 27));
}

TEST_CASE("t = 1 is exactly 1/(1+gamma) for any config") {
  CHECK(oracle::exact_error_series(kFixtureB, 1).p_e[0] == Rational(1, 3));
  CHECK(oracle::exact_error_series(kFixtureC, 1).p_e[0] == Rational(1, 4));
  CHECK(oracle::exact_error_series(kClassic, 1).p_e[0] == Rational(1, 3));
}

TEST_CASE("mismatched fixtures: frozen exact values") {
  const auto b = oracle::exact_error_series(kFixtureB, 6);
  const std::vector<Rational> expect_b = {
      Rational(1, 3),   Rational(1, 3),    Rational(25, 81),
      Rational(8, 27),  Rational(319, 1215), Rational(2777, 10935)};
  for (size_t i = 0; i < expect_b.size(); ++i) CHECK(b.p_e[i] == expect_b[i]);

  const auto c = oracle::exact_error_series(kFixtureC, 6);
  const std::vector<Rational> expect_c = {
      Rational(1, 4),   Rational(1, 4),   Rational(7, 32),
      Rational(13, 64), Rational(53, 320), Rational(199, 1280)};
  for (size_t i = 0; i < expect_c.size(); ++i) CHECK(c.p_e[i] == expect_c[i]);
}

TEST_CASE("symmetry: theta = 2 with relabeled outcomes is identical") {
  for (const auto* cfg : {&kClassic, &kFixtureB, &kFixtureC}) {
    const auto s1 = oracle::exact_error_series(*cfg, 8, {}, 1);
    const auto s2 = oracle::exact_error_series(*cfg, 8, {}, 2);
    REQUIRE(s1.p_e.size() == s2.p_e.size());
    for (size_t i = 0; i < s1.p_e.size(); ++i) CHECK(s1.p_e[i] == s2.p_e[i]);
  }
}

TEST_CASE("revealer lower bound: p_e >= p_t / (1+gamma)") {
  for (const auto* cfg : {&kFixtureB, &kFixtureC}) {
    const auto series = oracle::exact_error_series(*cfg, 10);
    const Rational gamma = oracle::rationalize(cfg->urn.gamma());
    for (uint32_t t = 1; t <= 10; ++t) {
      const Rational p = oracle::rationalize(cfg->truth.value_at(t));
      CHECK(series.p_e[t - 1] >= p / (1 + gamma));
    }
  }
}

TEST_CASE("classic series decreases toward the wrong-cascade limit 1/5") {
  const auto series = oracle::exact_error_series(kClassic, 20);
  for (size_t i = 1; i < series.p_e.size(); ++i)
    CHECK(series.p_e[i] <= series.p_e[i - 1]);
  CHECK(series.p_e[19] > Rational(1, 5));
  CHECK(series.p_e[19] - Rational(1, 5) < series.p_e[4] - Rational(1, 5));
  CHECK(static_cast<double>(series.p_e[19]) < 0.205);
}

TEST_CASE("float dynamics agrees with the exact oracle, branch by branch") {
  for (const auto* cfg : {&kClassic, &kFixtureB, &kFixtureC}) {
    const uint32_t horizon = 12;
    const auto exact = oracle::exact_error_series(*cfg, horizon);
    const auto floated = float_dynamics_exact_series(*cfg, horizon);
    REQUIRE(floated.size() == horizon);
    for (uint32_t t = 0; t < horizon; ++t)
      CHECK(exact.p_e[t] == floated[t]);  // exact rational equality
  }
}

TEST_CASE("budget guards") {
  CHECK_THROWS_AS(oracle::exact_error_series(kFixtureB, 21), BudgetExceeded);
  oracle::OracleLimits tight;
  tight.max_states = 3;
  CHECK_THROWS_AS(oracle::exact_error_series(kFixtureB, 10, tight),
                  BudgetExceeded);
  ExperimentConfig irr = kFixtureB;
  irr.urn = UrnModel(std::sqrt(2.0) * 100000.0, 100000.0);
  CHECK_THROWS_AS(oracle::exact_error_series(irr, 4), std::domain_error);
}
