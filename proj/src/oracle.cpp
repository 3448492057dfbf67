#include "cascade/oracle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "cascade/errors.hpp"

namespace cascade::oracle {

Rational rationalize(double x, double tol, uint64_t max_denominator) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value");
  if (x < 0) throw std::domain_error("negative probability-like value");
  if (x == 0.0) return Rational(0);

  // Stern-Brocot / continued-fraction convergents.
  using Int = boost::multiprecision::cpp_int;
  double frac = x;
  Int p_prev = 1, q_prev = 0;  // convergent h_{-1}/k_{-1}
  Int p = 0, q = 1;            // shifted so loop starts cleanly
  double rem = frac;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_floor = std::floor(rem);
    const Int a = static_cast<int64_t>(a_floor);
    const Int p_next = a * p_prev + p;
    const Int q_next = a * q_prev + q;
    p = p_prev;
    q = q_prev;
    p_prev = p_next;
    q_prev = q_next;
    if (q_prev > Int(max_denominator)) break;
    const Rational cand(p_prev, q_prev);
    const double err =
        std::abs(static_cast<double>(cand) - x);
    if (err <= tol * std::max(1.0, std::abs(x))) return cand;
    const double f = rem - a_floor;
    if (f < 1e-18) break;
    rem = 1.0 / f;
  }
  throw std::domain_error(
      "value is not a small rational; exact enumeration requires rational "
      "inputs");
}

namespace {

struct ExactModel {
  Rational gamma;      // alpha/beta, > 1
  Rational sig_maj;    // P(X = theta) = gamma/(1+gamma)
  Rational sig_min;    // 1/(1+gamma)
  Rational band_low;   // beta/alpha
  Rational band_high;  // alpha/beta
};

enum class Band { Low, Mid, High };

Band band_of(const Rational& r, const ExactModel& m) {
  if (r < m.band_low) return Band::Low;
  if (r > m.band_high) return Band::High;
  return Band::Mid;
}

// Multiplicative update factor of R for decision z in the given band; the
// cancelled forms match dynamics::assumed_update exactly.
Rational update_factor(Band band, int z, const Rational& q,
                       const ExactModel& m) {
  const Rational a = m.gamma / (1 + m.gamma);  // alpha/(alpha+beta)
  const Rational b = Rational(1) / (1 + m.gamma);
  switch (band) {
    case Band::Mid:
      return z == 1 ? m.gamma : Rational(1) / m.gamma;
    case Band::Low:
      if (z == 1) return m.gamma;
      return (1 - a * q) / (1 - b * q);
    case Band::High:
      if (z == 2) return Rational(1) / m.gamma;
      return (1 - b * q) / (1 - a * q);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ExactSeries exact_error_series(const ExperimentConfig& cfg, uint32_t horizon,
                               const OracleLimits& limits, int theta) {
  if (horizon < 1 || horizon > limits.max_horizon)
    throw BudgetExceeded("horizon exceeds the exact-enumeration cap");
  if (theta != 1 && theta != 2) throw std::domain_error("theta must be 1 or 2");

  ExactModel m;
  m.gamma = rationalize(cfg.urn.gamma(), limits.rationalize_tol,
                        limits.gamma_max_denominator);
  if (m.gamma <= 1) throw std::domain_error("gamma must be > 1");
  m.sig_maj = m.gamma / (1 + m.gamma);
  m.sig_min = Rational(1) / (1 + m.gamma);
  m.band_low = Rational(1) / m.gamma;
  m.band_high = m.gamma;

  // State distribution over R, conditioned on the given theta.
  std::map<Rational, Rational> states;
  states[Rational(1)] = 1;

  ExactSeries out;
  out.p_e.reserve(horizon);
  out.total_errors = 0;

  for (uint32_t t = 1; t <= horizon; ++t) {
    const Rational p = rationalize(cfg.truth.value_at(t),
                                   limits.rationalize_tol,
                                   limits.max_denominator);
    const Rational q = rationalize(cfg.assumed.value_at(t),
                                   limits.rationalize_tol,
                                   limits.max_denominator);
    // Branch masses over (revealer, signal); signal relative to theta.
    const Rational w_rev = p, w_rat = 1 - p;
    // X = theta with mass sig_maj. Signal VALUE depends on theta.
    std::map<Rational, Rational> next;
    Rational err_mass = 0;

    for (const auto& [r, mass] : states) {
      const Band band = band_of(r, m);
      for (int rev = 0; rev < 2; ++rev) {
        const Rational w1 = rev ? w_rev : w_rat;
        if (w1 == 0) continue;
        for (int correct = 0; correct < 2; ++correct) {
          const Rational w2 = correct ? m.sig_maj : m.sig_min;
          const int x = correct ? theta : 3 - theta;
          int z;
          if (rev) {
            z = x;
          } else {
            z = band == Band::Low ? 2 : (band == Band::High ? 1 : x);
          }
          const Rational w = mass * w1 * w2;
          if (z != theta) err_mass += w;
          next[r * update_factor(band, z, q, m)] += w;
        }
      }
    }
    if (next.size() > limits.max_states)
      throw BudgetExceeded("state count exceeds the enumeration budget");
    Rational total_mass = 0;
    for (const auto& [r, mass] : next) total_mass += mass;
    if (total_mass != 1)
      throw std::logic_error("state distribution lost probability mass");
    out.peak_states = std::max(out.peak_states, next.size());
    states = std::move(next);
    out.p_e.push_back(err_mass);
    out.total_errors += err_mass;
  }
  return out;
}

Rational exact_total_errors(const ExperimentConfig& cfg, uint32_t horizon,
                            const OracleLimits& limits) {
  return exact_error_series(cfg, horizon, limits).total_errors;
}

}  // namespace cascade::oracle
