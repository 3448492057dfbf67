#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "cascade/model.hpp"

namespace cascade::oracle {

using Rational = boost::multiprecision::cpp_rational;

struct OracleLimits {
  uint32_t max_horizon = 20;
  size_t max_states = 5'000'000;
  double rationalize_tol = 1e-12;
  // Schedule floats may rationalize with large denominators; gamma must be a
  // genuinely simple ratio.
  uint64_t max_denominator = 1'000'000'000;
  uint64_t gamma_max_denominator = 100'000;
};

struct ExactSeries {
  std::vector<Rational> p_e;  // P(Z_t != theta), index t-1
  Rational total_errors;      // sum of p_e (linearity of expectation)
  size_t peak_states = 0;     // largest layer of the state distribution
};

// Continued-fraction rationalization of a schedule/gamma float. Throws
// std::domain_error when no approximation within tol has denominator below
// the cap (irrational input).
Rational rationalize(double x, double tol = 1e-12,
                     uint64_t max_denominator = 1'000'000'000);

// Exact P_e,t for t = 1..horizon by dynamic programming over the reachable
// values of the assumed likelihood ratio R, in exact rational arithmetic.
//
// Merging states on R alone is sound: the decision rule depends on the
// history only through the regime of R, and the update factor depends only
// on (regime, decision, q_t), so the conditional law of everything after
// step t is a function of R_t alone.
//
// The enumeration conditions on theta = 1; by the urn symmetry the
// unconditional error probabilities coincide (theta = 2 is exposed for the
// symmetry test).
ExactSeries exact_error_series(const ExperimentConfig& cfg, uint32_t horizon,
                               const OracleLimits& limits = {}, int theta = 1);

Rational exact_total_errors(const ExperimentConfig& cfg, uint32_t horizon,
                            const OracleLimits& limits = {});

}  // namespace cascade::oracle
