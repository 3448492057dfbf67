#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cascade/errors.hpp"

namespace cascade {

// Two-type urn. Only the ratio gamma = alpha/beta matters for the dynamics;
// alpha and beta are kept so scale invariance can be tested explicitly.
class UrnModel {
 public:
  UrnModel(double alpha, double beta);
  static UrnModel from_gamma(double gamma) { return UrnModel(gamma, 1.0); }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double log_gamma() const { return log_gamma_; }
  // P(X_t = theta) and P(X_t != theta).
  double p_correct() const { return alpha_ / (alpha_ + beta_); }
  double p_wrong() const { return beta_ / (alpha_ + beta_); }

 private:
  double alpha_, beta_, gamma_, log_gamma_;
};

struct WorldState {
  int theta;  // 1 or 2, drawn uniformly per trial
};

// Revealing-probability schedules. Values are clipped to [0,1] pointwise;
// prefix_norm sums the clipped values.
class Schedule {
 public:
  struct OptimalMatched {
    double gamma;
    double epsilon;      // Theorem-style (1+eps) factor; 0 in experiments
    double coefficient;  // (1+eps)(1+gamma)kappa(gamma), cached
  };
  struct Scaled {
    std::shared_ptr<const Schedule> base;
    double rho;
  };
  struct Harmonic {
    double c_p;
  };
  struct PowerLaw {
    double coefficient;
    double exponent;  // in (0, 1]
  };
  struct Constant {
    double q;
  };
  struct Table {
    std::vector<double> values;  // extended by 0 past the end
  };
  using Spec =
      std::variant<OptimalMatched, Scaled, Harmonic, PowerLaw, Constant, Table>;

  static Schedule optimal_matched(double gamma, double epsilon = 0.0);
  static Schedule scaled(Schedule base, double rho);
  static Schedule harmonic(double c_p);
  static Schedule power_law(double coefficient, double exponent);
  static Schedule constant(double q);
  static Schedule table(std::vector<double> values);

  // Scheduled probability at step t >= 1, clipped to [0,1].
  double value_at(uint64_t t) const;
  // Sum of value_at(1..t), compensated (Kahan) summation.
  double prefix_norm(uint64_t t) const;

  const Spec& spec() const { return spec_; }

 private:
  explicit Schedule(Spec spec) : spec_(std::move(spec)) {}
  Spec spec_;
};

// Checkpoint policy: explicit sorted list or geometric grid over [1, horizon].
struct CheckpointSpec {
  enum class Kind { Geometric, Explicit };
  Kind kind = Kind::Geometric;
  uint32_t count = 25;              // Geometric
  std::vector<uint32_t> values;     // Explicit

  std::vector<uint32_t> resolve(uint64_t horizon) const;
};

struct ExperimentConfig {
  UrnModel urn;
  Schedule truth;    // P, the true revealing probabilities
  Schedule assumed;  // Q, what rational players believe
  uint64_t horizon = 1;
  CheckpointSpec checkpoints;
  uint64_t trials = 1;
  uint64_t master_seed = 0;
};

}  // namespace cascade
