#include "cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cascade/analytic.hpp"

namespace cascade {

UrnModel::UrnModel(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(alpha > beta))
    throw std::domain_error("urn requires alpha > beta > 0");
  gamma_ = alpha / beta;
  log_gamma_ = std::log(gamma_);
}

Schedule Schedule::optimal_matched(double gamma, double epsilon) {
  if (epsilon < 0.0) throw std::domain_error("epsilon must be >= 0");
  const double coeff =
      (1.0 + epsilon) * (1.0 + gamma) * analytic::kappa(gamma);
  return Schedule(OptimalMatched{gamma, epsilon, coeff});
}

Schedule Schedule::scaled(Schedule base, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("rho must be > 0");
  return Schedule(
      Scaled{std::make_shared<const Schedule>(std::move(base)), rho});
}

Schedule Schedule::harmonic(double c_p) {
  if (!(c_p > 0.0)) throw std::domain_error("c_p must be > 0");
  return Schedule(Harmonic{c_p});
}

Schedule Schedule::power_law(double coefficient, double exponent) {
  if (!(coefficient > 0.0)) throw std::domain_error("coefficient must be > 0");
  if (!(exponent > 0.0) || !(exponent <= 1.0))
    throw std::domain_error("exponent must lie in (0, 1]");
  return Schedule(PowerLaw{coefficient, exponent});
}

Schedule Schedule::constant(double q) {
  if (q < 0.0 || q > 1.0) throw std::domain_error("q must lie in [0, 1]");
  return Schedule(Constant{q});
}

Schedule Schedule::table(std::vector<double> values) {
  for (double v : values)
    if (v < 0.0 || v > 1.0)
      throw std::domain_error("table values must lie in [0, 1]");
  return Schedule(Table{std::move(values)});
}

double Schedule::value_at(uint64_t t) const {
  if (t == 0) throw std::domain_error("steps are 1-based");
  struct Visitor {
    uint64_t t;
    double operator()(const OptimalMatched& s) const {
      return std::min(1.0, s.coefficient / static_cast<double>(t));
    }
    double operator()(const Scaled& s) const {
      return std::min(1.0, s.rho * s.base->value_at(t));
    }
    double operator()(const Harmonic& s) const {
      return std::min(1.0, s.c_p / static_cast<double>(t));
    }
    double operator()(const PowerLaw& s) const {
      return std::min(
          1.0, s.coefficient * std::pow(static_cast<double>(t), -s.exponent));
    }
    double operator()(const Constant& s) const { return s.q; }
    double operator()(const Table& s) const {
      return t <= s.values.size() ? s.values[t - 1] : 0.0;
    }
  };
  return std::visit(Visitor{t}, spec_);
}

double Schedule::prefix_norm(uint64_t t) const {
  double sum = 0.0, comp = 0.0;
  for (uint64_t i = 1; i <= t; ++i) {
    const double y = value_at(i) - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

std::vector<uint32_t> CheckpointSpec::resolve(uint64_t horizon) const {
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  std::vector<uint32_t> out;
  if (kind == Kind::Explicit) {
    if (values.empty()) throw ConfigError("checkpoints", "empty list");
    for (size_t i = 0; i < values.size(); ++i) {
      const uint32_t v = values[i];
      if (v < 1 || v > horizon)
        throw ConfigError("checkpoints", "value outside [1, horizon]");
      if (i > 0 && v <= values[i - 1])
        throw ConfigError("checkpoints", "values must be sorted and unique");
    }
    return values;
  }
  if (count < 1) throw ConfigError("checkpoints", "count must be >= 1");
  if (count == 1 || horizon == 1) return {static_cast<uint32_t>(horizon)};
  const double lh = std::log(static_cast<double>(horizon));
  for (uint32_t i = 0; i < count; ++i) {
    const double x = std::exp(lh * i / (count - 1));
    uint64_t v = static_cast<uint64_t>(std::llround(x));
    v = std::clamp<uint64_t>(v, 1, horizon);
    if (out.empty() || v > out.back()) out.push_back(static_cast<uint32_t>(v));
  }
  return out;
}

}  // namespace cascade
