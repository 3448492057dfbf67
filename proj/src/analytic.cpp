#include "cascade/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade::analytic {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 1.0)) throw std::domain_error("gamma must be > 1");
}

void require_rho_positive(double rho) {
  if (!(rho > 0.0)) throw std::domain_error("rho must be > 0");
}

}  // namespace

const char* to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::NoLearning: return "no_learning";
    case RegimeTag::MismatchBelow: return "mismatch_below";
    case RegimeTag::MismatchAbove: return "mismatch_above";
    case RegimeTag::RevealDominated: return "reveal_dominated";
    case RegimeTag::MatchedOptimal: return "matched_optimal";
  }
  return "unknown";
}

double kappa(double gamma) {
  require_gamma(gamma);
  const double u = (gamma - 1.0) / std::log(gamma);
  return 1.0 / (1.0 + u * (std::log(u) - 1.0));
}

double rho0(double gamma) {
  require_gamma(gamma);
  return std::log(gamma) / (gamma - 1.0);
}

double rho1(double gamma) { return gamma * rho0(gamma); }

double delta(double gamma, double rho) {
  require_gamma(gamma);
  require_rho_positive(rho);
  const double lg = std::log(gamma);
  const double r = rho * (gamma - 1.0);
  return (gamma * lg - r * (1.0 + std::log(gamma * lg / r))) /
         ((1.0 + gamma) * lg);
}

double lambda1_star(double gamma, double rho) {
  require_gamma(gamma);
  if (!(rho >= rho0(gamma)) || !(rho <= rho1(gamma)))
    throw std::domain_error("rho outside [rho0, rho1]");
  const double lg = std::log(gamma);
  return std::min(1.0, std::log(rho * (gamma - 1.0) / lg) / lg);
}

ExponentFamily exponent_family(double gamma, double lambda) {
  require_gamma(gamma);
  if (lambda < 0.0 || lambda > 1.0)
    throw std::domain_error("lambda outside [0, 1]");
  const double d = 1.0 + gamma;
  return ExponentFamily{
      (gamma - std::pow(gamma, 1.0 - lambda)) / d,
      (gamma - 1.0) * lambda / d,
      (1.0 - std::pow(gamma, lambda)) / d,
  };
}

RateResult rate_thm3(double gamma, double rho) {
  require_gamma(gamma);
  require_rho_positive(rho);
  const double r0 = rho0(gamma), r1 = rho1(gamma);
  if (rho <= r0 || rho >= r1) return {0.0, RegimeTag::NoLearning};
  const double k = kappa(gamma);
  if (rho <= 1.0) {
    const double v = (1.0 + gamma) *
                     (delta(gamma, rho) -
                      (gamma - 1.0) / (gamma + 1.0) * (1.0 - rho)) *
                     k;
    return {v, rho == 1.0 ? RegimeTag::MatchedOptimal
                          : RegimeTag::MismatchBelow};
  }
  return {(1.0 + gamma) * delta(gamma, rho) * k, RegimeTag::MismatchAbove};
}

RateResult rate_thm5(double gamma, double rho, double c_p) {
  require_gamma(gamma);
  require_rho_positive(rho);
  if (!(c_p > 0.0)) throw std::domain_error("c_p must be > 0");
  const double r0 = rho0(gamma), r1 = rho1(gamma);
  if (rho <= r0 || rho >= r1) return {0.0, RegimeTag::NoLearning};
  double bracket = delta(gamma, rho);
  RegimeTag tag = RegimeTag::MismatchAbove;
  if (rho <= 1.0) {
    bracket -= (gamma - 1.0) / (gamma + 1.0) * (1.0 - rho);
    tag = rho == 1.0 ? RegimeTag::MatchedOptimal : RegimeTag::MismatchBelow;
  }
  return {std::min(1.0, c_p * bracket), tag};
}

RateResult rate_thm6(double gamma, double p_exponent, double rho) {
  require_gamma(gamma);
  require_rho_positive(rho);
  if (!(p_exponent > 0.0) || !(p_exponent < 1.0))
    throw std::domain_error("power-law exponent must lie in (0, 1)");
  if (rho <= rho0(gamma) || rho >= rho1(gamma))
    return {0.0, RegimeTag::NoLearning};
  return {p_exponent, RegimeTag::RevealDominated};
}

DriftCoefficients drift(double gamma, double rho) {
  require_gamma(gamma);
  require_rho_positive(rho);
  const double lg = std::log(gamma);
  return DriftCoefficients{
      (rho + gamma * (lg - rho)) / (1.0 + gamma),
      ((gamma - 1.0) * rho - lg) / (1.0 + gamma),
  };
}

double nu_tilt(double gamma, double q) {
  require_gamma(gamma);
  if (q < 0.0 || q >= 1.0) throw std::domain_error("q outside [0, 1)");
  // log A via log1p so small q keeps full precision.
  const double a = gamma / (1.0 + gamma), b = 1.0 / (1.0 + gamma);
  const double log_a_factor = std::log1p(-b * q) - std::log1p(-a * q);
  return log_a_factor / (std::log(gamma) + log_a_factor);
}

uint64_t t_star(double gamma, double q_norm) {
  require_gamma(gamma);
  if (q_norm < 0.0) throw std::domain_error("q_norm must be >= 0");
  const double raw =
      3.0 + (gamma - 1.0) / (gamma + 1.0) * q_norm / std::log(gamma);
  return static_cast<uint64_t>(std::ceil(raw));
}

double poisson_binomial_tail(double mu, double s) {
  if (!(mu > 0.0)) throw std::domain_error("mu must be > 0");
  if (s <= mu) return 1.0;
  return std::exp(s - mu - s * std::log(s / mu));
}

std::vector<RateCurveRow> rate_curve(const std::vector<double>& gammas,
                                     const std::vector<double>& rhos,
                                     const std::vector<double>& c_ps) {
  std::vector<RateCurveRow> rows;
  for (double g : gammas) {
    if (c_ps.empty()) {
      const double implied_cp = (1.0 + g) * kappa(g);
      for (double r : rhos) {
        const RateResult res = rate_thm3(g, r);
        rows.push_back({g, r, implied_cp, res.value, res.tag});
      }
    } else {
      for (double cp : c_ps) {
        for (double r : rhos) {
          const RateResult res = rate_thm5(g, r, cp);
          rows.push_back({g, r, cp, res.value, res.tag});
        }
      }
    }
  }
  return rows;
}

}  // namespace cascade::analytic
