#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cascade::analytic {

// Learning-rate regimes. value == 0 iff NoLearning.
enum class RegimeTag {
  NoLearning,       // rho <= rho0 or rho >= rho1 (or norm ratio degenerate)
  MismatchBelow,    // rho0 < rho < 1
  MismatchAbove,    // 1 < rho < rho1
  RevealDominated,  // ||P_t|| = omega(log t), error dominated by revealers
  MatchedOptimal,   // rho == 1
};

const char* to_string(RegimeTag tag);

struct RateResult {
  double value;  // polynomial learning rate in [0, 1]
  RegimeTag tag;
};

// Matched-case constant: inf_P limsup t * P_e,t = kappa(gamma).
// kappa(gamma) = [1 + ((g-1)/log g) (log((g-1)/log g) - 1)]^-1, gamma > 1.
double kappa(double gamma);

// Mismatch window thresholds: rho0 = log(g)/(g-1), rho1 = g * rho0.
double rho0(double gamma);
double rho1(double gamma);

// delta(g, rho) = [g log g - rho (g-1)(1 + log(g log g / (rho (g-1))))]
//                 / ((1+g) log g)
double delta(double gamma, double rho);

// Argmax of f_{1-l} - rho g_{1-l} over l in [0,1]:
// min(1, log(rho (g-1)/log g) / log g). Requires rho in [rho0, rho1].
double lambda1_star(double gamma, double rho);

// Tilted exponent family, scale-free in (alpha, beta):
//   f_l = (g - g^{1-l})/(1+g), g_l = (g-1) l/(1+g), h_l = (1 - g^l)/(1+g).
struct ExponentFamily {
  double f, g, h;
};
ExponentFamily exponent_family(double gamma, double lambda);

// Piecewise learning rates.
// Theorem for truth = optimal matched schedule, q ~ rho * p:
//   0 outside (rho0, rho1);
//   (1+g)[delta - ((g-1)/(g+1))(1-rho)] kappa   on [rho0, 1];
//   (1+g) delta kappa                           on [1, rho1].
RateResult rate_thm3(double gamma, double rho);

// Truth with ||P_t||/log t -> C_p: same shape capped at 1,
//   min(1, C_p [delta - ((g-1)/(g+1))(1-rho)]) / min(1, C_p delta).
RateResult rate_thm5(double gamma, double rho, double c_p);

// Truth with ||P_t|| = omega(log t), p_t ~ t^-c: rate c inside the window,
// 0 outside.
RateResult rate_thm6(double gamma, double p_exponent, double rho);

// Leading coefficients of E_1[xi_i]/p_i for the log-ratio random walk in the
// two extreme regimes. `high` = (rho + g(log g - rho))/(1+g) vanishes at rho1
// and is the drift of the walk confined below beta/alpha (wrong-cascade
// band, theta = 1); `low` = ((g-1) rho - log g)/(1+g) vanishes at rho0 and is
// the drift of the walk above alpha/beta.
struct DriftCoefficients {
  double high;
  double low;
};
DriftCoefficients drift(double gamma, double rho);

// Martingale tilt nu_i = log(A)/log(gamma*A) with
// A = (1 - q/(1+g))/(1 - g q/(1+g)); 0 at q = 0, in (0,1) for q in (0,1).
double nu_tilt(double gamma, double q);

// Steps of forced minority signals needed to cross the band:
// ceil(3 + ((g-1)/(g+1)) ||Q_t|| / log g).
uint64_t t_star(double gamma, double q_norm);

// Chernoff tail of a Poisson-Binomial with mean mu:
// P[Z >= s] <= exp(s - mu - s log(s/mu)) for s > mu, else 1.
double poisson_binomial_tail(double mu, double s);

// Plot-ready rate curves (gamma-major, then rho). c_p < 0 selects the
// optimal-matched rate; otherwise the C_p-capped rate.
struct RateCurveRow {
  double gamma, rho, c_p, rate;
  RegimeTag tag;
};
std::vector<RateCurveRow> rate_curve(const std::vector<double>& gammas,
                                     const std::vector<double>& rhos,
                                     const std::vector<double>& c_ps = {});

}  // namespace cascade::analytic
