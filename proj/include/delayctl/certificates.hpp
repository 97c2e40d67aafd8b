#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "delayctl/errors.hpp"

namespace delayctl {

/// Evaluated sufficient condition.  Conditions are strict inequalities
/// lhs < rhs; two-sided conditions are normalized so lhs is the binding
/// side and rhs = 1.  margin = rhs - lhs, pass <=> margin > 0 (boundary
/// equality fails).
struct Certificate {
  std::string name;
  std::map<std::string, double> parameters;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::optional<double> r_max;
};

/// Static small-gain condition on the prediction error constants:
/// gamma*a1 < 1 and a2*(1 + gamma*R) < 1.           ["smallgain-2.13"]
Certificate check_small_gain(double gamma, double R, double a1, double a2);

/// Same with the dynamic-law slack (1 + 1/mu) on both sides.
///                                                   ["smallgain-2.42"]
Certificate check_small_gain_mu(double gamma, double R, double a1, double a2,
                                double mu);

/// Fixed-point predictor condition
/// (gamma + 1 + gamma*R) * R * K * (LT)^(l+1)/(1-LT) < 1.
///                                                   ["corollary-3.25"]
Certificate check_picard_small_gain(double gamma, double R, double K, double L,
                                    double T, int sweeps);

/// Direct-input-law variant with the extra max{1, L}(1 + 1/mu) factor.
///                                                   ["corollary-3.27"]
Certificate check_picard_small_gain_mu(double gamma, double R, double K,
                                       double L, double T, int sweeps,
                                       double mu);

/// Delayed-reading condition for the no-predictor dynamic law, minimized
/// over its free exponent parameter by golden-section search on
/// log10(eps) in [-6, 6].                            ["nopredictor-remark"]
Certificate check_no_predictor(double gamma, double R, double L1, double L2,
                               double r);

/// Scalar benchmark (k(x) = -(1+kappa)x, |f'| <= 1) conditions.
/// Static law:        r < kappa / ((1+kappa)(2+kappa))   ["razumikhin-4.3"]
Certificate check_scalar_razumikhin(double kappa, double r);
/// Single-interval schemes (q = 1), domain r < 1:
/// 2(1+kappa)^2 r^(l+1) < kappa (1 - r)                  ["scalar-4.4"]
Certificate check_scalar_q1(double kappa, int sweeps, double r);
/// Two-interval schemes (q = 2), domain r < 2.           ["scalar-4.5"]
Certificate check_scalar_q2(double kappa, int sweeps, double r);
/// Direct input law with the (2,2) scheme, domain r < 2. ["scalar-4.6"]
Certificate check_scalar_state_predictor(double kappa, double mu, double r);

/// Largest delay for which `cert_at` still passes, located by a 64-point
/// monotonicity scan over (r_lo, r_hi) followed by bisection; the returned
/// point itself passes and the pass/fail boundary is bracketed to ~1e-13.
/// Throws ContractViolation when the scan is not pass-then-fail monotone.
double solve_max_delay(const std::function<Certificate(double)>& cert_at,
                       double r_lo, double r_hi);

double max_delay_scalar_razumikhin(double kappa);
double max_delay_scalar_q1(double kappa, int sweeps);
double max_delay_scalar_q2(double kappa, int sweeps);
double max_delay_scalar_state_predictor(double kappa, double mu);
double max_delay_no_predictor(double gamma, double R, double L1, double L2);

/// Input-to-state gain data of the scalar benchmark closed loop
/// x' = f(x) - (1+kappa)x + v.  The plain form carries gain
/// gamma = (1+eps)/kappa; the exponential form trades gain for an explicit
/// modulus: gamma = (1+eps)/(kappa*sqrt(1-eps)), M = 1 + 1/eps,
/// omega = kappa*eps/2 (requires eps < 1).
struct ISSConstants {
  double gamma = 0.0;
  double R = 0.0;
  double M = 0.0;
  double omega = 0.0;
  double eps = 0.0;
};

ISSConstants scalar_benchmark_iss(double kappa, double eps, bool exponential);

}  // namespace delayctl
