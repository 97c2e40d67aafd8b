#include "delayctl/certificates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace delayctl {

namespace {

Certificate make_certificate(std::string name,
                             std::map<std::string, double> parameters,
                             double lhs, double rhs) {
  Certificate cert;
  cert.name = std::move(name);
  cert.parameters = std::move(parameters);
  cert.lhs = lhs;
  cert.rhs = rhs;
  cert.margin = rhs - lhs;
  cert.pass = lhs < rhs;
  return cert;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) {
    throw ContractViolation{std::string{what} + " must be positive"};
  }
}

void require_nonnegative(double value, const char* what) {
  if (!(value >= 0.0)) {
    throw ContractViolation{std::string{what} + " must be nonnegative"};
  }
}

void require_sweeps(int sweeps) {
  if (sweeps < 1) {
    throw ContractViolation{"sweep count must be at least 1"};
  }
}

/// (LT)^(l+1) / (1 - LT); only defined on the contraction regime LT < 1.
double contraction_ratio(double L, double T, int sweeps) {
  const double LT = L * T;
  if (LT >= 1.0) {
    throw ContractionViolated{"certificate requires L*T < 1, got L*T = " +
                              std::to_string(LT)};
  }
  return std::pow(LT, sweeps + 1) / (1.0 - LT);
}

double no_predictor_lhs(double gamma, double R, double L1, double L2, double r,
                        double eps) {
  const double grow = std::exp((2.0 + eps) * L1 * r);
  const double input_term =
      (1.0 + gamma * R) * R * r * L2 *
      (std::sqrt(eps / (2.0 + eps)) * std::sqrt(grow - 1.0) / eps + 1.0);
  const double state_term =
      gamma * R * r * L1 * std::exp(0.5 * (2.0 + eps) * L1 * r);
  return input_term + state_term;
}

}  // namespace

Certificate check_small_gain(double gamma, double R, double a1, double a2) {
  require_nonnegative(gamma, "gamma");
  require_nonnegative(R, "R");
  require_nonnegative(a1, "a1");
  require_nonnegative(a2, "a2");
  const double lhs = std::max(gamma * a1, a2 * (1.0 + gamma * R));
  return make_certificate(
      "smallgain-2.13", {{"gamma", gamma}, {"R", R}, {"a1", a1}, {"a2", a2}},
      lhs, 1.0);
}

Certificate check_small_gain_mu(double gamma, double R, double a1, double a2,
                                double mu) {
  require_nonnegative(gamma, "gamma");
  require_nonnegative(R, "R");
  require_nonnegative(a1, "a1");
  require_nonnegative(a2, "a2");
  require_positive(mu, "mu");
  const double slack = 1.0 + 1.0 / mu;
  const double lhs =
      std::max(gamma * a1, a2 * (1.0 + gamma * R)) * slack;
  return make_certificate("smallgain-2.42",
                          {{"gamma", gamma},
                           {"R", R},
                           {"a1", a1},
                           {"a2", a2},
                           {"mu", mu}},
                          lhs, 1.0);
}

Certificate check_picard_small_gain(double gamma, double R, double K, double L,
                                    double T, int sweeps) {
  require_nonnegative(gamma, "gamma");
  require_positive(R, "R");
  require_positive(K, "K");
  require_positive(L, "L");
  require_positive(T, "T");
  require_sweeps(sweeps);
  const double lhs =
      (gamma + 1.0 + gamma * R) * R * K * contraction_ratio(L, T, sweeps);
  return make_certificate("corollary-3.25",
                          {{"gamma", gamma},
                           {"R", R},
                           {"K", K},
                           {"L", L},
                           {"T", T},
                           {"l", static_cast<double>(sweeps)}},
                          lhs, 1.0);
}

Certificate check_picard_small_gain_mu(double gamma, double R, double K,
                                       double L, double T, int sweeps,
                                       double mu) {
  require_nonnegative(gamma, "gamma");
  require_positive(R, "R");
  require_positive(K, "K");
  require_positive(L, "L");
  require_positive(T, "T");
  require_sweeps(sweeps);
  require_positive(mu, "mu");
  const double lhs = (gamma + 1.0 + gamma * R) * R * K * std::max(1.0, L) *
                     (1.0 + 1.0 / mu) * contraction_ratio(L, T, sweeps);
  return make_certificate("corollary-3.27",
                          {{"gamma", gamma},
                           {"R", R},
                           {"K", K},
                           {"L", L},
                           {"T", T},
                           {"l", static_cast<double>(sweeps)},
                           {"mu", mu}},
                          lhs, 1.0);
}

Certificate check_no_predictor(double gamma, double R, double L1, double L2,
                               double r) {
  require_nonnegative(gamma, "gamma");
  require_positive(R, "R");
  require_positive(L1, "L1");
  require_positive(L2, "L2");
  require_nonnegative(r, "r");

  // Minimize the bound over its free exponent parameter; the objective is
  // unimodal in log(eps) (it blows up at both ends), so golden-section
  // search on log10(eps) in [-6, 6] locates the minimum.
  const auto value = [&](double log10_eps) {
    return no_predictor_lhs(gamma, R, L1, L2, r, std::pow(10.0, log10_eps));
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -6.0;
  double b = 6.0;
  double c1 = b - invphi * (b - a);
  double c2 = a + invphi * (b - a);
  double f1 = value(c1);
  double f2 = value(c2);
  for (int iter = 0; iter < 200; ++iter) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - invphi * (b - a);
      f1 = value(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + invphi * (b - a);
      f2 = value(c2);
    }
  }
  const double best_log10_eps = f1 < f2 ? c1 : c2;
  const double eps = std::pow(10.0, best_log10_eps);
  const double lhs = no_predictor_lhs(gamma, R, L1, L2, r, eps);
  return make_certificate("nopredictor-remark",
                          {{"gamma", gamma},
                           {"R", R},
                           {"L1", L1},
                           {"L2", L2},
                           {"r", r},
                           {"epsilon", eps}},
                          lhs, 1.0);
}

Certificate check_scalar_razumikhin(double kappa, double r) {
  require_positive(kappa, "kappa");
  require_nonnegative(r, "r");
  const double rhs = kappa / ((1.0 + kappa) * (2.0 + kappa));
  return make_certificate("razumikhin-4.3", {{"kappa", kappa}, {"r", r}}, r,
                          rhs);
}

Certificate check_scalar_q1(double kappa, int sweeps, double r) {
  require_positive(kappa, "kappa");
  require_sweeps(sweeps);
  require_nonnegative(r, "r");
  if (r >= 1.0) {
    throw ContractViolation{"certificate scalar-4.4 is defined for r < 1"};
  }
  const double lhs =
      2.0 * (1.0 + kappa) * (1.0 + kappa) * std::pow(r, sweeps + 1);
  const double rhs = kappa * (1.0 - r);
  return make_certificate(
      "scalar-4.4",
      {{"kappa", kappa}, {"l", static_cast<double>(sweeps)}, {"r", r}}, lhs,
      rhs);
}

Certificate check_scalar_q2(double kappa, int sweeps, double r) {
  require_positive(kappa, "kappa");
  require_sweeps(sweeps);
  require_nonnegative(r, "r");
  if (r >= 2.0) {
    throw ContractViolation{"certificate scalar-4.5 is defined for r < 2"};
  }
  const double two_l = std::ldexp(1.0, sweeps);
  const double bracket = 1.0 + std::exp((std::sqrt(2.0) + 1.0) / 4.0 * r) +
                         std::exp(r / 2.0) +
                         std::pow(r, sweeps + 1) / ((2.0 - r) * two_l);
  const double lhs = 2.0 * (1.0 + kappa) * (1.0 + kappa) *
                     std::pow(r, sweeps + 1) * bracket;
  const double rhs = two_l * kappa * (2.0 - r);
  return make_certificate(
      "scalar-4.5",
      {{"kappa", kappa}, {"l", static_cast<double>(sweeps)}, {"r", r}}, lhs,
      rhs);
}

Certificate check_scalar_state_predictor(double kappa, double mu, double r) {
  require_positive(kappa, "kappa");
  require_positive(mu, "mu");
  require_nonnegative(r, "r");
  if (r >= 2.0) {
    throw ContractViolation{"certificate scalar-4.6 is defined for r < 2"};
  }
  const double bracket = 1.0 + std::exp((std::sqrt(2.0) + 1.0) / 4.0 * r) +
                         std::exp(r / 2.0) + 0.25 * r * r * r / (2.0 - r);
  const double lhs = (1.0 + kappa) * (1.0 + kappa) * bracket * r * r * r;
  const double rhs = 2.0 * mu / (1.0 + mu) * kappa * (2.0 - r);
  return make_certificate("scalar-4.6",
                          {{"kappa", kappa}, {"mu", mu}, {"r", r}}, lhs, rhs);
}

double solve_max_delay(const std::function<Certificate(double)>& cert_at,
                       double r_lo, double r_hi) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) {
    throw ContractViolation{"solve_max_delay requires 0 < r_lo < r_hi"};
  }
  constexpr int kScanPoints = 64;
  std::array<bool, kScanPoints> pass{};
  const auto scan_point = [&](int i) {
    return r_lo +
           (r_hi - r_lo) * static_cast<double>(i) / (kScanPoints - 1);
  };
  for (int i = 0; i < kScanPoints; ++i) {
    pass[i] = cert_at(scan_point(i)).pass;
  }
  int boundary = kScanPoints;
  for (int i = 0; i < kScanPoints; ++i) {
    if (!pass[i]) {
      boundary = i;
      break;
    }
  }
  for (int i = boundary; i < kScanPoints; ++i) {
    if (pass[i]) {
      throw ContractViolation{
          "condition is not pass-then-fail monotone over the scan range; "
          "refusing to bisect"};
    }
  }
  if (boundary == 0) {
    throw MissingHypothesis{
        "condition fails over the entire scan range; no admissible delay"};
  }
  if (boundary == kScanPoints) {
    return r_hi;
  }
  double lo = scan_point(boundary - 1);
  double hi = scan_point(boundary);
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, lo);
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (cert_at(mid).pass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double max_delay_scalar_razumikhin(double kappa) {
  require_positive(kappa, "kappa");
  const double pivot = kappa / ((1.0 + kappa) * (2.0 + kappa));
  return solve_max_delay(
      [kappa](double r) { return check_scalar_razumikhin(kappa, r); },
      1e-6 * pivot, 10.0 * pivot);
}

double max_delay_scalar_q1(double kappa, int sweeps) {
  return solve_max_delay(
      [=](double r) { return check_scalar_q1(kappa, sweeps, r); }, 1e-9,
      1.0 - 1e-9);
}

double max_delay_scalar_q2(double kappa, int sweeps) {
  return solve_max_delay(
      [=](double r) { return check_scalar_q2(kappa, sweeps, r); }, 1e-9,
      2.0 - 1e-9);
}

double max_delay_scalar_state_predictor(double kappa, double mu) {
  return solve_max_delay(
      [=](double r) { return check_scalar_state_predictor(kappa, mu, r); },
      1e-9, 2.0 - 1e-9);
}

double max_delay_no_predictor(double gamma, double R, double L1, double L2) {
  const auto cert = [=](double r) {
    return check_no_predictor(gamma, R, L1, L2, r);
  };
  double hi = 1.0 / (R * (L1 + L2));
  int doublings = 0;
  while (cert(hi).pass) {
    hi *= 2.0;
    if (++doublings > 60) {
      throw ContractViolation{
          "no-predictor condition does not fail within the search range"};
    }
  }
  return solve_max_delay(cert, 1e-9 * hi, hi);
}

ISSConstants scalar_benchmark_iss(double kappa, double eps, bool exponential) {
  require_positive(kappa, "kappa");
  require_positive(eps, "eps");
  ISSConstants c;
  c.eps = eps;
  c.R = 1.0 + kappa;
  c.M = 1.0 + 1.0 / eps;
  if (exponential) {
    if (eps >= 1.0) {
      throw ContractViolation{
          "exponential-form constants require eps in (0, 1)"};
    }
    c.gamma = (1.0 + eps) / (kappa * std::sqrt(1.0 - eps));
    c.omega = kappa * eps / 2.0;
  } else {
    c.gamma = (1.0 + eps) / kappa;
    c.omega = kappa / 2.0;
  }
  return c;
}

}  // namespace delayctl
