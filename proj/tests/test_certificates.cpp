#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "delayctl/certificates.hpp"
#include "delayctl/errors.hpp"

using namespace delayctl;

TEST_CASE("static small-gain arithmetic") {
  // max(gamma*a1, a2*(1 + gamma*R)) = max(0.4, 0.6) against 1
  const Certificate c = check_small_gain(0.5, 2.0, 0.8, 0.3);
  CHECK(c.name == "smallgain-2.13");
  CHECK(c.lhs == doctest::Approx(0.6));
  CHECK(c.rhs == 1.0);
  CHECK(c.margin == doctest::Approx(0.4));
  CHECK(c.pass);
  CHECK(c.parameters.at("a1") == 0.8);

  // boundary equality does not pass
  const Certificate edge = check_small_gain(1.0, 2.0, 1.0, 0.0);
  CHECK(edge.lhs == 1.0);
  CHECK_FALSE(edge.pass);
  CHECK(edge.margin == 0.0);

  CHECK_THROWS_AS(check_small_gain(-0.1, 2.0, 1.0, 1.0), ContractViolation);
}

TEST_CASE("dynamic-law small gain carries the tracking slack") {
  const Certificate base = check_small_gain(0.5, 2.0, 0.8, 0.3);
  const Certificate mu4 = check_small_gain_mu(0.5, 2.0, 0.8, 0.3, 4.0);
  CHECK(mu4.name == "smallgain-2.42");
  CHECK(mu4.lhs == doctest::Approx(base.lhs * 1.25));
  // the slack vanishes as the controller gets fast
  const Certificate fast = check_small_gain_mu(0.5, 2.0, 0.8, 0.3, 1e9);
  CHECK(fast.lhs == doctest::Approx(base.lhs).epsilon(1e-8));
  CHECK_THROWS_AS(check_small_gain_mu(0.5, 2.0, 0.8, 0.3, 0.0),
                  ContractViolation);
}

TEST_CASE("fixed-point predictor condition arithmetic") {
  // gamma = 1/3, R = 4, K = 1, L = 1, T = 1/4, one sweep:
  // (1/3 + 1 + 4/3) * 4 * (1/16)/(3/4) = (8/3)*4/12 = 8/9
  const Certificate c = check_picard_small_gain(1.0 / 3.0, 4.0, 1.0, 1.0,
                                                0.25, 1);
  CHECK(c.name == "corollary-3.25");
  CHECK(c.lhs == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(c.rhs == 1.0);
  CHECK(c.pass);

  // the direct-input variant at L = 1, mu = 1 doubles the left side
  const Certificate d = check_picard_small_gain_mu(1.0 / 3.0, 4.0, 1.0, 1.0,
                                                   0.25, 1, 1.0);
  CHECK(d.name == "corollary-3.27");
  CHECK(d.lhs == doctest::Approx(16.0 / 9.0).epsilon(1e-12));
  CHECK_FALSE(d.pass);

  // L > 1 contributes the extra max{1, L} factor
  const Certificate l2a = check_picard_small_gain(0.2, 2.0, 1.0, 2.0, 0.3, 1);
  const Certificate l2b =
      check_picard_small_gain_mu(0.2, 2.0, 1.0, 2.0, 0.3, 1, 1.0);
  CHECK(l2b.lhs == doctest::Approx(l2a.lhs * 2.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("contraction domain is enforced") {
  try {
    check_picard_small_gain(0.5, 1.0, 1.0, 2.0, 0.5, 1);  // LT = 1
    FAIL("expected ContractionViolated");
  } catch (const ContractionViolated& err) {
    CHECK(std::string{err.what()}.find("requires L*T < 1") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(check_picard_small_gain(0.5, 1.0, 1.0, 2.0, 0.8, 1),
                  ContractionViolated);
  CHECK_THROWS_AS(check_picard_small_gain(0.5, 1.0, 1.0, 1.0, 0.5, 0),
                  ContractViolation);
}

TEST_CASE("scalar benchmark conditions evaluate their closed forms") {
  // static law: r against kappa/((1+kappa)(2+kappa)) = 3/20
  const Certificate razu = check_scalar_razumikhin(3.0, 0.1);
  CHECK(razu.name == "razumikhin-4.3");
  CHECK(razu.lhs == 0.1);
  CHECK(razu.rhs == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(razu.pass);
  CHECK_FALSE(check_scalar_razumikhin(3.0, 0.15).pass);  // boundary

  // single-interval scheme at kappa = 3, l = 1, r = 1/4:
  // 2*16*(1/16) = 2 against 3*(3/4) = 2.25
  const Certificate q1 = check_scalar_q1(3.0, 1, 0.25);
  CHECK(q1.name == "scalar-4.4");
  CHECK(q1.lhs == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q1.rhs == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(q1.margin == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(q1.pass);

  // two-interval scheme, independent transcription of the bound
  const double r = 0.3, kappa = 3.0;
  const int l = 1;
  const double bracket = 1.0 + std::exp((std::sqrt(2.0) + 1.0) * r / 4.0) +
                         std::exp(r / 2.0) +
                         std::pow(r, l + 1) / ((2.0 - r) * 2.0);
  const Certificate q2 = check_scalar_q2(kappa, l, r);
  CHECK(q2.name == "scalar-4.5");
  CHECK(q2.lhs ==
        doctest::Approx(2.0 * 16.0 * 0.09 * bracket).epsilon(1e-12));
  CHECK(q2.rhs == doctest::Approx(2.0 * kappa * 1.7).epsilon(1e-12));

  // direct input law, independent transcription at r = 1, mu = 1
  const double br46 = 1.0 + std::exp((std::sqrt(2.0) + 1.0) / 4.0) +
                      std::exp(0.5) + 0.25;
  const Certificate sp = check_scalar_state_predictor(3.0, 1.0, 1.0);
  CHECK(sp.name == "scalar-4.6");
  CHECK(sp.lhs == doctest::Approx(16.0 * br46).epsilon(1e-12));
  CHECK(sp.rhs == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_FALSE(sp.pass);

  // vanishing delay always passes
  CHECK(check_scalar_q1(3.0, 1, 0.0).pass);
  CHECK(check_scalar_q2(3.0, 1, 0.0).pass);
  CHECK(check_scalar_state_predictor(3.0, 1.0, 0.0).pass);
  CHECK(check_no_predictor(0.5, 2.0, 1.0, 1.0, 0.0).pass);

  // each condition knows its delay domain
  CHECK_THROWS_AS(check_scalar_q1(3.0, 1, 1.0), ContractViolation);
  CHECK_THROWS_AS(check_scalar_q2(3.0, 1, 2.0), ContractViolation);
  CHECK_THROWS_AS(check_scalar_state_predictor(3.0, 1.0, 2.0),
                  ContractViolation);
}

TEST_CASE("published maximum delays are reproduced") {
  // static law threshold has the closed form kappa/((1+kappa)(2+kappa))
  CHECK(max_delay_scalar_razumikhin(3.0) ==
        doctest::Approx(0.15).epsilon(1e-11));

  // l = 1 threshold solves 32r^2 + 3r - 3 = 0: r = (sqrt(393) - 3)/64
  const double root = (std::sqrt(393.0) - 3.0) / 64.0;
  CHECK(max_delay_scalar_q1(3.0, 1) == doctest::Approx(root).epsilon(1e-11));

  // remaining four-digit published values, absolute 1e-3
  CHECK(std::abs(max_delay_scalar_q1(3.0, 2) - 0.386) < 1e-3);
  CHECK(std::abs(max_delay_scalar_q2(3.0, 1) - 0.3058) < 1e-3);
  CHECK(std::abs(max_delay_scalar_state_predictor(3.0, 100.0) - 0.5284) <
        1e-3);
}

TEST_CASE("solved thresholds sit exactly on the pass/fail boundary") {
  const double rmax = max_delay_scalar_q1(3.0, 1);
  CHECK(check_scalar_q1(3.0, 1, rmax).pass);
  CHECK(check_scalar_q1(3.0, 1, rmax * (1.0 - 1e-9)).pass);
  CHECK_FALSE(check_scalar_q1(3.0, 1, rmax * (1.0 + 1e-9)).pass);

  const double rstat = max_delay_scalar_razumikhin(5.0);
  CHECK(check_scalar_razumikhin(5.0, rstat).pass);
  CHECK_FALSE(check_scalar_razumikhin(5.0, rstat * (1.0 + 1e-9)).pass);

  // more sweeps always buy at least as much delay
  double prev = 0.0;
  for (int sweeps = 1; sweeps <= 6; ++sweeps) {
    const double cur = max_delay_scalar_q1(3.0, sweeps);
    CHECK(cur > prev);
    CHECK(cur < 1.0);
    prev = cur;
  }
}

TEST_CASE("threshold solver refuses ill-posed scans") {
  const auto synthetic = [](bool pass_value) {
    Certificate c;
    c.lhs = pass_value ? 0.0 : 2.0;
    c.rhs = 1.0;
    c.margin = c.rhs - c.lhs;
    c.pass = pass_value;
    return c;
  };
  // non-monotone pass region: pass below 0.3 and again above 0.6
  CHECK_THROWS_AS(solve_max_delay(
                      [&](double r) {
                        return synthetic(r < 0.3 || r > 0.6);
                      },
                      0.01, 1.0),
                  ContractViolation);
  // hopeless condition
  CHECK_THROWS_AS(
      solve_max_delay([&](double) { return synthetic(false); }, 0.01, 1.0),
      MissingHypothesis);
  // never-failing condition saturates the scan range
  CHECK(solve_max_delay([&](double) { return synthetic(true); }, 1e-3, 5.0) ==
        5.0);
  // malformed bracket
  CHECK_THROWS_AS(
      solve_max_delay([&](double) { return synthetic(true); }, 1.0, 0.5),
      ContractViolation);
}

TEST_CASE("delayed-reading condition minimizes over its free exponent") {
  const Certificate c = check_no_predictor(1.0 / 3.0, 4.0, 1.0, 1.0, 0.05);
  CHECK(c.name == "nopredictor-remark");
  const double eps = c.parameters.at("epsilon");
  CHECK(eps > 1e-6);
  CHECK(eps < 1e6);
  // the recorded exponent is a local minimum of the bound
  const auto lhs_at = [&](double e) {
    const double grow = std::exp((2.0 + e) * 0.05);
    return (1.0 + 4.0 / 3.0) * 4.0 * 0.05 *
               (std::sqrt(e / (2.0 + e)) * std::sqrt(grow - 1.0) / e + 1.0) +
           (4.0 / 3.0) * 0.05 * std::exp(0.5 * (2.0 + e) * 0.05);
  };
  CHECK(c.lhs == doctest::Approx(lhs_at(eps)).epsilon(1e-10));
  CHECK(lhs_at(eps * 1.5) >= c.lhs - 1e-12);
  CHECK(lhs_at(eps / 1.5) >= c.lhs - 1e-12);

  // benchmark wiring: the scalar constants give a small positive threshold
  const double rmax = max_delay_no_predictor(1.0 / 3.0, 4.0, 1.0, 1.0);
  CHECK(rmax == doctest::Approx(0.0803185149112793).epsilon(1e-6));
  CHECK(check_no_predictor(1.0 / 3.0, 4.0, 1.0, 1.0, rmax).pass);
  CHECK_FALSE(
      check_no_predictor(1.0 / 3.0, 4.0, 1.0, 1.0, rmax * (1 + 1e-9)).pass);
}

TEST_CASE("scalar fixed-point condition reduces to the generic one") {
  // gamma = 1/kappa, R = 1+kappa, K = 1, L = 1, T = r turns the generic
  // condition into the scalar closed form (ratio identity and same verdict)
  const double kappa = 3.0;
  for (int sweeps = 1; sweeps <= 5; ++sweeps) {
    const double boundary = max_delay_scalar_q1(kappa, sweeps);
    for (double r :
         {0.05, 0.2, boundary * 0.999, boundary * 1.001, 0.7, 0.95}) {
      const Certificate scalar = check_scalar_q1(kappa, sweeps, r);
      const Certificate generic = check_picard_small_gain(
          1.0 / kappa, 1.0 + kappa, 1.0, 1.0, r, sweeps);
      CHECK(scalar.pass == generic.pass);
      CHECK(generic.lhs ==
            doctest::Approx(scalar.lhs / scalar.rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("benchmark gain constants") {
  const ISSConstants plain = scalar_benchmark_iss(3.0, 0.5, false);
  CHECK(plain.gamma == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(plain.R == 4.0);
  CHECK(plain.M == doctest::Approx(3.0));
  CHECK(plain.omega == doctest::Approx(1.5));

  const ISSConstants expo = scalar_benchmark_iss(3.0, 0.5, true);
  CHECK(expo.gamma == doctest::Approx(1.5 / (3.0 * std::sqrt(0.5))));
  CHECK(expo.omega == doctest::Approx(0.75));
  CHECK(expo.M == doctest::Approx(3.0));

  CHECK_THROWS_AS(scalar_benchmark_iss(3.0, 1.0, true), ContractViolation);
  CHECK_THROWS_AS(scalar_benchmark_iss(3.0, 0.0, false), ContractViolation);
  CHECK_THROWS_AS(scalar_benchmark_iss(0.0, 0.5, false), ContractViolation);
}
