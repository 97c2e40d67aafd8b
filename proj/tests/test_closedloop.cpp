#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "delayctl/closedloop.hpp"
#include "delayctl/errors.hpp"
#include "delayctl/scenarios.hpp"

using namespace delayctl;

namespace {

Trajectory synthetic_decay(double amplitude, double rate, double T, double h) {
  Trajectory traj;
  for (double t = 0.0; t <= T + 1e-12; t += h) {
    traj.t.push_back(t);
    traj.x.push_back(Vec::Constant(1, amplitude * std::exp(-rate * t)));
  }
  return traj;
}

}  // namespace

TEST_CASE("certified scalar loop contracts exponentially") {
  const ScalarBenchmark bench = scalar_benchmark(3.0, 0.25, "sin");
  const PredictorScheme scheme = bench.closed_form_scheme(1, 1);
  const LoopOptions opt{1.0, 0.25, 0.005, 20.0};
  const HistorySegment w0 =
      HistorySegment::constant(0.25, 50, Vec::Constant(1, 0.5));
  const SimulationResult res = simulate_dynamic_feedback(
      bench.model, bench.input_set, scheme, opt, Vec::Constant(1, 2.0), w0);
  CHECK_FALSE(res.diverged);
  CHECK(res.initial_scale == doctest::Approx(2.5));
  REQUIRE(res.traj.size() == 4001);
  CHECK(res.traj.t.back() == doctest::Approx(20.0));
  // the loop records both the applied input and the controller state
  REQUIRE(res.traj.u.size() == res.traj.size());
  REQUIRE(res.traj.w.size() == res.traj.size());
  // unconstrained input: u = w throughout
  CHECK((res.traj.u[777] - res.traj.w[777]).norm() == doctest::Approx(0.0));

  const DecayFit fit = estimate_decay(res.traj, 0.3, res.initial_scale);
  CHECK(fit.rate > 0.2);
  CHECK(verify_envelope(res.traj, fit));
  // the state really contracted
  CHECK(res.traj.norm_at(res.traj.size() - 1) < 1e-4 * res.initial_scale);
}

TEST_CASE("static feedback handles short delays") {
  const ScalarBenchmark bench = scalar_benchmark(3.0, 0.14, "sin");
  const LoopOptions opt{1.0, 0.14, 0.002, 20.0};
  const HistorySegment w0 =
      HistorySegment::constant(0.14, 70, Vec::Constant(1, -1.0));
  const SimulationResult res = simulate_static_feedback(
      bench.model, bench.input_set, bench.feedback, opt, Vec::Constant(1, 3.0),
      w0);
  CHECK_FALSE(res.diverged);
  const DecayFit fit = estimate_decay(res.traj, 0.3, res.initial_scale);
  CHECK(fit.rate > 0.2);
  CHECK(verify_envelope(res.traj, fit));
}

TEST_CASE("direct input law tracks the predicted state") {
  const ScalarBenchmark bench = scalar_benchmark(3.0, 0.52, "sin");
  const PicardConfig cfg = bench.picard_config(2, 2, 128);
  const LoopOptions opt{100.0, 0.52, 0.002, 10.0};
  const HistorySegment u0 =
      HistorySegment::constant(0.52, 260, Vec::Constant(1, 1.0));
  const SimulationResult res = simulate_state_predictor_feedback(
      bench.model, bench.feedback, cfg, opt, Vec::Constant(1, -2.0), u0);
  CHECK_FALSE(res.diverged);
  const DecayFit fit = estimate_decay(res.traj, 0.3, res.initial_scale);
  CHECK(fit.rate > 0.1);
  CHECK(verify_envelope(res.traj, fit));
}

TEST_CASE("zero initial data stays at the origin") {
  const ScalarBenchmark bench = scalar_benchmark(3.0, 0.25, "sin");
  const PredictorScheme scheme = bench.closed_form_scheme(1, 1);
  const LoopOptions opt{1.0, 0.25, 0.005, 5.0};
  const HistorySegment w0 = HistorySegment::zero(0.25, 50, 1);
  const SimulationResult res = simulate_dynamic_feedback(
      bench.model, bench.input_set, scheme, opt, Vec::Zero(1), w0);
  for (std::size_t i = 0; i < res.traj.size(); i += 100)
    CHECK(res.traj.norm_at(i) == doctest::Approx(0.0));
  const DecayFit fit = estimate_decay(res.traj, 0.3, res.initial_scale);
  CHECK(fit.converged_to_zero);
  CHECK(verify_envelope(res.traj, fit));
}

TEST_CASE("destabilizing feedback is reported as divergence") {
  SystemModel unstable;
  unstable.f = [](const Vec& x, const Vec& u) {
    return Vec::Constant(1, x(0) + u(0));
  };
  const FeedbackLaw push = FeedbackLaw::linear_gain(Mat::Constant(1, 1, 2.0));
  const LoopOptions opt{1.0, 0.1, 0.001, 50.0};
  const HistorySegment w0 = HistorySegment::zero(0.1, 100, 1);
  const SimulationResult res = simulate_static_feedback(
      unstable, InputSet::full(1), push, opt, Vec::Constant(1, 1.0), w0);
  CHECK(res.diverged);
  CHECK(res.blowup_time > 0.0);
  CHECK(res.blowup_time < 50.0);
  // the recorded part of the trajectory stays finite
  CHECK(res.traj.size() >= 2);
  CHECK(std::isfinite(res.traj.x.back()(0)));
}

TEST_CASE("the grid must tile both delay and horizon") {
  const ScalarBenchmark bench = scalar_benchmark(3.0, 0.25, "sin");
  const PredictorScheme scheme = bench.closed_form_scheme(1, 1);
  const HistorySegment w0 = HistorySegment::zero(0.25, 50, 1);
  CHECK_THROWS_AS(
      simulate_dynamic_feedback(bench.model, bench.input_set, scheme,
                                LoopOptions{1.0, 0.25, 0.003, 20.0},
                                Vec::Zero(1), w0),
      ConfigError);
  CHECK_THROWS_AS(
      simulate_dynamic_feedback(bench.model, bench.input_set, scheme,
                                LoopOptions{1.0, 0.25, 0.005, 20.0021},
                                Vec::Zero(1), w0),
      ConfigError);
}

TEST_CASE("dynamic law requires a derivative evaluator") {
  const ScalarBenchmark bench = scalar_benchmark(3.0, 0.25, "sin");
  const InputSet box =
      InputSet::box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  const PredictorScheme constrained =
      make_picard_predictor(bench.model, bench.feedback,
                            bench.picard_config(1, 1), box);
  REQUIRE_FALSE(constrained.has_g());
  const HistorySegment w0 = HistorySegment::zero(0.25, 50, 1);
  CHECK_THROWS_AS(
      simulate_dynamic_feedback(bench.model, box, constrained,
                                LoopOptions{1.0, 0.25, 0.005, 5.0},
                                Vec::Constant(1, 1.0), w0),
      UnsupportedScheme);
}

TEST_CASE("decay fits recover synthetic envelopes") {
  const Trajectory traj = synthetic_decay(5.0, 0.7, 20.0, 0.01);
  const DecayFit fit = estimate_decay(traj, 0.3, 5.0);
  CHECK_FALSE(fit.converged_to_zero);
  CHECK(fit.rate == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(fit.scale == doctest::Approx(5.0));
  // normalized amplitude close to 1 for a pure exponential
  CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(verify_envelope(traj, fit));

  // growth fits a negative rate and fails verification
  const Trajectory growing = synthetic_decay(1.0, -0.4, 20.0, 0.01);
  const DecayFit bad = estimate_decay(growing, 0.3, 1.0);
  CHECK(bad.rate < 0.0);
  CHECK_FALSE(verify_envelope(growing, bad));
}

TEST_CASE("fits refuse windows that are too short") {
  const Trajectory tiny = synthetic_decay(1.0, 0.5, 0.05, 0.01);
  CHECK_THROWS_AS(estimate_decay(tiny, 0.3, 1.0), FitError);
}

TEST_CASE("excursions inflate the fitted amplitude") {
  // decays overall but with a large excursion before the fit window: the
  // amplitude grows until the envelope dominates the whole recording
  Trajectory traj = synthetic_decay(1.0, 0.5, 20.0, 0.01);
  traj.x[1600] = Vec::Constant(1, 40.0);  // t = 16, far above the tail line
  const DecayFit fit = estimate_decay(traj, 0.9, 1.0);
  CHECK(fit.rate == doctest::Approx(0.5).epsilon(1e-6));
  // amplitude >= 40 * exp(rate * 16) / scale
  CHECK(fit.amplitude >= 40.0 * std::exp(fit.rate * 16.0) * 0.999);
  CHECK(verify_envelope(traj, fit));

  // a hand-built fit that undershoots the excursion is rejected
  DecayFit tight = fit;
  tight.amplitude = 1.0;
  CHECK_FALSE(verify_envelope(traj, tight));
}
