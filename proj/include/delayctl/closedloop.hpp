#pragma once

#include "delayctl/dynamics.hpp"
#include "delayctl/predictors.hpp"

namespace delayctl {

/// Shared knobs of the delayed closed-loop integrators.  The step must
/// divide the delay so the input ring stays aligned with the grid.
struct LoopOptions {
  double mu = 1.0;      // controller tracking rate (unused by the static law)
  double delay = 0.25;  // r
  double step = 5e-3;   // h
  double horizon = 20.0;
};

struct SimulationResult {
  Trajectory traj;
  /// |x0| + sup-norm of the initial controller/input history.
  double initial_scale = 0.0;
  bool diverged = false;
  double blowup_time = 0.0;
};

/// Dynamic predictor feedback: plant x' = f(x, u(t - r)) driven by
/// u = project_U(w), w' = g(x, past u) - mu*(w - p(x, past u)).
/// The initial input history is project_U(w0(.)).
SimulationResult simulate_dynamic_feedback(const SystemModel& model,
                                           const InputSet& input_set,
                                           const PredictorScheme& scheme,
                                           const LoopOptions& opt,
                                           const Vec& x0,
                                           const HistorySegment& w0);

/// Direct input law for linear feedback (unconstrained input): u itself is
/// the controller state,
/// u' = gain*f(predicted state, u) - mu*(u - gain*predicted state).
SimulationResult simulate_state_predictor_feedback(const SystemModel& model,
                                                   const FeedbackLaw& fb,
                                                   const PicardConfig& cfg,
                                                   const LoopOptions& opt,
                                                   const Vec& x0,
                                                   const HistorySegment& u0);

/// Memoryless law u(t) = project_U(k(x(t))) on the delayed plant; w0 only
/// seeds the initial input history.
SimulationResult simulate_static_feedback(const SystemModel& model,
                                          const InputSet& input_set,
                                          const FeedbackLaw& fb,
                                          const LoopOptions& opt,
                                          const Vec& x0,
                                          const HistorySegment& w0);

/// Exponential-decay fit of log(|x| + |w|) over the post-transient window
/// [transient_skip * T_end, T_end].
struct DecayFit {
  bool converged_to_zero = false;
  double rate = 0.0;       // fitted decay exponent (negated slope)
  double amplitude = 0.0;  // envelope constant, normalized by `scale`
  double scale = 1.0;      // |x0| + sup|w0| used for normalization
  std::size_t window_begin = 0;
};

/// Least-squares line fit of log norm on the fit window; the amplitude is
/// shifted so the fitted envelope dominates the entire recorded trajectory
/// (the observed uniform constant for the fitted rate).  Throws FitError
/// when fewer than 10 samples are available.  `initial_scale` <= 0 falls
/// back to the first-sample norm.
DecayFit estimate_decay(const Trajectory& traj, double transient_skip = 0.3,
                        double initial_scale = 0.0);

/// True when every recorded sample satisfies
/// norm(t) <= slack * amplitude * scale * exp(-rate * t), with a
/// nonnegative fitted rate.  A converged-to-zero fit passes trivially.
bool verify_envelope(const Trajectory& traj, const DecayFit& fit,
                     double slack = 1.05);

}  // namespace delayctl
