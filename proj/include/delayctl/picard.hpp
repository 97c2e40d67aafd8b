#pragma once

#include "delayctl/dynamics.hpp"

namespace delayctl {

/// Parameters of the successive-approximation maps: l integration sweeps per
/// subinterval, q subintervals of length T = delay/q, the model's shared
/// Lipschitz/growth constant L, and the minimum quadrature resolution per
/// subinterval.  The error bounds require the contraction L*T < 1; plain map
/// evaluation does not.
struct PicardConfig {
  int iterations = 1;    // l >= 1
  int subintervals = 1;  // q >= 1
  double delay = 1.0;    // r > 0
  double lipschitz = 1.0;
  int grid = 32;  // minimum quadrature intervals per subinterval

  PicardConfig(int l, int q, double r, double L, int grid_intervals = 32);

  double subinterval_length() const { return delay / subintervals; }
  double contraction() const { return lipschitz * subinterval_length(); }
  bool contraction_ok() const { return contraction() < 1.0; }
};

/// Builds a PicardConfig from the model's declared constants
/// (L = max of lipschitz and growth; both must be declared).
PicardConfig config_for(const SystemModel& model, int l, int q, double r,
                        int grid_intervals = 32);

/// One integral sweep: returns the path t -> path(0) + int_0^t f(path, input)
/// on the shared grid of `path` and `input` (grids must match exactly).
/// Integrals use the composite trapezoid rule.
SampledSignal picard_iterate(const SystemModel& model,
                             const SampledSignal& path,
                             const SampledSignal& input);

/// Endpoint of `iterations` sweeps started from the constant lift of x, over
/// the single interval covered by `input` (expected length T = delay/q).
/// Approximates the flow of x over that interval.
Vec step_map(const SystemModel& model, const PicardConfig& cfg, const Vec& x,
             const SampledSignal& input);

/// Composition of step_map over the q consecutive subintervals of [0, r];
/// `input` must cover [0, r].  Approximates the flow over the full horizon.
Vec chained_map(const SystemModel& model, const PicardConfig& cfg,
                const Vec& x, const SampledSignal& input);

/// (LT)^(l+1) / (1 - LT) * (|x| + u_sup): single-interval approximation
/// error bound.  Throws ContractionViolated when LT >= 1.
double step_error_bound(const PicardConfig& cfg, double x_norm, double u_sup);

/// Chain amplification constant K(q) >= 1 (equals 1 for q = 1).
double chain_constant(const PicardConfig& cfg);

/// chain_constant * step_error_bound: bound on
/// |chained_map(x, u) - flow(x, u, r)|.
double chained_error_bound(const PicardConfig& cfg, double x_norm,
                           double u_sup);

}  // namespace delayctl
