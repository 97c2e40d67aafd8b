#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "delayctl/errors.hpp"

namespace delayctl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// States whose norm passes this cutoff are reported as divergent.
inline constexpr double kDivergenceCutoff = 1e12;

/// Sharpening factor (1 + sqrt(2))/2: a field with |f(x,u)| <= L(|x|+|u|)
/// admits the exponential growth envelope exp(kGrowthRateFactor*L*t).
inline const double kGrowthRateFactor = (1.0 + std::sqrt(2.0)) / 2.0;

// ===========================================================================
// Model
// ===========================================================================

/// Right-hand side x' = f(x, u) together with the regularity constants the
/// caller declares for it.  Constants are optional; operations that need one
/// throw MissingHypothesis when it is absent.  Declared constants can be
/// spot-verified with verify_declared_bounds.
struct SystemModel {
  int state_dim = 1;
  int input_dim = 1;
  std::function<Vec(const Vec&, const Vec&)> f;

  /// |f(x,u) - f(y,u)| <= lipschitz * |x - y|
  std::optional<double> lipschitz;
  /// |f(x,u)| <= growth * (|x| + |u|)
  std::optional<double> growth;
  /// |f(x,u)| <= growth_state * |x| + growth_input * |u|
  std::optional<double> growth_state;
  std::optional<double> growth_input;
};

/// Evaluates the field with dimension checks.
Vec evaluate_field(const SystemModel& model, const Vec& x, const Vec& u);

/// Samples random point pairs in the box [-box, box]^n x [-box, box]^m and
/// checks every declared constant on them.  Returns false (and the worst
/// violation ratio via `worst`, if given) when a declared bound fails.
bool verify_declared_bounds(const SystemModel& model, double box,
                            unsigned seed, int pairs = 1000,
                            double* worst = nullptr);

// ===========================================================================
// Signals
// ===========================================================================

/// Uniformly sampled vector signal on [t_start, t_end]; reads between nodes
/// interpolate linearly.  Immutable after construction.
class SampledSignal {
 public:
  /// samples: one column per node, node j at t_start + j*dt.
  SampledSignal(double t_start, double dt, Mat samples);

  static SampledSignal constant(double t_start, double t_end, int intervals,
                                const Vec& value);
  static SampledSignal from_function(double t_start, double t_end,
                                     int intervals,
                                     const std::function<Vec(double)>& fn);

  double t_start() const { return t_start_; }
  double t_end() const { return t_start_ + dt_ * intervals(); }
  double dt() const { return dt_; }
  int intervals() const { return static_cast<int>(samples_.cols()) - 1; }
  int dim() const { return static_cast<int>(samples_.rows()); }
  const Mat& samples() const { return samples_; }

  /// Linear interpolation; throws SignalDomainError outside the domain
  /// (up to a small roundoff slack).
  Vec value(double t) const;

  /// max_j |sample_j|
  double sup_norm() const;

 private:
  double t_start_;
  double dt_;
  Mat samples_;
};

/// v(t) = s(t + theta): same samples, domain translated by -theta.
SampledSignal shift(const SampledSignal& s, double theta);

/// Sampled input history on [-r, 0] -- the controller's accessible past.
/// Node j sits at theta = -r + j*h with h = r/intervals.
class HistorySegment {
 public:
  HistorySegment(double r, Mat samples);

  static HistorySegment constant(double r, int intervals, const Vec& value);
  static HistorySegment zero(double r, int intervals, int dim);
  static HistorySegment from_function(double r, int intervals,
                                      const std::function<Vec(double)>& fn);

  double horizon() const { return r_; }
  int intervals() const { return static_cast<int>(samples_.cols()) - 1; }
  double dt() const { return r_ / intervals(); }
  int dim() const { return static_cast<int>(samples_.rows()); }
  const Mat& samples() const { return samples_; }

  /// theta in [-r, 0]
  Vec value(double theta) const;
  Vec head() const { return samples_.col(samples_.cols() - 1); }
  Vec tail() const { return samples_.col(0); }
  double sup_norm() const;

  /// Reinterpret the stored past as a forward signal: sample j at
  /// t_start + j*h.  Feeding t_start = 0 turns the history u on [-r, 0]
  /// into the delayed reading t -> u(t - r) on [0, r].
  SampledSignal as_signal(double t_start = 0.0) const;

 private:
  double r_;
  Mat samples_;
};

// ===========================================================================
// Trajectories
// ===========================================================================

/// Simulation output on a uniform time grid.  u / w columns are recorded
/// only by runs that have them.
struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> u;
  std::vector<Vec> w;

  std::size_t size() const { return t.size(); }
  /// |x(t_i)| + |w(t_i)| (controller part omitted when absent)
  double norm_at(std::size_t i) const;
};

// ===========================================================================
// Integration
// ===========================================================================

/// Classical fixed-step fourth-order Runge-Kutta solve of x' = f(x, u(t))
/// over [0, T].  h must divide T; u must cover [0, T].  Throws
/// DivergenceError when the state exits the cutoff ball or turns non-finite.
Trajectory solve_ivp(const SystemModel& model, const Vec& x0,
                     const SampledSignal& u, double T, double h);

/// Terminal state of solve_ivp.
Vec flow(const SystemModel& model, const Vec& x0, const SampledSignal& u,
         double T, double h);

/// exp(L*t) * (|x0| + u_sup) with L = growth, falling back to
/// growth_state + growth_input.
double growth_bound(const SystemModel& model, const Vec& x0, double u_sup,
                    double t);

/// | phi(t+tau, x0; u) - phi(t, phi(tau, x0; u); shift(u, tau)) |
/// evaluated with step h; both legs use the same integrator.
double semigroup_residual(const SystemModel& model, const Vec& x0,
                          const SampledSignal& u, double t, double tau,
                          double h);

}  // namespace delayctl
