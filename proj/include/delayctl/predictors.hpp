#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "delayctl/dynamics.hpp"
#include "delayctl/picard.hpp"

namespace delayctl {

// ===========================================================================
// Feedback and input constraints
// ===========================================================================

/// Stabilizing feedback k for the delay-free system, with its gradient and a
/// shared linear bound: |k(x)| <= bound*|x| and |grad k(x)| <= bound.
struct FeedbackLaw {
  std::function<Vec(const Vec&)> k;
  std::function<Mat(const Vec&)> grad;  // m x n
  double bound = 0.0;                   // R
  bool linear = false;
  Mat gain;  // k(x) = gain * x when linear

  /// k(x) = gain*x with bound = |gain| (spectral norm).
  static FeedbackLaw linear_gain(const Mat& gain);
};

/// Spot-checks k(0) = 0, |k| <= bound*|x| and |grad k| <= bound on random
/// points in [-box, box]^n.
bool verify_feedback(const FeedbackLaw& fb, int state_dim, double box,
                     unsigned seed, int samples = 1000);

/// Closed convex constraint set containing 0: the whole space, a box, or a
/// centred euclidean ball.  project() is the metric projection.
class InputSet {
 public:
  static InputSet full(int dim);
  static InputSet box(const Vec& lo, const Vec& hi);
  static InputSet ball(int dim, double radius);

  Vec project(const Vec& w) const;
  bool contains(const Vec& w, double tol = 0.0) const;
  bool is_full() const { return kind_ == Kind::Full; }
  int dim() const { return dim_; }

 private:
  enum class Kind { Full, Box, Ball };
  Kind kind_ = Kind::Full;
  int dim_ = 1;
  Vec lo_, hi_;
  double radius_ = 0.0;
};

inline Vec project(const InputSet& set, const Vec& w) {
  return set.project(w);
}

// ===========================================================================
// Predictor schemes
// ===========================================================================

enum class SchemeKind {
  Exact,           // prediction error identically zero
  Approximate,     // fixed-point approximation of the flow
  None,            // no prediction: p = k(x)
  StatePredictor,  // predicted-state pair used by the direct input law
};

/// Predictor pair (p, g): p approximates k(flow over the delay horizon),
/// g is d/dt p along closed-loop solutions.  a1/a2 bound the prediction
/// error by max{a1|x|, a2*sup|u|}; G bounds |p|+|g| by G*(|x|+sup|u|).
/// Evaluators are pure; the scheme itself is immutable after construction
/// apart from the clamp diagnostic counter.
struct PredictorScheme {
  std::string name;
  SchemeKind kind = SchemeKind::Approximate;
  std::function<Vec(const Vec&, const HistorySegment&)> p;
  std::function<Vec(const Vec&, const HistorySegment&)> g;  // may be absent
  std::optional<double> a1, a2;
  std::optional<double> G;

  bool has_g() const { return static_cast<bool>(g); }

  /// Number of p-evaluations whose raw value was altered by the input-set
  /// projection (diagnostic; 0 for unconstrained sets).
  long clamp_count() const { return clamps_ ? clamps_->load() : 0; }

  std::shared_ptr<std::atomic<long>> clamps_;
};

/// Predicted state: the chained fixed-point map applied to the delayed
/// reading of the history (u(. - r) on [0, r]).
Vec predict_state(const SystemModel& model, const PicardConfig& cfg,
                  const Vec& x, const HistorySegment& u);

/// gain * f(predicted state, u(0)): time derivative of gain*predict_state
/// along closed-loop solutions (linear feedback only).
Vec linear_predictor_derivative(const SystemModel& model,
                                const FeedbackLaw& fb, const PicardConfig& cfg,
                                const Vec& x, const HistorySegment& u);

/// p = project_U(k(predict_state)); g attached via the linear route when the
/// feedback is linear and U is the whole space.  Error constants use the
/// symmetric split of the prediction-error bound.
PredictorScheme make_picard_predictor(const SystemModel& model,
                                      const FeedbackLaw& fb,
                                      const PicardConfig& cfg,
                                      const InputSet& input_set);

/// Same evaluators as the linear Picard route but tagged for the direct
/// input law, whose error constants carry an extra max{1, L} factor.
PredictorScheme make_state_predictor_scheme(const SystemModel& model,
                                            const FeedbackLaw& fb,
                                            const PicardConfig& cfg);

/// Exact predictor for x' = Ax + Bu with linear feedback gain*x: prediction
/// via the matrix exponential and a trapezoid convolution over the history
/// grid.  Requires A + B*gain Hurwitz.  a1 = a2 = 0.
PredictorScheme smith_scheme(const Mat& A, const Mat& B, const Mat& gain,
                             double r);

/// No prediction: p = k(x), g = grad k(x) * f(x, u(-r)).  Error constants
/// come from the coarse delayed-reading bound when the model declares
/// growth_state/growth_input (unit free parameters); absent otherwise.
PredictorScheme no_predictor_scheme(const SystemModel& model,
                                    const FeedbackLaw& fb, double r);

/// Hand-derived closed forms for the scalar benchmark x' = f(x) + u(t - r)
/// with k(x) = -(1+kappa)x, |f'| <= 1.  Supported (sweeps, subintervals)
/// variants: (1,1), (2,1), (1,2).  History integrals use the trapezoid rule
/// on the history grid (inner cumulative integrals are exact for the
/// piecewise-linear history representation).
PredictorScheme scalar_benchmark_scheme(double kappa, double r,
                                        const std::function<double(double)>& f,
                                        const std::function<double(double)>& fprime,
                                        int sweeps, int subintervals);

}  // namespace delayctl
