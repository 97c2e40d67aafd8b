#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delayctl/certificates.hpp"
#include "delayctl/closedloop.hpp"
#include "delayctl/dynamics.hpp"
#include "delayctl/picard.hpp"
#include "delayctl/predictors.hpp"

namespace delayctl {

// ===========================================================================
// Scalar benchmark: x' = f(x) + u(t - r), k(x) = -(1+kappa)x, |f'| <= 1
// ===========================================================================

/// Fully wired scalar benchmark.  Every regularity constant equals 1, so
/// all closed-form delay conditions apply directly.  The declared gain pair
/// uses the tight limit of the admissible family (gamma = 1/kappa); its
/// M/eps slots are not meaningful and are set to 0.
struct ScalarBenchmark {
  double kappa = 1.0;
  double delay = 0.25;
  std::string f_name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;

  SystemModel model;
  FeedbackLaw feedback;
  InputSet input_set = InputSet::full(1);
  ISSConstants iss;

  PicardConfig picard_config(int sweeps, int subintervals,
                             int grid = 64) const;
  /// Hand-derived closed-form scheme; supported (sweeps, subintervals):
  /// (1,1), (2,1), (1,2).
  PredictorScheme closed_form_scheme(int sweeps, int subintervals) const;
  /// Generic fixed-point scheme on the same model.
  PredictorScheme generic_scheme(int sweeps, int subintervals,
                                 int grid = 64) const;
  PredictorScheme no_prediction_scheme() const;
};

/// Built-in field choices: "sin" or "tanh".
ScalarBenchmark scalar_benchmark(double kappa, double r,
                                 const std::string& f_name);

/// Custom field.  Both f and f' are spot-checked: f(0) = 0, |f(x)| <= |x|,
/// |f'(x)| <= 1, and f' consistent with a centered difference of f; any
/// violation throws ScenarioRefused.
ScalarBenchmark scalar_benchmark(double kappa, double r,
                                 std::function<double(double)> f,
                                 std::function<double(double)> fprime,
                                 const std::string& label = "custom");

/// Every closed-form condition applicable to the bundle for the given
/// scheme choice, each with its solved maximum delay attached.
std::vector<Certificate> scalar_certificates(const ScalarBenchmark& bundle,
                                             int sweeps, int subintervals,
                                             double mu);

// ===========================================================================
// Additive structure: f(x, u) = a(x) + b(u)
// ===========================================================================

/// Additive right-hand sides admit closed forms for the low-order
/// fixed-point maps (only b(u) needs quadrature).  They are transcribed
/// here independently of the generic machinery for cross-validation.
struct AdditiveBundle {
  SystemModel model;
  std::function<Vec(const Vec&)> a;
  std::function<Vec(const Vec&)> b;
  double lipschitz = 0.0;

  /// x + T a(x) + int_0^T b(u); u's domain sets T.
  Vec one_sweep(const Vec& x, const SampledSignal& u) const;
  /// x + int_0^T a(x + tau a(x) + int_0^tau b(u)) + int_0^T b(u).
  Vec two_sweep(const Vec& x, const SampledSignal& u) const;
  /// One sweep on each half of u's domain, composed.
  Vec composed_12(const Vec& x, const SampledSignal& u) const;
  /// Two sweeps on each half of u's domain, composed.
  Vec composed_22(const Vec& x, const SampledSignal& u) const;
  /// (LT)^3/(1-LT) * (|x| + u_sup): bound on |two_sweep - flow(T)|.
  double two_sweep_error_bound(double T, double x_norm, double u_sup) const;
};

/// Spot-checks the declared structure (a(0) = 0, Lipschitz bound on a,
/// |b(u)| <= L|u|) on random samples; violations throw ScenarioRefused.
AdditiveBundle additive_bundle(int state_dim, int input_dim,
                               std::function<Vec(const Vec&)> a,
                               std::function<Vec(const Vec&)> b, double L,
                               unsigned check_seed = 1234);

// ===========================================================================
// Linear plant with exact predictor
// ===========================================================================

/// x' = Ax + Bu(t - r) with linear feedback and the exact matrix-exponential
/// predictor.  Requires A + B*gain Hurwitz (else ScenarioRefused).
struct LinearSmithBundle {
  Mat A, B, gain;
  double delay = 0.0;
  SystemModel model;
  FeedbackLaw feedback;
  InputSet input_set = InputSet::full(1);
  PredictorScheme scheme;
  std::optional<ISSConstants> iss;
};

LinearSmithBundle linear_smith(const Mat& A, const Mat& B, const Mat& gain,
                               double r);

/// The exact-predictor tracking law w' = g - mu(w - p) expands, for the
/// linear plant, into an explicit linear delay ODE
///   u'(t) = gain e^{Ar}(A + mu I) x(t)
///           + int_0^r gain (A + mu I) e^{A(r-s)} B u(t+s-r) ds
///           + (gain B - mu I) u(t).
/// This routine integrates that expansion directly (independent right-hand
/// side assembly) for cross-validation against the generic loop.
SimulationResult simulate_explicit_linear_law(const LinearSmithBundle& bundle,
                                              const LoopOptions& opt,
                                              const Vec& x0,
                                              const HistorySegment& u0);

/// Small-gain rows for the exact scheme (a1 = a2 = 0); gamma defaults to 0
/// when no gain pair is declared (the rows do not depend on it).
std::vector<Certificate> linear_certificates(const LinearSmithBundle& bundle,
                                             double mu);

// ===========================================================================
// Triangular chain: x_i' = f_i(x_1..x_i) + x_{i+1}, x_n' = f_n(x) + u
// ===========================================================================

/// Chain of globally Lipschitz links closed by a user-supplied linear gain.
/// Gain synthesis and gain-pair derivation are out of scope: without a
/// declared gain pair the bundle is simulation-only (no certificates).
struct TriangularBundle {
  int dim = 1;
  double delay = 0.0;
  double link_bound = 0.0;  // declared bound on each |grad f_i|
  SystemModel model;
  FeedbackLaw feedback;
  InputSet input_set = InputSet::full(1);
  std::optional<ISSConstants> iss;

  PicardConfig picard_config(int sweeps, int subintervals,
                             int grid = 64) const;
  PredictorScheme generic_scheme(int sweeps, int subintervals,
                                 int grid = 64) const;
};

/// links[i] receives the first i+1 state coordinates.  The declared bounds
/// are spot-checked on random samples (ScenarioRefused on violation).
TriangularBundle triangular_chain(
    std::vector<std::function<double(const Vec&)>> links, double link_bound,
    const Mat& gain, double r,
    std::optional<ISSConstants> iss = std::nullopt,
    unsigned check_seed = 2024);

/// Fixed-point small-gain rows plus the delayed-reading condition; empty
/// when the bundle declares no gain pair.
std::vector<Certificate> triangular_certificates(const TriangularBundle& bundle,
                                                 int sweeps, int subintervals,
                                                 double mu);

}  // namespace delayctl
