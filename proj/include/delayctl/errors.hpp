#pragma once

#include <stdexcept>
#include <string>

namespace delayctl {

/// Caller broke an API precondition (dimension mismatch, bad grid, ...).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// A sampled signal was read outside its recorded domain.
struct SignalDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation needs a regularity constant the model did not declare.
struct MissingHypothesis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A bound was requested in a regime where the underlying fixed-point
/// iteration is not a contraction (L*T >= 1).
struct ContractionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// State escaped the divergence cutoff during integration.
struct DivergenceError : std::runtime_error {
  double time;
  DivergenceError(const std::string& what, double t)
      : std::runtime_error(what), time(t) {}
};

/// A scenario factory refused its inputs (failed spot check, non-Hurwitz
/// closed loop, out-of-range parameters).
struct ScenarioRefused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested predictor variant does not exist or lacks a needed evaluator.
struct UnsupportedScheme : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Decay-rate fit could not be performed (window too short).
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace delayctl
