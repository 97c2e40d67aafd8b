#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delayctl/scenarios.hpp"

namespace delayctl {

/// Parsed form of the JSON run description.  Fields mirror the JSON keys
/// one-to-one; realize() turns a Config into executable objects.  All
/// parse/shape problems are reported as ConfigError.
struct ModelConfig {
  std::string type = "scalar";  // scalar | linear | triangular | additive

  // scalar: x' = f(x) + u(t-r), feedback -(1+kappa)x
  double kappa = 1.0;
  std::string f = "sin";  // built-in name or expression over x
  std::string fprime;     // derivative expression (custom f only)

  // linear: x' = Ax + Bu(t-r)
  std::vector<std::vector<double>> A;
  std::vector<std::vector<double>> B;

  // triangular: x_i' = link_i(x_1..x_i) + x_{i+1}
  std::vector<std::string> links;  // link i over x1..x(i+1)
  double link_bound = 0.0;

  // additive: x' = a(x) + b(u)
  std::vector<std::string> a;  // rows over x1..xn
  std::vector<std::string> b;  // rows over u1..um
  double lipschitz = 0.0;
};

struct FeedbackConfig {
  std::vector<std::vector<double>> gain;  // m x n
};

struct InputSetConfig {
  std::string kind = "full";   // full | box | ball
  std::vector<double> lo, hi;  // box bounds
  double radius = 0.0;         // ball radius
};

/// Predictor/law selection.  kinds: picard (generic fixed-point scheme),
/// closed-form (hand-derived scalar formulas), exact (linear
/// matrix-exponential predictor), none (p = k(x)), state (direct input law
/// on the predicted state), static (memoryless u = k(x)).
struct PredictorChoice {
  std::string kind = "picard";
  int l = 1;
  int q = 1;
  int grid = 64;
};

struct LoopConfig {
  double mu = 1.0;
  double r = 0.25;
  double h = 0.005;
  double T_end = 20.0;
};

struct InitialConfig {
  std::vector<double> x0;            // empty -> zeros (or seeded random)
  std::vector<double> w0;            // constant history value
  std::vector<std::string> w0_expr;  // per-component expressions over t
  double random_x0 = 0.0;            // norm of a seeded random x0
  double random_w0 = 0.0;            // norm of a seeded random constant w0
};

struct IssConfig {
  double gamma = 0.0;
  double R = 0.0;
  double M = 0.0;
  double omega = 0.0;
  double eps = 0.0;
};

struct Config {
  ModelConfig model;
  std::optional<FeedbackConfig> feedback;
  InputSetConfig input_set;
  PredictorChoice predictor;
  LoopConfig loop;
  InitialConfig initial;
  std::optional<IssConfig> iss;
  std::vector<std::string> certificates;  // names to report; empty = all
  unsigned long seed = 0;
};

Config parse_config(const std::string& json_text);
Config load_config_file(const std::string& path);

/// Canonical serialization: fixed key order, shortest round-trip numbers.
/// parse -> serialize -> parse is the identity.
std::string serialize_config(const Config& config);

/// Executable objects assembled from a config (exactly one bundle is set,
/// matching model.type).
struct RealizedConfig {
  Config config;
  SystemModel model;
  bool has_feedback = false;
  FeedbackLaw feedback;
  InputSet input_set = InputSet::full(1);
  LoopOptions loop;
  Vec x0;
  std::optional<HistorySegment> w0;

  std::optional<ScalarBenchmark> scalar;
  std::optional<LinearSmithBundle> linear;
  std::optional<TriangularBundle> triangular;
  std::optional<AdditiveBundle> additive;
};

RealizedConfig realize(const Config& config);

/// Scheme for the configured predictor kind ("static" has none and is
/// rejected; "state" yields the predicted-state pair).
PredictorScheme build_scheme(const RealizedConfig& rz);

/// Certificates applicable to the realized config, optionally filtered by
/// config.certificates.
std::vector<Certificate> applicable_certificates(const RealizedConfig& rz);

}  // namespace delayctl
