#include "delayctl/scenarios.hpp"

#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <utility>

#include "delayctl/matexp.hpp"

namespace delayctl {

namespace {

double spectral_norm(const Mat& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

void check_scalar_field(const std::function<double(double)>& f,
                        const std::function<double(double)>& fprime,
                        const std::string& label) {
  if (!f || !fprime) {
    throw ContractViolation{"scalar benchmark needs both f and f'"};
  }
  if (std::abs(f(0.0)) > 1e-12) {
    throw ScenarioRefused{"scalar benchmark '" + label + "': f(0) must be 0"};
  }
  std::mt19937_64 rng{0x5ca1ab1eULL};
  std::uniform_real_distribution<double> pick(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = pick(rng);
    const double slope = fprime(x);
    if (std::abs(slope) > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg << "scalar benchmark '" << label << "': |f'(" << x << ")| = "
          << std::abs(slope) << " exceeds 1";
      throw ScenarioRefused{msg.str()};
    }
    if (std::abs(f(x)) > std::abs(x) * (1.0 + 1e-9) + 1e-12) {
      std::ostringstream msg;
      msg << "scalar benchmark '" << label << "': |f(" << x
          << ")| exceeds |x|";
      throw ScenarioRefused{msg.str()};
    }
    const double h = 1e-4;
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    if (std::abs(fd - slope) > 1e-3) {
      std::ostringstream msg;
      msg << "scalar benchmark '" << label
          << "': declared derivative disagrees with f near x = " << x;
      throw ScenarioRefused{msg.str()};
    }
  }
}

ScalarBenchmark make_scalar(double kappa, double r,
                            std::function<double(double)> f,
                            std::function<double(double)> fprime,
                            std::string label) {
  if (!(kappa > 0.0)) {
    throw ContractViolation{"scalar benchmark needs kappa > 0"};
  }
  if (!(r > 0.0)) {
    throw ContractViolation{"scalar benchmark needs a positive delay"};
  }
  check_scalar_field(f, fprime, label);

  ScalarBenchmark bundle;
  bundle.kappa = kappa;
  bundle.delay = r;
  bundle.f_name = std::move(label);
  bundle.f = std::move(f);
  bundle.fprime = std::move(fprime);

  const auto field = bundle.f;
  bundle.model.state_dim = 1;
  bundle.model.input_dim = 1;
  bundle.model.f = [field](const Vec& x, const Vec& u) {
    Vec dx(1);
    dx(0) = field(x(0)) + u(0);
    return dx;
  };
  bundle.model.lipschitz = 1.0;
  bundle.model.growth = 1.0;
  bundle.model.growth_state = 1.0;
  bundle.model.growth_input = 1.0;

  Mat gain(1, 1);
  gain(0, 0) = -(1.0 + kappa);
  bundle.feedback = FeedbackLaw::linear_gain(gain);
  bundle.input_set = InputSet::full(1);

  bundle.iss.gamma = 1.0 / kappa;
  bundle.iss.R = 1.0 + kappa;
  bundle.iss.M = 0.0;
  bundle.iss.omega = kappa / 2.0;
  bundle.iss.eps = 0.0;
  return bundle;
}

/// Cumulative trapezoid prefix of b(u(.)) on u's grid.
std::vector<Vec> input_integral_prefix(const std::function<Vec(const Vec&)>& b,
                                       const SampledSignal& u) {
  const int n = u.intervals();
  std::vector<Vec> acc(static_cast<std::size_t>(n) + 1);
  Vec prev = b(u.samples().col(0));
  acc[0] = Vec::Zero(prev.size());
  for (int j = 1; j <= n; ++j) {
    Vec cur = b(u.samples().col(j));
    acc[static_cast<std::size_t>(j)] =
        acc[static_cast<std::size_t>(j) - 1] + 0.5 * u.dt() * (prev + cur);
    prev = cur;
  }
  return acc;
}

int checked_even_intervals(const SampledSignal& u) {
  const int n = u.intervals();
  if (n % 2 != 0) {
    throw ContractViolation{
        "midpoint-split maps need an even input interval count"};
  }
  return n;
}

/// Leaves r_max unset when the condition holds nowhere on the bracket.
template <class Fn>
void attach_max_delay(Certificate& cert, Fn&& solve) {
  try {
    cert.r_max = solve();
  } catch (const MissingHypothesis&) {
  }
}

}  // namespace

// ===========================================================================
// Scalar benchmark
// ===========================================================================

PicardConfig ScalarBenchmark::picard_config(int sweeps, int subintervals,
                                            int grid) const {
  return config_for(model, sweeps, subintervals, delay, grid);
}

PredictorScheme ScalarBenchmark::closed_form_scheme(int sweeps,
                                                    int subintervals) const {
  return scalar_benchmark_scheme(kappa, delay, f, fprime, sweeps,
                                 subintervals);
}

PredictorScheme ScalarBenchmark::generic_scheme(int sweeps, int subintervals,
                                                int grid) const {
  return make_picard_predictor(model, feedback,
                               picard_config(sweeps, subintervals, grid),
                               input_set);
}

PredictorScheme ScalarBenchmark::no_prediction_scheme() const {
  return no_predictor_scheme(model, feedback, delay);
}

ScalarBenchmark scalar_benchmark(double kappa, double r,
                                 const std::string& f_name) {
  if (f_name == "sin") {
    return make_scalar(
        kappa, r, [](double x) { return std::sin(x); },
        [](double x) { return std::cos(x); }, "sin");
  }
  if (f_name == "tanh") {
    return make_scalar(
        kappa, r, [](double x) { return std::tanh(x); },
        [](double x) {
          const double th = std::tanh(x);
          return 1.0 - th * th;
        },
        "tanh");
  }
  throw ScenarioRefused{"unknown built-in field '" + f_name +
                        "' (supported: sin, tanh)"};
}

ScalarBenchmark scalar_benchmark(double kappa, double r,
                                 std::function<double(double)> f,
                                 std::function<double(double)> fprime,
                                 const std::string& label) {
  return make_scalar(kappa, r, std::move(f), std::move(fprime), label);
}

std::vector<Certificate> scalar_certificates(const ScalarBenchmark& bundle,
                                             int sweeps, int subintervals,
                                             double mu) {
  const double kappa = bundle.kappa;
  const double r = bundle.delay;
  const double gamma = 1.0 / kappa;
  const double R = 1.0 + kappa;

  std::vector<Certificate> out;

  Certificate raz = check_scalar_razumikhin(kappa, r);
  attach_max_delay(raz, [&] { return max_delay_scalar_razumikhin(kappa); });
  out.push_back(std::move(raz));

  Certificate nop = check_no_predictor(gamma, R, 1.0, 1.0, r);
  attach_max_delay(nop,
                   [&] { return max_delay_no_predictor(gamma, R, 1.0, 1.0); });
  out.push_back(std::move(nop));

  if (subintervals == 1 && r < 1.0) {
    Certificate c = check_scalar_q1(kappa, sweeps, r);
    attach_max_delay(c, [&] { return max_delay_scalar_q1(kappa, sweeps); });
    out.push_back(std::move(c));
  }
  if (subintervals == 2 && r < 2.0) {
    Certificate c = check_scalar_q2(kappa, sweeps, r);
    attach_max_delay(c, [&] { return max_delay_scalar_q2(kappa, sweeps); });
    out.push_back(std::move(c));
  }
  if (sweeps == 2 && subintervals == 2 && r < 2.0) {
    Certificate c = check_scalar_state_predictor(kappa, mu, r);
    attach_max_delay(
        c, [&] { return max_delay_scalar_state_predictor(kappa, mu); });
    out.push_back(std::move(c));
  }

  const double q = static_cast<double>(subintervals);
  if (r / q < 1.0) {
    const PicardConfig cfg = bundle.picard_config(sweeps, subintervals);
    const double K = chain_constant(cfg);
    const auto cert_fixed_point = [&](double rr) {
      const PicardConfig c(sweeps, subintervals, rr, 1.0);
      return check_picard_small_gain(gamma, R, chain_constant(c), 1.0,
                                     rr / q, sweeps);
    };
    Certificate c25 =
        check_picard_small_gain(gamma, R, K, 1.0, r / q, sweeps);
    attach_max_delay(c25, [&] {
      return solve_max_delay(cert_fixed_point, 1e-9, q * (1.0 - 1e-9));
    });
    out.push_back(std::move(c25));

    const auto cert_fixed_point_mu = [&](double rr) {
      const PicardConfig c(sweeps, subintervals, rr, 1.0);
      return check_picard_small_gain_mu(gamma, R, chain_constant(c), 1.0,
                                        rr / q, sweeps, mu);
    };
    Certificate c27 =
        check_picard_small_gain_mu(gamma, R, K, 1.0, r / q, sweeps, mu);
    attach_max_delay(c27, [&] {
      return solve_max_delay(cert_fixed_point_mu, 1e-9, q * (1.0 - 1e-9));
    });
    out.push_back(std::move(c27));
  }
  return out;
}

// ===========================================================================
// Additive structure
// ===========================================================================

namespace {

void check_additive_args(const AdditiveBundle& bundle, const Vec& x,
                         const SampledSignal& u) {
  if (x.size() != bundle.model.state_dim) {
    throw ContractViolation{"additive map: state dimension mismatch"};
  }
  if (u.dim() != bundle.model.input_dim) {
    throw ContractViolation{"additive map: input dimension mismatch"};
  }
}

}  // namespace

Vec AdditiveBundle::one_sweep(const Vec& x, const SampledSignal& u) const {
  check_additive_args(*this, x, u);
  const auto prefix = input_integral_prefix(b, u);
  const double T = u.t_end() - u.t_start();
  return x + T * a(x) + prefix.back();
}

Vec AdditiveBundle::two_sweep(const Vec& x, const SampledSignal& u) const {
  check_additive_args(*this, x, u);
  const auto prefix = input_integral_prefix(b, u);
  const int n = u.intervals();
  const double dt = u.dt();
  const Vec ax = a(x);
  Vec sum = Vec::Zero(x.size());
  for (int j = 0; j <= n; ++j) {
    const double weight = (j == 0 || j == n) ? 0.5 : 1.0;
    sum += weight * a(x + (j * dt) * ax + prefix[static_cast<std::size_t>(j)]);
  }
  return x + dt * sum + prefix.back();
}

Vec AdditiveBundle::composed_12(const Vec& x, const SampledSignal& u) const {
  check_additive_args(*this, x, u);
  const int n = checked_even_intervals(u);
  const auto prefix = input_integral_prefix(b, u);
  const double half = 0.5 * (u.t_end() - u.t_start());
  const Vec ax = a(x);
  const Vec mid_state =
      x + half * ax + prefix[static_cast<std::size_t>(n / 2)];
  return x + half * ax + prefix.back() + half * a(mid_state);
}

Vec AdditiveBundle::composed_22(const Vec& x, const SampledSignal& u) const {
  check_additive_args(*this, x, u);
  const int n = checked_even_intervals(u);
  const int nh = n / 2;
  const double dt = u.dt();
  const auto prefix = input_integral_prefix(b, u);
  const Vec& mid_integral = prefix[static_cast<std::size_t>(nh)];

  const Vec ax = a(x);
  Vec sum1 = Vec::Zero(x.size());
  for (int j = 0; j <= nh; ++j) {
    const double weight = (j == 0 || j == nh) ? 0.5 : 1.0;
    sum1 +=
        weight * a(x + (j * dt) * ax + prefix[static_cast<std::size_t>(j)]);
  }
  const Vec x1 = x + dt * sum1 + mid_integral;

  const Vec ax1 = a(x1);
  Vec sum2 = Vec::Zero(x.size());
  for (int j = 0; j <= nh; ++j) {
    const double weight = (j == 0 || j == nh) ? 0.5 : 1.0;
    sum2 += weight * a(x1 + (j * dt) * ax1 +
                       (prefix[static_cast<std::size_t>(nh + j)] -
                        mid_integral));
  }
  return x1 + dt * sum2 + (prefix.back() - mid_integral);
}

double AdditiveBundle::two_sweep_error_bound(double T, double x_norm,
                                             double u_sup) const {
  const double LT = lipschitz * T;
  if (LT >= 1.0) {
    throw ContractionViolated{"two-sweep error bound requires L*T < 1"};
  }
  return LT * LT * LT / (1.0 - LT) * (x_norm + u_sup);
}

AdditiveBundle additive_bundle(int state_dim, int input_dim,
                               std::function<Vec(const Vec&)> a,
                               std::function<Vec(const Vec&)> b, double L,
                               unsigned check_seed) {
  if (state_dim < 1 || input_dim < 1) {
    throw ContractViolation{"additive bundle needs positive dimensions"};
  }
  if (!(L > 0.0)) {
    throw ContractViolation{"additive bundle needs a positive constant L"};
  }
  if (!a || !b) {
    throw ContractViolation{"additive bundle needs both a(.) and b(.)"};
  }

  AdditiveBundle bundle;
  bundle.a = std::move(a);
  bundle.b = std::move(b);
  bundle.lipschitz = L;
  bundle.model.state_dim = state_dim;
  bundle.model.input_dim = input_dim;
  const auto a_fn = bundle.a;
  const auto b_fn = bundle.b;
  bundle.model.f = [a_fn, b_fn](const Vec& x, const Vec& u) {
    return Vec(a_fn(x) + b_fn(u));
  };
  bundle.model.lipschitz = L;
  bundle.model.growth = L;
  bundle.model.growth_state = L;
  bundle.model.growth_input = L;

  if (bundle.a(Vec::Zero(state_dim)).norm() > 1e-12) {
    throw ScenarioRefused{"additive structure needs a(0) = 0"};
  }
  if (bundle.b(Vec::Zero(input_dim)).norm() > 1e-12) {
    throw ScenarioRefused{"additive structure needs b(0) = 0"};
  }
  double worst = 0.0;
  if (!verify_declared_bounds(bundle.model, 5.0, check_seed, 500, &worst)) {
    std::ostringstream msg;
    msg << "declared additive constants fail the spot check (worst ratio "
        << worst << ")";
    throw ScenarioRefused{msg.str()};
  }
  return bundle;
}

// ===========================================================================
// Linear plant with exact predictor
// ===========================================================================

LinearSmithBundle linear_smith(const Mat& A, const Mat& B, const Mat& gain,
                               double r) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (A.cols() != n || B.rows() != n || gain.rows() != m || gain.cols() != n) {
    throw ContractViolation{"linear bundle: inconsistent matrix dimensions"};
  }
  if (!(r > 0.0)) {
    throw ContractViolation{"linear bundle needs a positive delay"};
  }

  LinearSmithBundle bundle;
  bundle.A = A;
  bundle.B = B;
  bundle.gain = gain;
  bundle.delay = r;
  bundle.model.state_dim = n;
  bundle.model.input_dim = m;
  bundle.model.f = [A, B](const Vec& x, const Vec& u) {
    return Vec(A * x + B * u);
  };
  const double na = spectral_norm(A);
  const double nb = spectral_norm(B);
  bundle.model.lipschitz = na;
  bundle.model.growth = std::max(na, nb);
  bundle.model.growth_state = na;
  bundle.model.growth_input = nb;
  bundle.feedback = FeedbackLaw::linear_gain(gain);
  bundle.input_set = InputSet::full(m);
  bundle.scheme = smith_scheme(A, B, gain, r);
  return bundle;
}

SimulationResult simulate_explicit_linear_law(const LinearSmithBundle& bundle,
                                              const LoopOptions& opt,
                                              const Vec& x0,
                                              const HistorySegment& u0) {
  const int n = bundle.model.state_dim;
  const int m = bundle.model.input_dim;
  if (x0.size() != n || u0.dim() != m) {
    throw ContractViolation{"explicit linear law: dimension mismatch"};
  }
  if (std::abs(bundle.delay - opt.delay) > 1e-9 * (1.0 + opt.delay)) {
    throw ConfigError{"loop delay differs from the bundle delay"};
  }
  if (std::abs(u0.horizon() - opt.delay) > 1e-9 * (1.0 + opt.delay)) {
    throw ContractViolation{"history horizon differs from the delay"};
  }
  const double h = opt.step;
  const double r = opt.delay;
  const long n_ring = std::lround(r / h);
  if (!(h > 0.0) || n_ring < 1 ||
      std::abs(n_ring * h - r) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << "closed-loop step " << h << " does not divide the delay " << r;
    throw ConfigError{msg.str()};
  }
  const long steps = std::lround(opt.horizon / h);
  if (steps < 1 ||
      std::abs(steps * h - opt.horizon) > 1e-9 * std::max(1.0, opt.horizon)) {
    std::ostringstream msg;
    msg << "closed-loop step " << h << " does not divide the horizon "
        << opt.horizon;
    throw ConfigError{msg.str()};
  }

  const Mat a_shift = bundle.A + opt.mu * Mat::Identity(n, n);
  const Mat state_matrix = bundle.gain * expm(Mat(bundle.A * r)) * a_shift;
  const Mat input_matrix = bundle.gain * bundle.B - opt.mu * Mat::Identity(m, m);
  std::vector<Mat> kernel(static_cast<std::size_t>(n_ring) + 1);
  for (long j = 0; j <= n_ring; ++j) {
    kernel[static_cast<std::size_t>(j)] =
        bundle.gain * a_shift * expm(Mat(bundle.A * (r - j * h))) * bundle.B;
  }

  std::deque<Vec> ring;
  for (long j = 0; j <= n_ring; ++j) {
    ring.push_back(u0.value(-r + j * h));
  }

  const auto ring_at = [&](long j, double c) -> Vec {
    if (c <= 0.0) return ring[static_cast<std::size_t>(j)];
    if (c >= 1.0) return ring[static_cast<std::size_t>(j) + 1];
    return (1.0 - c) * ring[static_cast<std::size_t>(j)] +
           c * ring[static_cast<std::size_t>(j) + 1];
  };

  const auto stage = [&](double c, const Vec& xs, const Vec& us) {
    Vec dx = bundle.A * xs + bundle.B * ring_at(0, c);
    Vec conv = 0.5 * (kernel[0] * ring_at(0, c));
    for (long j = 1; j < n_ring; ++j) {
      conv += kernel[static_cast<std::size_t>(j)] * ring_at(j, c);
    }
    conv += 0.5 * (kernel[static_cast<std::size_t>(n_ring)] * us);
    Vec du = state_matrix * xs + h * conv + input_matrix * us;
    return std::make_pair(std::move(dx), std::move(du));
  };

  const auto state_ok = [](const Vec& v) {
    return v.allFinite() && v.norm() <= kDivergenceCutoff;
  };

  SimulationResult result;
  result.initial_scale = x0.norm() + u0.sup_norm();
  Vec x = x0;
  Vec u = u0.head();

  const auto record = [&](double t) {
    result.traj.t.push_back(t);
    result.traj.x.push_back(x);
    result.traj.u.push_back(ring.back());
    result.traj.w.push_back(u);
  };
  record(0.0);

  for (long k = 0; k < steps; ++k) {
    const double t = k * h;
    const auto [dx1, du1] = stage(0.0, x, u);
    const auto [dx2, du2] =
        stage(0.5, Vec(x + 0.5 * h * dx1), Vec(u + 0.5 * h * du1));
    const auto [dx3, du3] =
        stage(0.5, Vec(x + 0.5 * h * dx2), Vec(u + 0.5 * h * du2));
    const auto [dx4, du4] = stage(1.0, Vec(x + h * dx3), Vec(u + h * du3));
    x += (h / 6.0) * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4);
    u += (h / 6.0) * (du1 + 2.0 * du2 + 2.0 * du3 + du4);
    if (!state_ok(x) || !state_ok(u)) {
      result.diverged = true;
      result.blowup_time = t + h;
      break;
    }
    ring.pop_front();
    ring.push_back(u);
    record(t + h);
  }
  return result;
}

std::vector<Certificate> linear_certificates(const LinearSmithBundle& bundle,
                                             double mu) {
  const double gamma = bundle.iss ? bundle.iss->gamma : 0.0;
  const double R = bundle.feedback.bound;
  return {check_small_gain(gamma, R, 0.0, 0.0),
          check_small_gain_mu(gamma, R, 0.0, 0.0, mu)};
}

// ===========================================================================
// Triangular chain
// ===========================================================================

PicardConfig TriangularBundle::picard_config(int sweeps, int subintervals,
                                             int grid) const {
  return config_for(model, sweeps, subintervals, delay, grid);
}

PredictorScheme TriangularBundle::generic_scheme(int sweeps, int subintervals,
                                                 int grid) const {
  return make_picard_predictor(model, feedback,
                               picard_config(sweeps, subintervals, grid),
                               input_set);
}

TriangularBundle triangular_chain(
    std::vector<std::function<double(const Vec&)>> links, double link_bound,
    const Mat& gain, double r, std::optional<ISSConstants> iss,
    unsigned check_seed) {
  const int n = static_cast<int>(links.size());
  if (n < 1) {
    throw ContractViolation{"triangular chain needs at least one link"};
  }
  for (const auto& link : links) {
    if (!link) {
      throw ContractViolation{"triangular chain: missing link function"};
    }
  }
  if (!(link_bound >= 0.0)) {
    throw ContractViolation{"triangular chain: link bound must be >= 0"};
  }
  if (gain.rows() != 1 || gain.cols() != n) {
    throw ContractViolation{"triangular chain: gain must be 1 x n"};
  }
  if (!(r > 0.0)) {
    throw ContractViolation{"triangular chain needs a positive delay"};
  }

  TriangularBundle bundle;
  bundle.dim = n;
  bundle.delay = r;
  bundle.link_bound = link_bound;
  bundle.iss = std::move(iss);

  // Row i is link_i(x_1..x_{i+1}) plus the next coordinate (or the input),
  // so each row is (link_bound + 1)-Lipschitz except the last.
  const double combined = std::sqrt((n - 1) * (link_bound + 1.0) *
                                        (link_bound + 1.0) +
                                    link_bound * link_bound);
  bundle.model.state_dim = n;
  bundle.model.input_dim = 1;
  bundle.model.f = [links, n](const Vec& x, const Vec& u) {
    Vec dx(n);
    for (int i = 0; i < n; ++i) {
      dx(i) = links[static_cast<std::size_t>(i)](x.head(i + 1)) +
              (i + 1 < n ? x(i + 1) : u(0));
    }
    return dx;
  };
  bundle.model.lipschitz = combined;
  bundle.model.growth = std::max(combined, 1.0);
  bundle.model.growth_state = combined;
  bundle.model.growth_input = 1.0;

  if (evaluate_field(bundle.model, Vec::Zero(n), Vec::Zero(1)).norm() >
      1e-12) {
    throw ScenarioRefused{"triangular chain: links must vanish at 0"};
  }
  double worst = 0.0;
  if (!verify_declared_bounds(bundle.model, 5.0, check_seed, 500, &worst)) {
    std::ostringstream msg;
    msg << "declared chain constants fail the spot check (worst ratio "
        << worst << ")";
    throw ScenarioRefused{msg.str()};
  }

  bundle.feedback = FeedbackLaw::linear_gain(gain);
  bundle.input_set = InputSet::full(1);
  return bundle;
}

std::vector<Certificate> triangular_certificates(const TriangularBundle& bundle,
                                                 int sweeps, int subintervals,
                                                 double mu) {
  if (!bundle.iss) {
    return {};
  }
  const double gamma = bundle.iss->gamma;
  const double R = bundle.feedback.bound;
  const double r = bundle.delay;
  const double q = static_cast<double>(subintervals);

  std::vector<Certificate> out;

  const double L1 = bundle.model.growth_state.value();
  const double L2 = bundle.model.growth_input.value();
  if (L1 > 0.0) {
    Certificate nop = check_no_predictor(gamma, R, L1, L2, r);
    attach_max_delay(nop,
                     [&] { return max_delay_no_predictor(gamma, R, L1, L2); });
    out.push_back(std::move(nop));
  }

  const PicardConfig cfg = bundle.picard_config(sweeps, subintervals);
  if (cfg.contraction_ok()) {
    const double L = cfg.lipschitz;
    const double K = chain_constant(cfg);
    const double r_hi = (q / L) * (1.0 - 1e-9);

    Certificate c25 =
        check_picard_small_gain(gamma, R, K, L, r / q, sweeps);
    attach_max_delay(c25, [&] {
      return solve_max_delay(
          [&](double rr) {
            const PicardConfig c(sweeps, subintervals, rr, L);
            return check_picard_small_gain(gamma, R, chain_constant(c), L,
                                           rr / q, sweeps);
          },
          1e-9 * r_hi, r_hi);
    });
    out.push_back(std::move(c25));

    Certificate c27 =
        check_picard_small_gain_mu(gamma, R, K, L, r / q, sweeps, mu);
    attach_max_delay(c27, [&] {
      return solve_max_delay(
          [&](double rr) {
            const PicardConfig c(sweeps, subintervals, rr, L);
            return check_picard_small_gain_mu(gamma, R, chain_constant(c), L,
                                              rr / q, sweeps, mu);
          },
          1e-9 * r_hi, r_hi);
    });
    out.push_back(std::move(c27));
  }
  return out;
}

}  // namespace delayctl
