#include "delayctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "delayctl/rk4.hpp"

namespace delayctl {

namespace {

// Shared roundoff slack for domain checks on a time axis.
double axis_slack(double a, double b) {
  return 1e-9 * (1.0 + std::abs(a) + std::abs(b));
}

// Linear interpolation into a column-per-node sample matrix.
// pos is the fractional node index, already range-checked.
Vec interp_columns(const Mat& samples, double pos) {
  const int last = static_cast<int>(samples.cols()) - 1;
  if (pos <= 0.0) return samples.col(0);
  if (pos >= static_cast<double>(last)) return samples.col(last);
  const int i = static_cast<int>(pos);
  const double frac = pos - i;
  return (1.0 - frac) * samples.col(i) + frac * samples.col(i + 1);
}

double max_column_norm(const Mat& samples) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    best = std::max(best, samples.col(j).norm());
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// SystemModel
// ---------------------------------------------------------------------------

Vec evaluate_field(const SystemModel& model, const Vec& x, const Vec& u) {
  if (!model.f) throw ContractViolation{"SystemModel has no field"};
  if (x.size() != model.state_dim || u.size() != model.input_dim) {
    std::ostringstream msg;
    msg << "field argument dimensions (" << x.size() << ", " << u.size()
        << ") do not match model (" << model.state_dim << ", "
        << model.input_dim << ")";
    throw ContractViolation{msg.str()};
  }
  Vec out = model.f(x, u);
  if (out.size() != model.state_dim) {
    throw ContractViolation{"field returned wrong dimension"};
  }
  return out;
}

bool verify_declared_bounds(const SystemModel& model, double box,
                            unsigned seed, int pairs, double* worst) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-box, box);
  auto draw = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = unif(rng);
    return v;
  };

  double worst_ratio = 0.0;
  const double tol = 1.0 + 1e-9;
  bool ok = true;
  for (int p = 0; p < pairs; ++p) {
    const Vec x = draw(model.state_dim);
    const Vec y = draw(model.state_dim);
    const Vec u = draw(model.input_dim);
    const Vec fx = evaluate_field(model, x, u);
    if (model.lipschitz) {
      const Vec fy = evaluate_field(model, y, u);
      const double dx = (x - y).norm();
      if (dx > 0.0) {
        const double ratio = (fx - fy).norm() / (*model.lipschitz * dx);
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio > tol) ok = false;
      }
    }
    if (model.growth) {
      const double cap = *model.growth * (x.norm() + u.norm());
      if (fx.norm() > cap * tol + 1e-12) {
        worst_ratio = std::max(worst_ratio, fx.norm() / std::max(cap, 1e-300));
        ok = false;
      }
    }
    if (model.growth_state && model.growth_input) {
      const double cap =
          *model.growth_state * x.norm() + *model.growth_input * u.norm();
      if (fx.norm() > cap * tol + 1e-12) {
        worst_ratio = std::max(worst_ratio, fx.norm() / std::max(cap, 1e-300));
        ok = false;
      }
    }
  }
  if (worst) *worst = worst_ratio;
  return ok;
}

// ---------------------------------------------------------------------------
// SampledSignal
// ---------------------------------------------------------------------------

SampledSignal::SampledSignal(double t_start, double dt, Mat samples)
    : t_start_(t_start), dt_(dt), samples_(std::move(samples)) {
  if (!(dt_ > 0.0)) throw ContractViolation{"signal grid step must be > 0"};
  if (samples_.cols() < 2) {
    throw ContractViolation{"signal needs at least two sample nodes"};
  }
  if (samples_.rows() < 1) throw ContractViolation{"signal dimension empty"};
}

SampledSignal SampledSignal::constant(double t_start, double t_end,
                                      int intervals, const Vec& value) {
  if (intervals < 1) throw ContractViolation{"intervals must be >= 1"};
  if (!(t_end > t_start)) throw ContractViolation{"empty signal domain"};
  Mat samples(value.size(), intervals + 1);
  samples.colwise() = value;
  return SampledSignal(t_start, (t_end - t_start) / intervals,
                       std::move(samples));
}

SampledSignal SampledSignal::from_function(
    double t_start, double t_end, int intervals,
    const std::function<Vec(double)>& fn) {
  if (intervals < 1) throw ContractViolation{"intervals must be >= 1"};
  if (!(t_end > t_start)) throw ContractViolation{"empty signal domain"};
  const double dt = (t_end - t_start) / intervals;
  Vec first = fn(t_start);
  Mat samples(first.size(), intervals + 1);
  samples.col(0) = first;
  for (int j = 1; j <= intervals; ++j) samples.col(j) = fn(t_start + j * dt);
  return SampledSignal(t_start, dt, std::move(samples));
}

Vec SampledSignal::value(double t) const {
  const double slack = axis_slack(t_start(), t_end());
  if (t < t_start() - slack || t > t_end() + slack) {
    std::ostringstream msg;
    msg << "signal read at t=" << t << " outside domain [" << t_start() << ", "
        << t_end() << "]";
    throw SignalDomainError{msg.str()};
  }
  return interp_columns(samples_, (t - t_start_) / dt_);
}

double SampledSignal::sup_norm() const { return max_column_norm(samples_); }

SampledSignal shift(const SampledSignal& s, double theta) {
  return SampledSignal(s.t_start() - theta, s.dt(), s.samples());
}

// ---------------------------------------------------------------------------
// HistorySegment
// ---------------------------------------------------------------------------

HistorySegment::HistorySegment(double r, Mat samples)
    : r_(r), samples_(std::move(samples)) {
  if (!(r_ > 0.0)) throw ContractViolation{"history horizon must be > 0"};
  if (samples_.cols() < 2) {
    throw ContractViolation{"history needs at least two sample nodes"};
  }
  if (samples_.rows() < 1) throw ContractViolation{"history dimension empty"};
}

HistorySegment HistorySegment::constant(double r, int intervals,
                                        const Vec& value) {
  if (intervals < 1) throw ContractViolation{"intervals must be >= 1"};
  Mat samples(value.size(), intervals + 1);
  samples.colwise() = value;
  return HistorySegment(r, std::move(samples));
}

HistorySegment HistorySegment::zero(double r, int intervals, int dim) {
  return constant(r, intervals, Vec::Zero(dim));
}

HistorySegment HistorySegment::from_function(
    double r, int intervals, const std::function<Vec(double)>& fn) {
  if (intervals < 1) throw ContractViolation{"intervals must be >= 1"};
  const double h = r / intervals;
  Vec first = fn(-r);
  Mat samples(first.size(), intervals + 1);
  samples.col(0) = first;
  for (int j = 1; j <= intervals; ++j) samples.col(j) = fn(-r + j * h);
  return HistorySegment(r, std::move(samples));
}

Vec HistorySegment::value(double theta) const {
  const double slack = axis_slack(-r_, 0.0);
  if (theta < -r_ - slack || theta > slack) {
    std::ostringstream msg;
    msg << "history read at theta=" << theta << " outside [-" << r_ << ", 0]";
    throw SignalDomainError{msg.str()};
  }
  return interp_columns(samples_, (theta + r_) / dt());
}

double HistorySegment::sup_norm() const { return max_column_norm(samples_); }

SampledSignal HistorySegment::as_signal(double t_start) const {
  return SampledSignal(t_start, dt(), samples_);
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

double Trajectory::norm_at(std::size_t i) const {
  double n = x.at(i).norm();
  if (!w.empty()) n += w.at(i).norm();
  return n;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

namespace {

long checked_step_count(double T, double h, const char* what) {
  if (!(h > 0.0)) throw ContractViolation{"step must be > 0"};
  if (!(T > 0.0)) throw ContractViolation{"horizon must be > 0"};
  const long n = std::lround(T / h);
  if (n < 1 || std::abs(n * h - T) > 1e-9 * std::max(1.0, T)) {
    std::ostringstream msg;
    msg << what << ": step " << h << " does not divide horizon " << T;
    throw ContractViolation{msg.str()};
  }
  return n;
}

void check_state(const Vec& x, double t) {
  if (!x.allFinite() || x.norm() > kDivergenceCutoff) {
    std::ostringstream msg;
    msg << "state diverged at t=" << t;
    throw DivergenceError{msg.str(), t};
  }
}

}  // namespace

Trajectory solve_ivp(const SystemModel& model, const Vec& x0,
                     const SampledSignal& u, double T, double h) {
  const long steps = checked_step_count(T, h, "solve_ivp");
  if (x0.size() != model.state_dim) {
    throw ContractViolation{"solve_ivp: x0 dimension mismatch"};
  }
  const double slack = axis_slack(0.0, T);
  if (u.t_start() > slack || u.t_end() < T - slack) {
    throw SignalDomainError{"solve_ivp: input does not cover [0, T]"};
  }

  auto rhs = [&](double t, const Vec& x) {
    return model.f(x, u.value(t));
  };

  Trajectory traj;
  traj.t.reserve(steps + 1);
  traj.x.reserve(steps + 1);
  traj.u.reserve(steps + 1);

  Vec x = x0;
  traj.t.push_back(0.0);
  traj.x.push_back(x);
  traj.u.push_back(u.value(0.0));
  check_state(x, 0.0);
  for (long k = 0; k < steps; ++k) {
    const double t = k * h;
    x = rk4_step(rhs, t, x, h);
    const double t_next = (k + 1) * h;
    check_state(x, t_next);
    traj.t.push_back(t_next);
    traj.x.push_back(x);
    traj.u.push_back(u.value(std::min(t_next, u.t_end())));
  }
  return traj;
}

Vec flow(const SystemModel& model, const Vec& x0, const SampledSignal& u,
         double T, double h) {
  return solve_ivp(model, x0, u, T, h).x.back();
}

double growth_bound(const SystemModel& model, const Vec& x0, double u_sup,
                    double t) {
  double L = 0.0;
  if (model.growth) {
    L = *model.growth;
  } else if (model.growth_state && model.growth_input) {
    L = *model.growth_state + *model.growth_input;
  } else {
    throw MissingHypothesis{
        "growth_bound needs growth (or growth_state + growth_input)"};
  }
  return std::exp(L * t) * (x0.norm() + u_sup);
}

double semigroup_residual(const SystemModel& model, const Vec& x0,
                          const SampledSignal& u, double t, double tau,
                          double h) {
  const Vec direct = flow(model, x0, u, t + tau, h);
  const Vec mid = flow(model, x0, u, tau, h);
  const Vec relayed = flow(model, mid, shift(u, tau), t, h);
  return (direct - relayed).norm();
}

}  // namespace delayctl
