#include "delayctl/closedloop.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace delayctl {

namespace {

long checked_ring_size(double r, double h) {
  const long n = std::lround(r / h);
  if (!(h > 0.0) || n < 1 || std::abs(n * h - r) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << "closed-loop step " << h << " does not divide the delay " << r;
    throw ConfigError{msg.str()};
  }
  return n;
}

long checked_total_steps(double T, double h) {
  const long n = std::lround(T / h);
  if (n < 1 || std::abs(n * h - T) > 1e-9 * std::max(1.0, T)) {
    std::ostringstream msg;
    msg << "closed-loop step " << h << " does not divide the horizon " << T;
    throw ConfigError{msg.str()};
  }
  return n;
}

/// Sliding input record over the last delay horizon, aligned with the
/// integration grid: node j holds u(t - r + j*h).  Stage evaluations at
/// t + c*h read interpolated shifts plus a provisional head supplied by the
/// stage itself, so the plant never consumes input newer than t - r + c*h.
class InputRing {
 public:
  InputRing(double r, double h, long n, int dim)
      : r_(r), h_(h), n_(n), dim_(dim) {}

  void seed(const std::function<Vec(double)>& initial) {
    ring_.clear();
    for (long j = 0; j <= n_; ++j) ring_.push_back(initial(-r_ + j * h_));
  }

  void push(Vec next) {
    ring_.pop_front();
    ring_.push_back(std::move(next));
  }

  const Vec& newest() const { return ring_.back(); }

  /// u(t + c*h - r), linear between ring nodes 0 and 1.
  Vec delayed(double c) const {
    if (c <= 0.0) return ring_[0];
    if (c >= 1.0) return ring_[1];
    return (1.0 - c) * ring_[0] + c * ring_[1];
  }

  /// Past segment seen from the stage time t + c*h with the stage's own
  /// provisional head value.
  HistorySegment stage_segment(double c, const Vec& head) const {
    Mat samples(dim_, n_ + 1);
    if (c <= 0.0) {
      for (long j = 0; j < n_; ++j) samples.col(j) = ring_[j];
    } else if (c >= 1.0) {
      for (long j = 0; j < n_; ++j) samples.col(j) = ring_[j + 1];
    } else {
      for (long j = 0; j < n_; ++j) {
        samples.col(j) = (1.0 - c) * ring_[j] + c * ring_[j + 1];
      }
    }
    samples.col(n_) = head;
    return HistorySegment(r_, std::move(samples));
  }

 private:
  double r_, h_;
  long n_;
  int dim_;
  std::deque<Vec> ring_;
};

bool state_ok(const Vec& x) {
  return x.allFinite() && x.norm() <= kDivergenceCutoff;
}

void check_initial(const SystemModel& model, const Vec& x0,
                   const HistorySegment& w0, double r) {
  if (x0.size() != model.state_dim) {
    throw ContractViolation{"closed loop: x0 dimension mismatch"};
  }
  if (w0.dim() != model.input_dim) {
    throw ContractViolation{"closed loop: history dimension mismatch"};
  }
  if (std::abs(w0.horizon() - r) > 1e-9 * (1.0 + r)) {
    throw ContractViolation{"closed loop: history horizon differs from delay"};
  }
}

/// Shared integration driver.  `stage` maps
/// (c, plant state, controller state, ring) to the pair of derivatives;
/// `seed` produces the initial input history; `output` maps the post-step
/// states to the input appended to the ring.
template <class Stage, class Seed, class Output>
SimulationResult run_loop(const SystemModel& model, const LoopOptions& opt,
                          const Vec& x0, const HistorySegment& w0,
                          int ctrl_dim, const Vec& ctrl0, Stage&& stage,
                          Seed&& seed, Output&& output, bool record_ctrl) {
  const long n_ring = checked_ring_size(opt.delay, opt.step);
  const long steps = checked_total_steps(opt.horizon, opt.step);
  const double h = opt.step;

  InputRing ring(opt.delay, h, n_ring, model.input_dim);
  ring.seed(seed);

  SimulationResult result;
  result.initial_scale = x0.norm() + w0.sup_norm();

  Vec x = x0;
  Vec w = ctrl0;

  auto record = [&](double t) {
    result.traj.t.push_back(t);
    result.traj.x.push_back(x);
    result.traj.u.push_back(ring.newest());
    if (record_ctrl) result.traj.w.push_back(w);
  };
  record(0.0);

  for (long k = 0; k < steps; ++k) {
    const double t = k * h;
    const auto [dx1, dw1] = stage(0.0, x, w, ring);
    const auto [dx2, dw2] =
        stage(0.5, Vec(x + 0.5 * h * dx1), Vec(w + 0.5 * h * dw1), ring);
    const auto [dx3, dw3] =
        stage(0.5, Vec(x + 0.5 * h * dx2), Vec(w + 0.5 * h * dw2), ring);
    const auto [dx4, dw4] =
        stage(1.0, Vec(x + h * dx3), Vec(w + h * dw3), ring);
    x += (h / 6.0) * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4);
    if (ctrl_dim > 0) w += (h / 6.0) * (dw1 + 2.0 * dw2 + 2.0 * dw3 + dw4);

    if (!state_ok(x) || (ctrl_dim > 0 && !state_ok(w))) {
      result.diverged = true;
      result.blowup_time = t + h;
      break;
    }
    ring.push(output(x, w));
    record(t + h);
  }
  return result;
}

}  // namespace

SimulationResult simulate_dynamic_feedback(const SystemModel& model,
                                           const InputSet& input_set,
                                           const PredictorScheme& scheme,
                                           const LoopOptions& opt,
                                           const Vec& x0,
                                           const HistorySegment& w0) {
  check_initial(model, x0, w0, opt.delay);
  if (!scheme.has_g()) {
    throw UnsupportedScheme{
        "dynamic feedback needs a scheme with a derivative evaluator g"};
  }

  auto stage = [&](double c, const Vec& xs, const Vec& ws,
                   const InputRing& ring) {
    const Vec u_now = input_set.project(ws);
    const HistorySegment seg = ring.stage_segment(c, u_now);
    Vec dx = evaluate_field(model, xs, ring.delayed(c));
    Vec dw = scheme.g(xs, seg) - opt.mu * (ws - scheme.p(xs, seg));
    return std::make_pair(std::move(dx), std::move(dw));
  };
  auto seed = [&](double theta) { return input_set.project(w0.value(theta)); };
  auto output = [&](const Vec&, const Vec& w) { return input_set.project(w); };

  return run_loop(model, opt, x0, w0, model.input_dim, w0.head(), stage, seed,
                  output, /*record_ctrl=*/true);
}

SimulationResult simulate_state_predictor_feedback(const SystemModel& model,
                                                   const FeedbackLaw& fb,
                                                   const PicardConfig& cfg,
                                                   const LoopOptions& opt,
                                                   const Vec& x0,
                                                   const HistorySegment& u0) {
  check_initial(model, x0, u0, opt.delay);
  if (!fb.linear) {
    throw UnsupportedScheme{"direct input law needs a linear feedback"};
  }
  if (std::abs(cfg.delay - opt.delay) > 1e-9 * (1.0 + opt.delay)) {
    throw ConfigError{"predictor horizon differs from the loop delay"};
  }

  auto stage = [&](double c, const Vec& xs, const Vec& us,
                   const InputRing& ring) {
    const HistorySegment seg = ring.stage_segment(c, us);
    const Vec predicted = predict_state(model, cfg, xs, seg);
    Vec dx = evaluate_field(model, xs, ring.delayed(c));
    Vec du = fb.gain * evaluate_field(model, predicted, us) -
             opt.mu * (us - fb.gain * predicted);
    return std::make_pair(std::move(dx), std::move(du));
  };
  auto seed = [&](double theta) { return u0.value(theta); };
  auto output = [](const Vec&, const Vec& u) { return u; };

  return run_loop(model, opt, x0, u0, model.input_dim, u0.head(), stage, seed,
                  output, /*record_ctrl=*/true);
}

SimulationResult simulate_static_feedback(const SystemModel& model,
                                          const InputSet& input_set,
                                          const FeedbackLaw& fb,
                                          const LoopOptions& opt,
                                          const Vec& x0,
                                          const HistorySegment& w0) {
  check_initial(model, x0, w0, opt.delay);

  auto stage = [&](double c, const Vec& xs, const Vec&, const InputRing& ring) {
    Vec dx = evaluate_field(model, xs, ring.delayed(c));
    return std::make_pair(std::move(dx), Vec());
  };
  auto seed = [&](double theta) { return input_set.project(w0.value(theta)); };
  auto output = [&](const Vec& x, const Vec&) {
    return input_set.project(fb.k(x));
  };

  return run_loop(model, opt, x0, w0, /*ctrl_dim=*/0, Vec(), stage, seed,
                  output, /*record_ctrl=*/false);
}

DecayFit estimate_decay(const Trajectory& traj, double transient_skip,
                        double initial_scale) {
  if (traj.size() < 2) throw FitError{"estimate_decay: empty trajectory"};
  const std::size_t total = traj.size();
  std::size_t begin =
      static_cast<std::size_t>(std::ceil(transient_skip * (total - 1)));
  begin = std::min(begin, total - 1);
  if (total - begin < 10) {
    throw FitError{"estimate_decay: fit window has fewer than 10 samples"};
  }

  DecayFit fit;
  fit.window_begin = begin;
  fit.scale = initial_scale > 0.0 ? initial_scale
                                  : std::max(traj.norm_at(0), 1e-300);

  // Strictly positive norms are required for the log fit; an (effectively)
  // zero sample means the run collapsed to the origin.
  for (std::size_t i = begin; i < total; ++i) {
    if (traj.norm_at(i) < 1e-300) {
      fit.converged_to_zero = true;
      return fit;
    }
  }

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double count = static_cast<double>(total - begin);
  for (std::size_t i = begin; i < total; ++i) {
    const double t = traj.t[i];
    const double y = std::log(traj.norm_at(i));
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = count * stt - st * st;
  if (std::abs(denom) < 1e-300) throw FitError{"estimate_decay: degenerate fit"};
  const double slope = (count * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / count;

  // Shift the intercept so the fitted envelope dominates every recorded
  // sample, transient included: the amplitude is the observed uniform
  // constant for the fitted rate.  A fast transient above the extrapolated
  // tail line inflates the amplitude instead of invalidating the envelope.
  double max_resid = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const double norm = traj.norm_at(i);
    if (norm < 1e-300) continue;  // under any envelope
    const double resid = std::log(norm) - (intercept + slope * traj.t[i]);
    max_resid = std::max(max_resid, resid);
  }

  fit.rate = -slope;
  fit.amplitude = std::exp(intercept + max_resid) / fit.scale;
  return fit;
}

bool verify_envelope(const Trajectory& traj, const DecayFit& fit,
                     double slack) {
  if (fit.converged_to_zero) return true;
  if (!(fit.rate >= 0.0)) return false;
  const double level = slack * fit.amplitude * fit.scale;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double cap = level * std::exp(-fit.rate * traj.t[i]);
    if (traj.norm_at(i) > cap + 1e-300) return false;
  }
  return true;
}

}  // namespace delayctl
