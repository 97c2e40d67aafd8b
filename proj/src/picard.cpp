#include "delayctl/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace delayctl {

PicardConfig::PicardConfig(int l, int q, double r, double L,
                           int grid_intervals)
    : iterations(l),
      subintervals(q),
      delay(r),
      lipschitz(L),
      grid(grid_intervals) {
  if (l < 1) throw ContractViolation{"PicardConfig: iterations must be >= 1"};
  if (q < 1) throw ContractViolation{"PicardConfig: subintervals must be >= 1"};
  if (!(r > 0.0)) throw ContractViolation{"PicardConfig: delay must be > 0"};
  if (!(L > 0.0)) throw ContractViolation{"PicardConfig: constant must be > 0"};
  if (grid < 2) throw ContractViolation{"PicardConfig: grid too coarse"};
}

PicardConfig config_for(const SystemModel& model, int l, int q, double r,
                        int grid_intervals) {
  if (!model.lipschitz || !model.growth) {
    throw MissingHypothesis{
        "config_for needs both lipschitz and growth declared on the model"};
  }
  return PicardConfig(l, q, r, std::max(*model.lipschitz, *model.growth),
                      grid_intervals);
}

SampledSignal picard_iterate(const SystemModel& model,
                             const SampledSignal& path,
                             const SampledSignal& input) {
  const double eps = 1e-9 * (1.0 + std::abs(path.t_start()));
  if (std::abs(path.t_start() - input.t_start()) > eps ||
      std::abs(path.dt() - input.dt()) > 1e-12 * std::max(1.0, path.dt()) ||
      path.intervals() != input.intervals()) {
    throw ContractViolation{"picard_iterate: path and input grids differ"};
  }
  const int n = path.intervals();
  const double dt = path.dt();
  const Mat& xs = path.samples();
  const Mat& us = input.samples();

  Mat out(xs.rows(), n + 1);
  const Vec x0 = xs.col(0);
  out.col(0) = x0;
  Vec prev_f = evaluate_field(model, x0, us.col(0));
  Vec acc = Vec::Zero(xs.rows());
  for (int j = 1; j <= n; ++j) {
    Vec cur_f = evaluate_field(model, xs.col(j), us.col(j));
    acc += 0.5 * dt * (prev_f + cur_f);
    out.col(j) = x0 + acc;
    prev_f = std::move(cur_f);
  }
  return SampledSignal(path.t_start(), dt, std::move(out));
}

Vec step_map(const SystemModel& model, const PicardConfig& cfg, const Vec& x,
             const SampledSignal& input) {
  Mat lift(x.size(), input.intervals() + 1);
  lift.colwise() = x;
  SampledSignal path(input.t_start(), input.dt(), std::move(lift));
  for (int sweep = 0; sweep < cfg.iterations; ++sweep) {
    path = picard_iterate(model, path, input);
  }
  return path.samples().col(path.intervals());
}

Vec chained_map(const SystemModel& model, const PicardConfig& cfg,
                const Vec& x, const SampledSignal& input) {
  const double r = cfg.delay;
  const double slack = 1e-9 * (1.0 + r);
  if (input.t_start() > slack || input.t_end() < r - slack) {
    throw SignalDomainError{"chained_map: input does not cover [0, r]"};
  }
  const double T = cfg.subinterval_length();
  const int nodes =
      std::max(cfg.grid, static_cast<int>(std::ceil(T / input.dt() - 1e-9)));

  Vec state = x;
  for (int i = 0; i < cfg.subintervals; ++i) {
    const double left = i * T;
    SampledSignal sub = SampledSignal::from_function(
        0.0, T, nodes, [&](double s) { return input.value(left + s); });
    state = step_map(model, cfg, state, sub);
  }
  return state;
}

namespace {

void require_contraction(const PicardConfig& cfg, const char* what) {
  if (!cfg.contraction_ok()) {
    std::ostringstream msg;
    msg << what << ": L*T = " << cfg.contraction()
        << " >= 1, bound undefined (shrink the subintervals)";
    throw ContractionViolated{msg.str()};
  }
}

}  // namespace

double step_error_bound(const PicardConfig& cfg, double x_norm, double u_sup) {
  require_contraction(cfg, "step_error_bound");
  const double lt = cfg.contraction();
  return std::pow(lt, cfg.iterations + 1) / (1.0 - lt) * (x_norm + u_sup);
}

double chain_constant(const PicardConfig& cfg) {
  require_contraction(cfg, "chain_constant");
  if (cfg.subintervals == 1) return 1.0;
  const double lt = cfg.contraction();
  const double b = lt * lt / (1.0 - lt);
  const double base = b + std::exp(lt);
  const double lead = std::pow(base, cfg.subintervals - 1);
  const double tail = std::exp(kGrowthRateFactor * cfg.lipschitz * cfg.delay) + 1.0;
  return lead + tail * (lead - 1.0) / (base - 1.0);
}

double chained_error_bound(const PicardConfig& cfg, double x_norm,
                           double u_sup) {
  return chain_constant(cfg) * step_error_bound(cfg, x_norm, u_sup);
}

}  // namespace delayctl
