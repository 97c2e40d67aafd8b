#include "delayctl/predictors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <utility>

#include "delayctl/matexp.hpp"

namespace delayctl {

namespace {

double spectral_norm(const Mat& M) {
  return Eigen::JacobiSVD<Mat>(M).singularValues()(0);
}

Vec scalar_vec(double v) {
  Vec out(1);
  out[0] = v;
  return out;
}

void check_horizon(const HistorySegment& u, double r, const char* what) {
  if (std::abs(u.horizon() - r) > 1e-9 * (1.0 + r)) {
    std::ostringstream msg;
    msg << what << ": history horizon " << u.horizon()
        << " does not match scheme delay " << r;
    throw ContractViolation{msg.str()};
  }
}

// Exact integral of the piecewise-linear history over [a, b], a <= b,
// both inside [-r, 0] (up to roundoff slack).
Vec history_integral(const HistorySegment& u, double a, double b) {
  const double h = u.dt();
  const double slack = 1e-9 * (1.0 + u.horizon());
  if (a < -u.horizon() - slack || b > slack || a > b + slack) {
    throw SignalDomainError{"history_integral: bad interval"};
  }
  const Mat& s = u.samples();
  const int last = static_cast<int>(s.cols()) - 1;
  auto clampedpos = [&](double theta) {
    return std::clamp((theta + u.horizon()) / h, 0.0, double(last));
  };
  const double pa = clampedpos(a);
  const double pb = clampedpos(b);

  Vec acc = Vec::Zero(u.dim());
  // Piece-by-piece: over one grid cell the integrand is linear, so the
  // midpoint value times the width is exact.
  double pos = pa;
  while (pos < pb - 1e-15) {
    const int cell = std::min(static_cast<int>(pos), last - 1);
    const double cell_end = std::min(double(cell + 1), pb);
    const double width = cell_end - pos;
    const double mid = 0.5 * (pos + cell_end) - cell;
    acc += width * h *
           ((1.0 - mid) * s.col(cell) + mid * s.col(cell + 1));
    pos = cell_end;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// FeedbackLaw / InputSet
// ---------------------------------------------------------------------------

FeedbackLaw FeedbackLaw::linear_gain(const Mat& gain) {
  FeedbackLaw fb;
  fb.gain = gain;
  fb.linear = true;
  fb.bound = spectral_norm(gain);
  fb.k = [gain](const Vec& x) -> Vec { return gain * x; };
  fb.grad = [gain](const Vec&) -> Mat { return gain; };
  return fb;
}

bool verify_feedback(const FeedbackLaw& fb, int state_dim, double box,
                     unsigned seed, int samples) {
  if (!fb.k || !fb.grad) return false;
  if (fb.k(Vec::Zero(state_dim)).norm() > 1e-12) return false;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-box, box);
  const double tol = 1.0 + 1e-9;
  for (int i = 0; i < samples; ++i) {
    Vec x(state_dim);
    for (int j = 0; j < state_dim; ++j) x[j] = unif(rng);
    if (fb.k(x).norm() > fb.bound * x.norm() * tol + 1e-12) return false;
    if (spectral_norm(fb.grad(x)) > fb.bound * tol) return false;
  }
  return true;
}

InputSet InputSet::full(int dim) {
  InputSet set;
  set.kind_ = Kind::Full;
  set.dim_ = dim;
  return set;
}

InputSet InputSet::box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw ContractViolation{"InputSet::box: bad bounds"};
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= 0.0 && 0.0 <= hi[i])) {
      throw ContractViolation{"InputSet::box must contain the origin"};
    }
  }
  InputSet set;
  set.kind_ = Kind::Box;
  set.dim_ = static_cast<int>(lo.size());
  set.lo_ = lo;
  set.hi_ = hi;
  return set;
}

InputSet InputSet::ball(int dim, double radius) {
  if (radius < 0.0) throw ContractViolation{"InputSet::ball: radius < 0"};
  InputSet set;
  set.kind_ = Kind::Ball;
  set.dim_ = dim;
  set.radius_ = radius;
  return set;
}

Vec InputSet::project(const Vec& w) const {
  if (w.size() != dim_) throw ContractViolation{"project: dimension mismatch"};
  switch (kind_) {
    case Kind::Full:
      return w;
    case Kind::Box:
      return w.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::Ball: {
      const double n = w.norm();
      if (n <= radius_) return w;
      if (n == 0.0) return w;
      return w * (radius_ / n);
    }
  }
  return w;
}

bool InputSet::contains(const Vec& w, double tol) const {
  return (project(w) - w).norm() <= tol;
}

// ---------------------------------------------------------------------------
// Fixed-point predictor family
// ---------------------------------------------------------------------------

Vec predict_state(const SystemModel& model, const PicardConfig& cfg,
                  const Vec& x, const HistorySegment& u) {
  check_horizon(u, cfg.delay, "predict_state");
  return chained_map(model, cfg, x, u.as_signal(0.0));
}

Vec linear_predictor_derivative(const SystemModel& model,
                                const FeedbackLaw& fb, const PicardConfig& cfg,
                                const Vec& x, const HistorySegment& u) {
  if (!fb.linear) {
    throw UnsupportedScheme{
        "linear_predictor_derivative needs a linear feedback"};
  }
  const Vec predicted = predict_state(model, cfg, x, u);
  return fb.gain * evaluate_field(model, predicted, u.head());
}

namespace {

// Shared construction for the two fixed-point scheme flavours.
PredictorScheme build_picard_scheme(const SystemModel& model,
                                    const FeedbackLaw& fb,
                                    const PicardConfig& cfg,
                                    const InputSet& input_set,
                                    bool state_predictor) {
  PredictorScheme scheme;
  scheme.kind =
      state_predictor ? SchemeKind::StatePredictor : SchemeKind::Approximate;
  {
    std::ostringstream name;
    name << (state_predictor ? "state-predictor" : "picard") << "(l="
         << cfg.iterations << ",q=" << cfg.subintervals << ")";
    scheme.name = name.str();
  }
  scheme.clamps_ = std::make_shared<std::atomic<long>>(0);

  auto clamps = scheme.clamps_;
  scheme.p = [model, fb, cfg, input_set, clamps,
              state_predictor](const Vec& x, const HistorySegment& u) -> Vec {
    const Vec predicted = predict_state(model, cfg, x, u);
    const Vec raw = state_predictor ? Vec(fb.gain * predicted)
                                    : fb.k(predicted);
    Vec out = input_set.project(raw);
    if ((out - raw).norm() > 0.0) clamps->fetch_add(1);
    return out;
  };

  if (fb.linear && input_set.is_full()) {
    scheme.g = [model, fb, cfg](const Vec& x, const HistorySegment& u) -> Vec {
      return linear_predictor_derivative(model, fb, cfg, x, u);
    };
  }

  if (cfg.contraction_ok()) {
    const double lt = cfg.contraction();
    const double raw_error =
        std::pow(lt, cfg.iterations + 1) / (1.0 - lt);  // per unit of |x|+sup|u|
    const double K = chain_constant(cfg);
    const double factor = state_predictor
                              ? std::max(1.0, cfg.lipschitz)
                              : 1.0;
    scheme.a1 = 2.0 * fb.bound * K * raw_error * factor;
    scheme.a2 = scheme.a1;
    const double flow_growth =
        std::exp(kGrowthRateFactor * cfg.lipschitz * cfg.delay);
    double G = fb.bound * (flow_growth + K * raw_error);
    if (scheme.has_g()) {
      G += fb.bound * cfg.lipschitz * (flow_growth + K * raw_error + 1.0);
    }
    scheme.G = G;
  }
  return scheme;
}

}  // namespace

PredictorScheme make_picard_predictor(const SystemModel& model,
                                      const FeedbackLaw& fb,
                                      const PicardConfig& cfg,
                                      const InputSet& input_set) {
  return build_picard_scheme(model, fb, cfg, input_set, false);
}

PredictorScheme make_state_predictor_scheme(const SystemModel& model,
                                            const FeedbackLaw& fb,
                                            const PicardConfig& cfg) {
  if (!fb.linear) {
    throw UnsupportedScheme{"state-predictor scheme needs a linear feedback"};
  }
  return build_picard_scheme(model, fb, cfg, InputSet::full(fb.gain.rows()),
                             true);
}

// ---------------------------------------------------------------------------
// Exact predictor for linear systems
// ---------------------------------------------------------------------------

namespace {

struct SmithData {
  Mat A, B, gain;
  double r = 0.0;
  Mat gE;   // gain * exp(A r)
  Mat gEA;  // gain * exp(A r) * A
  Mat gB;   // gain * B

  std::mutex mutex;
  // Per-grid trapezoid kernels: kernels[N] = (p weights, g weights), one
  // m x m matrix per history node.
  std::map<int, std::pair<std::vector<Mat>, std::vector<Mat>>> kernels;

  const std::pair<std::vector<Mat>, std::vector<Mat>>& weights(int n) {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = kernels.find(n);
    if (it != kernels.end()) return it->second;
    std::vector<Mat> wp(n + 1), wg(n + 1);
    const double h = r / n;
    for (int j = 0; j <= n; ++j) {
      const Mat E = expm(Mat(A * (r - j * h)));
      wp[j] = gain * E * B;
      wg[j] = gain * A * E * B;
    }
    return kernels.emplace(n, std::make_pair(std::move(wp), std::move(wg)))
        .first->second;
  }
};

Vec trapezoid_convolution(const std::vector<Mat>& weights,
                          const HistorySegment& u, double h) {
  const int n = static_cast<int>(weights.size()) - 1;
  const Mat& s = u.samples();
  Vec acc = 0.5 * (weights[0] * s.col(0) + weights[n] * s.col(n));
  for (int j = 1; j < n; ++j) acc += weights[j] * s.col(j);
  return h * acc;
}

}  // namespace

PredictorScheme smith_scheme(const Mat& A, const Mat& B, const Mat& gain,
                             double r) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (A.cols() != n || B.rows() != n || gain.rows() != m || gain.cols() != n) {
    throw ContractViolation{"smith_scheme: inconsistent dimensions"};
  }
  if (!(r > 0.0)) throw ContractViolation{"smith_scheme: delay must be > 0"};

  const Mat closed = A + B * gain;
  const Eigen::EigenSolver<Mat> eigs(closed);
  for (int i = 0; i < n; ++i) {
    if (eigs.eigenvalues()[i].real() >= 0.0) {
      std::ostringstream msg;
      msg << "smith_scheme: A + B*gain is not Hurwitz (eigenvalue real part "
          << eigs.eigenvalues()[i].real() << ")";
      throw ScenarioRefused{msg.str()};
    }
  }

  auto data = std::make_shared<SmithData>();
  data->A = A;
  data->B = B;
  data->gain = gain;
  data->r = r;
  const Mat E = expm(Mat(A * r));
  data->gE = gain * E;
  data->gEA = gain * E * A;
  data->gB = gain * B;

  PredictorScheme scheme;
  scheme.name = "smith";
  scheme.kind = SchemeKind::Exact;
  scheme.clamps_ = std::make_shared<std::atomic<long>>(0);
  scheme.a1 = 0.0;
  scheme.a2 = 0.0;

  scheme.p = [data](const Vec& x, const HistorySegment& u) -> Vec {
    check_horizon(u, data->r, "smith p");
    const auto& w = data->weights(u.intervals());
    return data->gE * x + trapezoid_convolution(w.first, u, u.dt());
  };
  scheme.g = [data](const Vec& x, const HistorySegment& u) -> Vec {
    check_horizon(u, data->r, "smith g");
    const auto& w = data->weights(u.intervals());
    return data->gEA * x + trapezoid_convolution(w.second, u, u.dt()) +
           data->gB * u.head();
  };

  {
    const auto& w = data->weights(128);
    double peak_p = 0.0, peak_g = 0.0;
    for (const Mat& mat : w.first) peak_p = std::max(peak_p, spectral_norm(mat));
    for (const Mat& mat : w.second) peak_g = std::max(peak_g, spectral_norm(mat));
    scheme.G = spectral_norm(data->gE) + spectral_norm(data->gEA) +
               r * (peak_p + peak_g) + spectral_norm(data->gB);
  }
  return scheme;
}

// ---------------------------------------------------------------------------
// No prediction
// ---------------------------------------------------------------------------

PredictorScheme no_predictor_scheme(const SystemModel& model,
                                    const FeedbackLaw& fb, double r) {
  PredictorScheme scheme;
  scheme.name = "none";
  scheme.kind = SchemeKind::None;
  scheme.clamps_ = std::make_shared<std::atomic<long>>(0);

  scheme.p = [fb](const Vec& x, const HistorySegment&) -> Vec {
    return fb.k(x);
  };
  scheme.g = [model, fb](const Vec& x, const HistorySegment& u) -> Vec {
    return fb.grad(x) * evaluate_field(model, x, u.tail());
  };

  if (model.growth_state && model.growth_input) {
    const double L1 = *model.growth_state;
    const double L2 = *model.growth_input;
    const double R = fb.bound;
    // Delayed-reading error bound with both free parameters set to 1.
    scheme.a1 = 2.0 * R * r * L1 * std::exp(1.5 * L1 * r);
    scheme.a2 =
        2.0 * R * r * L2 * (std::sqrt((std::exp(3.0 * L1 * r) - 1.0) / 3.0) + 1.0);
    scheme.G = R * (1.0 + L1 + L2);
  }
  return scheme;
}

// ---------------------------------------------------------------------------
// Scalar benchmark closed forms
// ---------------------------------------------------------------------------

PredictorScheme scalar_benchmark_scheme(
    double kappa, double r, const std::function<double(double)>& f,
    const std::function<double(double)>& fprime, int sweeps,
    int subintervals) {
  if (!(kappa > 0.0)) throw ContractViolation{"scalar scheme: kappa must be > 0"};
  if (!(r > 0.0)) throw ContractViolation{"scalar scheme: delay must be > 0"};
  const bool v11 = sweeps == 1 && subintervals == 1;
  const bool v21 = sweeps == 2 && subintervals == 1;
  const bool v12 = sweeps == 1 && subintervals == 2;
  if (!v11 && !v21 && !v12) {
    std::ostringstream msg;
    msg << "scalar benchmark scheme has no (" << sweeps << "," << subintervals
        << ") variant (supported: (1,1), (2,1), (1,2))";
    throw UnsupportedScheme{msg.str()};
  }

  const double c = 1.0 + kappa;

  PredictorScheme scheme;
  {
    std::ostringstream name;
    name << "scalar(l=" << sweeps << ",q=" << subintervals << ")";
    scheme.name = name.str();
  }
  scheme.kind = SchemeKind::Approximate;
  scheme.clamps_ = std::make_shared<std::atomic<long>>(0);

  auto uat = [](const HistorySegment& u, double theta) {
    return u.value(theta)[0];
  };

  if (v11) {
    scheme.p = [=](const Vec& x, const HistorySegment& u) -> Vec {
      check_horizon(u, r, "scalar p");
      const double xv = x[0];
      return scalar_vec(-c * (xv + r * f(xv) + history_integral(u, -r, 0.0)[0]));
    };
    scheme.g = [=](const Vec& x, const HistorySegment& u) -> Vec {
      check_horizon(u, r, "scalar g");
      const double xv = x[0];
      const double fp = fprime(xv);
      return scalar_vec(-c * (f(xv) + r * fp * f(xv) + r * fp * uat(u, -r) +
                              uat(u, 0.0)));
    };
  } else if (v21) {
    scheme.p = [=](const Vec& x, const HistorySegment& u) -> Vec {
      check_horizon(u, r, "scalar p");
      const double xv = x[0];
      const double fx = f(xv);
      const int n = u.intervals();
      const double h = u.dt();
      const Mat& s = u.samples();
      // tau-nodes coincide with the history grid; inner integrals of the
      // piecewise-linear history are accumulated exactly.
      double inner = 0.0;  // int_0^tau u(s - r) ds
      double acc = 0.5 * f(xv);  // trapezoid, first node (tau = 0)
      for (int j = 1; j <= n; ++j) {
        inner += 0.5 * h * (s(0, j - 1) + s(0, j));
        const double y = f(xv + j * h * fx + inner);
        acc += (j == n) ? 0.5 * y : y;
      }
      const double outer = acc * h;
      return scalar_vec(-c * (xv + outer + history_integral(u, -r, 0.0)[0]));
    };
    scheme.g = [=](const Vec& x, const HistorySegment& u) -> Vec {
      check_horizon(u, r, "scalar g");
      const double xv = x[0];
      const double fx = f(xv);
      const double fpx = fprime(xv);
      const double u_tail = uat(u, -r);
      const int n = u.intervals();
      const double h = u.dt();
      const Mat& s = u.samples();
      double inner = 0.0;
      auto integrand = [&](int j, double inner_j) {
        const double tau = j * h;
        const double y = xv + tau * fx + inner_j;
        return fprime(y) *
               (fx + tau * fpx * fx + tau * fpx * u_tail + s(0, j));
      };
      double acc = 0.5 * integrand(0, 0.0);
      for (int j = 1; j <= n; ++j) {
        inner += 0.5 * h * (s(0, j - 1) + s(0, j));
        const double v = integrand(j, inner);
        acc += (j == n) ? 0.5 * v : v;
      }
      return scalar_vec(-c * (fx + uat(u, 0.0) + acc * h));
    };
  } else {  // v12
    auto midpoint_state = [=](double xv, const HistorySegment& u) {
      return xv + 0.5 * r * f(xv) + history_integral(u, -r, -0.5 * r)[0];
    };
    scheme.p = [=](const Vec& x, const HistorySegment& u) -> Vec {
      check_horizon(u, r, "scalar p");
      const double xv = x[0];
      const double z = midpoint_state(xv, u);
      return scalar_vec(-c * (xv + 0.5 * r * f(xv) +
                              history_integral(u, -r, 0.0)[0] +
                              0.5 * r * f(z)));
    };
    scheme.g = [=](const Vec& x, const HistorySegment& u) -> Vec {
      check_horizon(u, r, "scalar g");
      const double xv = x[0];
      const double fx = f(xv);
      const double fpx = fprime(xv);
      const double u_tail = uat(u, -r);
      const double z = midpoint_state(xv, u);
      const double first =
          fx + 0.5 * r * fpx * fx + 0.5 * r * fpx * u_tail + uat(u, 0.0);
      const double second =
          0.5 * r * fprime(z) *
          (fx + uat(u, -0.5 * r) + 0.5 * r * fpx * fx + 0.5 * r * fpx * u_tail);
      return scalar_vec(-c * first - c * second);
    };
  }

  // Error constants; absent outside the contraction domain of the variant.
  const double T = r / subintervals;
  if (T < 1.0) {
    PicardConfig cfg(sweeps, subintervals, r, 1.0);
    const double K = chain_constant(cfg);
    const double a =
        2.0 * c * K * std::pow(T, sweeps + 1) / (1.0 - T);
    scheme.a1 = a;
    scheme.a2 = a;
  }
  scheme.G = 2.0 * c * (1.0 + r) * (1.0 + r);
  return scheme;
}

}  // namespace delayctl
