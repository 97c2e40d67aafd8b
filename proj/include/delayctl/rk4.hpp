#pragma once

#include "delayctl/dynamics.hpp"

namespace delayctl {

/// One classical Runge-Kutta step of y' = rhs(t, y) from t to t + h.
/// rhs: (double, const Vec&) -> Vec.
template <class Rhs>
Vec rk4_step(Rhs&& rhs, double t, const Vec& y, double h) {
  const Vec k1 = rhs(t, y);
  const Vec k2 = rhs(t + 0.5 * h, Vec(y + 0.5 * h * k1));
  const Vec k3 = rhs(t + 0.5 * h, Vec(y + 0.5 * h * k2));
  const Vec k4 = rhs(t + h, Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace delayctl
