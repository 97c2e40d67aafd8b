#pragma once

#include "delayctl/dynamics.hpp"

namespace delayctl {

/// Dense matrix exponential by scaling-and-squaring with Pade approximants
/// (orders 3/5/7/9/13 selected by the 1-norm).  Relative accuracy is at the
/// 1e-13 level for well-scaled arguments, which the exact-predictor tests
/// rely on.
Mat expm(const Mat& A);

}  // namespace delayctl
