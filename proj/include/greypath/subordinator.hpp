#pragma once

#include "greypath/rng.hpp"
#include "greypath/specfun.hpp"

namespace greypath {

// One-sided beta-stable variable with E[exp(-sS)] = exp(-s^beta), by Kanter's
// representation. Consumes one uniform and one exponential variate per attempt.
double sample_stable_oneside(BetaParam beta, Rng& rng);

// Y = S^(-beta), distributed with density M_beta: E[exp(-sY)] = E_beta(-s).
// In the degenerate mode beta = 1 this returns 1 and consumes nothing.
double sample_mwright(BetaParam beta, Rng& rng);

}  // namespace greypath
