#include "greypath/subordinator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace greypath {

namespace {

// log S for one attempt; non-finite when U lands on an endpoint or E == 0.
double log_stable(double b, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, M_PI);
  std::exponential_distribution<double> exponential(1.0);
  const double u = uniform(rng);
  const double e = exponential(rng);
  return std::log(std::sin(b * u)) - std::log(std::sin(u)) / b +
         (1.0 - b) / b * (std::log(std::sin((1.0 - b) * u)) - std::log(e));
}

}  // namespace

double sample_stable_oneside(BetaParam beta, Rng& rng) {
  if (beta.is_degenerate()) throw std::domain_error("the one-sided stable sampler needs beta < 1");
  for (;;) {
    const double s = std::exp(log_stable(beta.value(), rng));
    if (s > 0.0 && std::isfinite(s)) return s;
  }
}

double sample_mwright(BetaParam beta, Rng& rng) {
  if (beta.is_degenerate()) return 1.0;
  for (;;) {
    const double y = std::exp(-beta.value() * log_stable(beta.value(), rng));
    if (y > 0.0 && std::isfinite(y)) return y;
  }
}

}  // namespace greypath
