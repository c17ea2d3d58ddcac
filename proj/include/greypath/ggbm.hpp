#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "greypath/coupling.hpp"
#include "greypath/fbm.hpp"
#include "greypath/rng.hpp"
#include "greypath/specfun.hpp"

namespace greypath {

class GgbmParams {
 public:
  GgbmParams(BetaParam beta, double alpha);
  BetaParam beta() const noexcept { return beta_; }
  double alpha() const noexcept { return alpha_; }
  HurstParam hurst() const noexcept { return HurstParam(alpha_ / 2.0); }

 private:
  BetaParam beta_;
  double alpha_;
};

// One realization of X on the base grid t_0..t_m. The underlying pair lives on
// the same number of steps over [0, T tau_H], so values[i] = B^H(t_i tau_H) is
// read off grid index i. Unobserved entries are NaN.
struct GgbmDraw {
  double tau = 1.0;
  double tau_h = 1.0;  // tau^(1/(2H)); 1 for the product representation
  TimeGrid base;
  CoupledPath coupled;
  std::vector<double> values;
  const Coupling* coupling = nullptr;  // null for the dedicated gBm path
  unsigned resamples = 0;
};

// Draws are rejected while T tau_H exceeds this many time units.
constexpr double kMaxScaledHorizon = 1e8;
constexpr unsigned kMaxConsecutiveResamples = 10;

// Holds the coupling for a parameter set and base grid; immutable and
// shareable across threads once built.
class GgbmSampler {
 public:
  GgbmSampler(GgbmParams params, TimeGrid base, CouplingScheme scheme = CouplingScheme::Projected,
              Exec exec = Exec::Parallel);

  const GgbmParams& params() const noexcept { return params_; }
  const TimeGrid& base() const noexcept { return base_; }
  const Coupling& coupling() const noexcept { return *coupling_; }

 private:
  GgbmParams params_;
  TimeGrid base_;
  std::shared_ptr<const Coupling> coupling_;
};

// Subordination: tau ~ M_beta, then B^H on [0, T tau^(1/(2H))].
GgbmDraw sample_ggbm(const GgbmSampler& sampler, Rng& rng, const std::vector<std::size_t>* observe = nullptr);

// Product form: sqrt(tau) B^H(t_i) on the base grid.
GgbmDraw sample_ggbm_product(const GgbmSampler& sampler, Rng& rng, const std::vector<std::size_t>* observe = nullptr);

// gBm (alpha = 1) with the identity coupling: the Brownian path itself on [0, T tau].
// Consumes the stream exactly like sample_ggbm with alpha = 1.
GgbmDraw sample_gbm(BetaParam beta, const TimeGrid& base, Rng& rng, const std::vector<std::size_t>* observe = nullptr);

double ggbm_covariance(const GgbmParams& params, double t, double s);
double ggbm_char_increment(const GgbmParams& params, double theta, double t, double s);
double ggbm_char_fn(const GgbmParams& params, const std::vector<double>& thetas, const std::vector<double>& times);
// E[X(t)^k]: zero for odd k, (2n)! / (2^n Gamma(beta n + 1)) t^(n alpha) for k = 2n.
double ggbm_moment(const GgbmParams& params, unsigned k, double t);

}  // namespace greypath
