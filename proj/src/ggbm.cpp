#include "greypath/ggbm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "greypath/errors.hpp"
#include "greypath/subordinator.hpp"

namespace greypath {

GgbmParams::GgbmParams(BetaParam beta, double alpha) : beta_(beta), alpha_(alpha) {
  if (!(alpha >= 1.0 && alpha < 2.0)) throw std::domain_error("alpha must lie in [1, 2), got " + std::to_string(alpha));
}

GgbmSampler::GgbmSampler(GgbmParams params, TimeGrid base, CouplingScheme scheme, Exec exec)
    : params_(params), base_(base), coupling_(std::make_shared<Coupling>(params.hurst(), base.steps(), scheme, exec)) {}

namespace {

// tau and the scaled horizon T tau^(1/(2H)), with the overflow guard.
std::pair<double, double> draw_tau(BetaParam beta, double H, double T, Rng& rng, unsigned& resamples) {
  unsigned consecutive = 0;
  for (;;) {
    const double tau = sample_mwright(beta, rng);
    const double tau_h = std::pow(tau, 1.0 / (2.0 * H));
    const double horizon = T * tau_h;
    if (horizon > 0.0 && horizon <= kMaxScaledHorizon) return {tau, tau_h};
    ++resamples;
    if (++consecutive > kMaxConsecutiveResamples)
      throw numeric_error("subordinator draws keep exceeding the horizon guard",
                          {{"beta", std::to_string(beta.value())},
                           {"last_tau", std::to_string(tau)},
                           {"consecutive_resamples", std::to_string(consecutive)}});
  }
}

void copy_observed(GgbmDraw& d, const std::vector<std::size_t>* observe, double factor) {
  const std::size_t m = d.base.steps();
  if (!observe) {
    d.values.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) d.values[i] = factor * d.coupled.fbm_path[i];
    return;
  }
  d.values.assign(m + 1, std::numeric_limits<double>::quiet_NaN());
  d.values[0] = 0.0;
  for (std::size_t i : *observe) d.values[i] = factor * d.coupled.fbm_path[i];
}

}  // namespace

GgbmDraw sample_ggbm(const GgbmSampler& sampler, Rng& rng, const std::vector<std::size_t>* observe) {
  const GgbmParams& p = sampler.params();
  GgbmDraw d{1.0, 1.0, sampler.base(), CoupledPath{sampler.base(), {}, {}, {}}, {}, &sampler.coupling(), 0};
  std::tie(d.tau, d.tau_h) = draw_tau(p.beta(), p.hurst().value(), d.base.horizon(), rng, d.resamples);
  d.coupled = sample_coupled(sampler.coupling(), d.base.horizon() * d.tau_h, rng, observe);
  copy_observed(d, observe, 1.0);
  return d;
}

GgbmDraw sample_ggbm_product(const GgbmSampler& sampler, Rng& rng, const std::vector<std::size_t>* observe) {
  const GgbmParams& p = sampler.params();
  GgbmDraw d{1.0, 1.0, sampler.base(), CoupledPath{sampler.base(), {}, {}, {}}, {}, &sampler.coupling(), 0};
  d.tau = sample_mwright(p.beta(), rng);
  d.coupled = sample_coupled(sampler.coupling(), d.base.horizon(), rng, observe);
  copy_observed(d, observe, std::sqrt(d.tau));
  return d;
}

GgbmDraw sample_gbm(BetaParam beta, const TimeGrid& base, Rng& rng, const std::vector<std::size_t>* observe) {
  GgbmDraw d{1.0, 1.0, base, CoupledPath{base, {}, {}, {}}, {}, nullptr, 0};
  std::tie(d.tau, d.tau_h) = draw_tau(beta, 0.5, base.horizon(), rng, d.resamples);
  const std::size_t m = base.steps();
  CoupledPath& c = d.coupled;
  c.grid = TimeGrid(base.horizon() * d.tau_h, m);
  c.bm_increments.resize(m);
  c.bm_path.assign(m + 1, 0.0);
  NormalSource normal(rng);
  const double sd = std::sqrt(c.grid.dt());
  for (std::size_t j = 0; j < m; ++j) {
    c.bm_increments[j] = sd * normal();
    c.bm_path[j + 1] = c.bm_path[j] + c.bm_increments[j];
  }
  c.fbm_path = c.bm_path;
  copy_observed(d, observe, 1.0);
  return d;
}

double ggbm_covariance(const GgbmParams& params, double t, double s) {
  if (!(t >= 0.0 && s >= 0.0)) throw std::domain_error("ggbm_covariance requires non-negative times");
  const double a = params.alpha();
  return (std::pow(t, a) + std::pow(s, a) - std::pow(std::abs(t - s), a)) / (2.0 * std::tgamma(params.beta().value() + 1.0));
}

double ggbm_char_increment(const GgbmParams& params, double theta, double t, double s) {
  if (!(t >= 0.0 && s >= 0.0)) throw std::domain_error("ggbm_char_increment requires non-negative times");
  return mittag_leffler(params.beta(), -0.5 * theta * theta * std::pow(std::abs(t - s), params.alpha()));
}

double ggbm_char_fn(const GgbmParams& params, const std::vector<double>& thetas, const std::vector<double>& times) {
  if (thetas.size() != times.size()) throw std::domain_error("ggbm_char_fn needs one theta per time");
  // Quadratic form in the fBm covariance R_H(t_k, t_j) = (t_k^a + t_j^a - |t_k - t_j|^a) / 2.
  const HurstParam H = params.hurst();
  double q = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t j = 0; j < times.size(); ++j) q += thetas[k] * thetas[j] * covariance_rh(H, times[k], times[j]);
  return mittag_leffler(params.beta(), -0.5 * q);
}

double ggbm_moment(const GgbmParams& params, unsigned k, double t) {
  if (!(t >= 0.0)) throw std::domain_error("ggbm_moment requires t >= 0");
  if (k % 2 == 1) return 0.0;
  const double n = k / 2;
  return std::exp(std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) - std::lgamma(params.beta().value() * n + 1.0)) *
         std::pow(t, n * params.alpha());
}

}  // namespace greypath
