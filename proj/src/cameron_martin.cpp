#include "greypath/cameron_martin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace greypath {

std::vector<std::size_t> cylinder_indices(const CylinderFunction& F, const TimeGrid& base) {
  std::vector<std::size_t> idx;
  for (double t : F.times()) {
    if (t > base.horizon() * (1.0 + 1e-12))
      throw std::domain_error("cylinder time " + std::to_string(t) + " lies beyond T = " + std::to_string(base.horizon()));
    idx.push_back(base.index_of(t));
  }
  return idx;
}

CameronMartinElement shift_for_draw(const Direction& hdot, const GgbmDraw& draw, const std::vector<std::size_t>& rows) {
  const TimeGrid& grid = draw.coupled.grid;
  std::vector<double> cells = hdot.cell_averages(grid);
  if (draw.coupling) return apply_K(*draw.coupling, std::move(cells), grid, &rows);
  return apply_K(HurstParam(0.5), std::move(cells), grid);
}

namespace {

void check_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (a.steps() != b.steps() || std::abs(a.horizon() - b.horizon()) > 1e-12 * b.horizon())
    throw std::domain_error("shift direction lives on a different grid than the draw");
}

}  // namespace

std::vector<double> shift_values(const GgbmDraw& draw, const CameronMartinElement& h) {
  check_same_grid(h.grid, draw.coupled.grid);
  std::vector<double> out(draw.values.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (h.has_value(i)) out[i] = draw.values[i] + h.h_values[i];
  return out;
}

double rn_density(const CameronMartinElement& h, const GgbmDraw& draw, double T) {
  check_same_grid(h.grid, draw.coupled.grid);
  return exp_martingale(h.hdot, draw.coupled, T * draw.tau_h);
}

namespace detail {

void check_verify_config(const VerifyConfig& cfg) {
  if (cfg.N < kMinVerifyDraws)
    throw std::invalid_argument("N = " + std::to_string(cfg.N) + " is too small for a meaningful interval; need N >= " +
                                std::to_string(kMinVerifyDraws));
  if (cfg.dedicated_gbm && cfg.params.alpha() != 1.0)
    throw std::invalid_argument("the dedicated gBm path requires alpha = 1");
}

GgbmDraw draw_for_verification(const VerifyConfig& cfg, const GgbmSampler* sampler, Rng& rng,
                               const std::vector<std::size_t>& observe) {
  if (cfg.dedicated_gbm) return sample_gbm(cfg.params.beta(), TimeGrid(cfg.T, cfg.steps), rng, &observe);
  return sample_ggbm(*sampler, rng, &observe);
}

std::uint64_t side_seed(std::uint64_t seed, int side) { return derive_seed(seed, static_cast<std::uint64_t>(side)); }

}  // namespace detail

namespace {

void check_sampler(const VerifyConfig& cfg, const GgbmSampler& sampler) {
  if (sampler.base().steps() != cfg.steps || sampler.base().horizon() != cfg.T ||
      sampler.params().alpha() != cfg.params.alpha() || sampler.params().beta().value() != cfg.params.beta().value() ||
      sampler.coupling().scheme() != cfg.scheme)
    throw std::invalid_argument("sampler does not match the verification settings");
}

std::vector<double> observed(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  std::vector<double> x(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) x[k] = v[idx[k]];
  return x;
}

CmReport verify_cm(const CylinderFunction& F, const Direction& hdot, const VerifyConfig& cfg, const GgbmSampler* sp,
                   Exec exec) {
  const TimeGrid base(cfg.T, cfg.steps);
  const std::vector<std::size_t> idx = cylinder_indices(F, base);
  const double T = cfg.T;

  CmReport rep;
  // A zero direction makes both sides identical draw by draw when they share a seed.
  rep.paired = cfg.coupled_estimator || hdot.is_zero();
  rep.seed_lhs = detail::side_seed(cfg.seed, 1);
  rep.seed_rhs = rep.paired ? rep.seed_lhs : detail::side_seed(cfg.seed, 2);

  auto lhs_value = [&](const GgbmDraw& d, const CameronMartinElement& h) {
    return F.value(observed(shift_values(d, h), idx).data());
  };
  auto rhs_values = [&](const GgbmDraw& d, const CameronMartinElement& h, double* fd, double* dens) {
    *dens = rn_density(h, d, T);
    *fd = F.value(observed(d.values, idx).data()) * *dens;
  };

  if (rep.paired) {
    // outputs: F(X^h), F(X) D, D, F(X^h) - F(X) D, [D > 0]
    const auto stats = run_blocks(cfg.N, rep.seed_lhs, 5, [&](Rng& rng, double* out) {
      const GgbmDraw d = detail::draw_for_verification(cfg, sp, rng, idx);
      const CameronMartinElement h = shift_for_draw(hdot, d, idx);
      out[0] = lhs_value(d, h);
      rhs_values(d, h, &out[1], &out[2]);
      out[3] = out[0] - out[1];
      out[4] = out[2] > 0.0 ? 1.0 : 0.0;
    }, exec);
    rep.lhs = make_report(stats[0], rep.seed_lhs);
    rep.rhs = make_report(stats[1], rep.seed_rhs);
    rep.density = make_report(stats[2], rep.seed_rhs);
    rep.identity = compare(stats[3].mean, stats[3].std_error());
    rep.density_positive = stats[4].mean == 1.0;
  } else {
    const auto left = run_blocks(cfg.N, rep.seed_lhs, 1, [&](Rng& rng, double* out) {
      const GgbmDraw d = detail::draw_for_verification(cfg, sp, rng, idx);
      out[0] = lhs_value(d, shift_for_draw(hdot, d, idx));
    }, exec);
    const auto right = run_blocks(cfg.N, rep.seed_rhs, 3, [&](Rng& rng, double* out) {
      const GgbmDraw d = detail::draw_for_verification(cfg, sp, rng, idx);
      rhs_values(d, shift_for_draw(hdot, d, idx), &out[0], &out[1]);
      out[2] = out[1] > 0.0 ? 1.0 : 0.0;
    }, exec);
    rep.lhs = make_report(left[0], rep.seed_lhs);
    rep.rhs = make_report(right[0], rep.seed_rhs);
    rep.density = make_report(right[1], rep.seed_rhs);
    rep.identity = compare_independent(rep.lhs, rep.rhs);
    rep.density_positive = right[2].mean == 1.0;
  }
  rep.density_check = compare(rep.density.estimate - 1.0, rep.density.std_error);
  return rep;
}

}  // namespace

CmReport verify_cm_identity(const CylinderFunction& F, const Direction& hdot, const VerifyConfig& cfg,
                            const GgbmSampler& sampler, Exec exec) {
  detail::check_verify_config(cfg);
  if (cfg.dedicated_gbm) return verify_cm(F, hdot, cfg, nullptr, exec);
  check_sampler(cfg, sampler);
  return verify_cm(F, hdot, cfg, &sampler, exec);
}

CmReport verify_cm_identity(const CylinderFunction& F, const Direction& hdot, const VerifyConfig& cfg, Exec exec) {
  detail::check_verify_config(cfg);
  if (cfg.dedicated_gbm) return verify_cm(F, hdot, cfg, nullptr, exec);
  const GgbmSampler sampler(cfg.params, TimeGrid(cfg.T, cfg.steps), cfg.scheme, exec);
  return verify_cm(F, hdot, cfg, &sampler, exec);
}

}  // namespace greypath
