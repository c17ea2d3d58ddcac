#include "greypath/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace greypath {

double cm_inner_product(const CameronMartinElement& a, const CameronMartinElement& b) {
  if (a.grid.steps() != b.grid.steps() || a.hdot.size() != b.hdot.size() ||
      std::abs(a.grid.horizon() - b.grid.horizon()) > 1e-12 * b.grid.horizon())
    throw std::domain_error("inner product of elements on different grids");
  double s = 0.0;
  for (std::size_t j = 0; j < a.hdot.size(); ++j) s += a.hdot[j] * b.hdot[j];
  return s * a.grid.dt();
}

namespace {

struct Evaluated {
  std::vector<std::size_t> idx;
  std::vector<double> x;
  std::vector<double> grad;
};

Evaluated evaluate(const CylinderFunction& F, const GgbmDraw& draw) {
  Evaluated e{cylinder_indices(F, draw.base), std::vector<double>(F.size()), std::vector<double>(F.size())};
  for (std::size_t k = 0; k < F.size(); ++k) {
    const double v = draw.values.at(e.idx[k]);
    if (std::isnan(v)) throw std::domain_error("draw was not observed at cylinder time " + std::to_string(F.times()[k]));
    e.x[k] = v;
  }
  F.gradient(e.x.data(), e.grad.data());
  return e;
}

void check_grid(const CameronMartinElement& h, const GgbmDraw& draw) {
  const TimeGrid& g = draw.coupled.grid;
  if (h.grid.steps() != g.steps() || std::abs(h.grid.horizon() - g.horizon()) > 1e-12 * g.horizon())
    throw std::domain_error("shift direction lives on a different grid than the draw");
}

}  // namespace

double directional_derivative(const CylinderFunction& F, const CameronMartinElement& h, const GgbmDraw& draw) {
  check_grid(h, draw);
  const Evaluated e = evaluate(F, draw);
  double s = 0.0;
  for (std::size_t k = 0; k < F.size(); ++k) s += e.grad[k] * h.h_at(e.idx[k]);
  return s;
}

CameronMartinElement gradient(const CylinderFunction& F, const GgbmDraw& draw) {
  const Evaluated e = evaluate(F, draw);
  const TimeGrid& grid = draw.coupled.grid;
  const std::size_t m = grid.steps();
  std::vector<double> hdot(m, 0.0);
  const bool brownian = !draw.coupling || draw.coupling->hurst().is_brownian();
  for (std::size_t k = 0; k < F.size(); ++k) {
    const std::size_t i = e.idx[k];
    for (std::size_t j = 0; j < i; ++j)
      hdot[j] += e.grad[k] * (brownian ? 1.0 : draw.coupling->kernel_entry(i, j, grid.horizon()));
  }
  if (draw.coupling) return apply_K(*draw.coupling, std::move(hdot), grid);
  return apply_K(HurstParam(0.5), std::move(hdot), grid);
}

double ibp_adjoint(const CylinderFunction& G, const CameronMartinElement& h, const GgbmDraw& draw, double T) {
  check_grid(h, draw);
  const Evaluated e = evaluate(G, draw);
  return -directional_derivative(G, h, draw) + G.value(e.x.data()) * wiener_integral(h.hdot, draw.coupled, T * draw.tau_h);
}

namespace {

IbpReport run_ibp(const CylinderFunction& F, const CylinderFunction& G, const Direction& hdot, const VerifyConfig& cfg,
                  const GgbmSampler* sp, Exec exec) {
  const TimeGrid base(cfg.T, cfg.steps);
  std::vector<std::size_t> rows = cylinder_indices(F, base);
  for (std::size_t i : cylinder_indices(G, base)) rows.push_back(i);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const double T = cfg.T;

  auto lhs_value = [&](const GgbmDraw& d, const CameronMartinElement& h) {
    const Evaluated g = evaluate(G, d);
    return G.value(g.x.data()) * directional_derivative(F, h, d);
  };
  auto rhs_value = [&](const GgbmDraw& d, const CameronMartinElement& h) {
    const Evaluated f = evaluate(F, d);
    return F.value(f.x.data()) * ibp_adjoint(G, h, d, T);
  };

  IbpReport rep;
  rep.paired = cfg.coupled_estimator || hdot.is_zero();
  rep.seed_lhs = detail::side_seed(cfg.seed, 3);
  rep.seed_rhs = rep.paired ? rep.seed_lhs : detail::side_seed(cfg.seed, 4);
  if (rep.paired) {
    const auto stats = run_blocks(cfg.N, rep.seed_lhs, 3, [&](Rng& rng, double* out) {
      const GgbmDraw d = detail::draw_for_verification(cfg, sp, rng, rows);
      const CameronMartinElement h = shift_for_draw(hdot, d, rows);
      out[0] = lhs_value(d, h);
      out[1] = rhs_value(d, h);
      out[2] = out[0] - out[1];
    }, exec);
    rep.lhs = make_report(stats[0], rep.seed_lhs);
    rep.rhs = make_report(stats[1], rep.seed_rhs);
    rep.identity = compare(stats[2].mean, stats[2].std_error());
  } else {
    const auto left = run_blocks(cfg.N, rep.seed_lhs, 1, [&](Rng& rng, double* out) {
      const GgbmDraw d = detail::draw_for_verification(cfg, sp, rng, rows);
      out[0] = lhs_value(d, shift_for_draw(hdot, d, rows));
    }, exec);
    const auto right = run_blocks(cfg.N, rep.seed_rhs, 1, [&](Rng& rng, double* out) {
      const GgbmDraw d = detail::draw_for_verification(cfg, sp, rng, rows);
      out[0] = rhs_value(d, shift_for_draw(hdot, d, rows));
    }, exec);
    rep.lhs = make_report(left[0], rep.seed_lhs);
    rep.rhs = make_report(right[0], rep.seed_rhs);
    rep.identity = compare_independent(rep.lhs, rep.rhs);
  }
  return rep;
}

}  // namespace

IbpReport verify_ibp(const CylinderFunction& F, const CylinderFunction& G, const Direction& hdot,
                     const VerifyConfig& cfg, const GgbmSampler& sampler, Exec exec) {
  detail::check_verify_config(cfg);
  if (cfg.dedicated_gbm) return run_ibp(F, G, hdot, cfg, nullptr, exec);
  if (sampler.base().steps() != cfg.steps || sampler.base().horizon() != cfg.T ||
      sampler.params().alpha() != cfg.params.alpha() || sampler.coupling().scheme() != cfg.scheme)
    throw std::invalid_argument("sampler does not match the verification settings");
  return run_ibp(F, G, hdot, cfg, &sampler, exec);
}

IbpReport verify_ibp(const CylinderFunction& F, const CylinderFunction& G, const Direction& hdot,
                     const VerifyConfig& cfg, Exec exec) {
  detail::check_verify_config(cfg);
  if (cfg.dedicated_gbm) return run_ibp(F, G, hdot, cfg, nullptr, exec);
  const GgbmSampler sampler(cfg.params, TimeGrid(cfg.T, cfg.steps), cfg.scheme, exec);
  return run_ibp(F, G, hdot, cfg, &sampler, exec);
}

double lp_bound(const CylinderFunction& F, const GgbmParams& params, double hdot_norm, double p) {
  const double n = static_cast<double>(F.size());
  const double H = params.hurst().value();
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) s += std::pow(F.sup_partial(i), p) * std::pow(F.times()[i], p * H);
  const double moment = std::exp(std::lgamma(p / 2.0 + 1.0) - std::lgamma(params.beta().value() * p / 2.0 + 1.0));
  return std::pow(n, p - 1.0) * std::pow(hdot_norm, p) * s * moment;
}

}  // namespace greypath
