#pragma once

#include "greypath/cameron_martin.hpp"
#include "greypath/coupling.hpp"
#include "greypath/cylinder.hpp"
#include "greypath/direction.hpp"
#include "greypath/ggbm.hpp"
#include "greypath/montecarlo.hpp"

namespace greypath {

// Inner product in the Cameron-Martin space: sum_j a_j b_j dt over the hdot parts.
double cm_inner_product(const CameronMartinElement& a, const CameronMartinElement& b);

// sum_i d_i f(X(t_1), ...) h(t_i tau_H).
double directional_derivative(const CylinderFunction& F, const CameronMartinElement& h, const GgbmDraw& draw);

// The element whose hdot part is sum_i d_i f(...) K_H(t_i tau_H, .) on the
// draw's grid (the indicator of [0, t_i tau) when H = 1/2), so that
// cm_inner_product(gradient(F, draw), h) = directional_derivative(F, h, draw).
CameronMartinElement gradient(const CylinderFunction& F, const GgbmDraw& draw);

// -directional_derivative(G, h) + G * int_0^{T tau_H} hdot dW.
double ibp_adjoint(const CylinderFunction& G, const CameronMartinElement& h, const GgbmDraw& draw, double T);

struct IbpReport {
  MonteCarloReport lhs;  // E[G d_h F]
  MonteCarloReport rhs;  // E[F d*_h G]
  Comparison identity;
  bool paired = false;
  std::uint64_t seed_lhs = 0, seed_rhs = 0;
  bool pass() const { return identity.pass; }
};

IbpReport verify_ibp(const CylinderFunction& F, const CylinderFunction& G, const Direction& hdot,
                     const VerifyConfig& cfg, Exec exec = Exec::Parallel);
IbpReport verify_ibp(const CylinderFunction& F, const CylinderFunction& G, const Direction& hdot,
                     const VerifyConfig& cfg, const GgbmSampler& sampler, Exec exec = Exec::Parallel);

// Closed-form bound on E|d_h F|^p:
// n^(p-1) ||hdot||^p sum_i ||d_i f||^p t_i^(pH) Gamma(p/2 + 1) / Gamma(beta p/2 + 1).
double lp_bound(const CylinderFunction& F, const GgbmParams& params, double hdot_norm, double p);

}  // namespace greypath
