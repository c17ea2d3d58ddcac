#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "greypath/coupling.hpp"
#include "greypath/cylinder.hpp"
#include "greypath/direction.hpp"
#include "greypath/ggbm.hpp"
#include "greypath/montecarlo.hpp"

namespace greypath {

// Settings shared by the Monte Carlo identity checks.
struct VerifyConfig {
  GgbmParams params{BetaParam(0.5), 1.0};
  double T = 1.0;
  std::size_t steps = 256;
  std::uint64_t N = 100000;
  std::uint64_t seed = 1;
  CouplingScheme scheme = CouplingScheme::Projected;
  // Reuse the same draws for both sides (variance reduction).
  bool coupled_estimator = false;
  // alpha = 1 only: sample the Brownian path directly instead of through a coupling.
  bool dedicated_gbm = false;
};

constexpr std::uint64_t kMinVerifyDraws = 1000;

// Grid indices of the cylinder times on the base grid [0, T] with the given steps.
std::vector<std::size_t> cylinder_indices(const CylinderFunction& F, const TimeGrid& base);

// The direction on the draw's own grid [0, T tau_H], with h at the given rows.
CameronMartinElement shift_for_draw(const Direction& hdot, const GgbmDraw& draw, const std::vector<std::size_t>& rows);

// values[i] + h(t_i tau_H); NaN where either side was not computed.
std::vector<double> shift_values(const GgbmDraw& draw, const CameronMartinElement& h);

// exp(int hdot dW - 1/2 int hdot^2) over [0, T tau_H], read from the
// increments that built the draw.
double rn_density(const CameronMartinElement& h, const GgbmDraw& draw, double T);

struct CmReport {
  MonteCarloReport lhs;      // E[F(X^h)]
  MonteCarloReport rhs;      // E[F(X) density]
  MonteCarloReport density;  // E[density], sampled with the right-hand side
  Comparison identity;
  Comparison density_check;  // against 1
  bool density_positive = true;
  bool paired = false;       // both sides read the same draws
  std::uint64_t seed_lhs = 0, seed_rhs = 0;
  bool pass() const { return identity.pass && density_check.pass && density_positive; }
};

CmReport verify_cm_identity(const CylinderFunction& F, const Direction& hdot, const VerifyConfig& cfg,
                            Exec exec = Exec::Parallel);
// Same, reusing an existing sampler (its base grid and coupling must match cfg).
CmReport verify_cm_identity(const CylinderFunction& F, const Direction& hdot, const VerifyConfig& cfg,
                            const GgbmSampler& sampler, Exec exec = Exec::Parallel);

namespace detail {
void check_verify_config(const VerifyConfig& cfg);
// Draws one path for verification: dedicated gBm or the sampler's subordination path.
GgbmDraw draw_for_verification(const VerifyConfig& cfg, const GgbmSampler* sampler, Rng& rng,
                               const std::vector<std::size_t>& observe);
std::uint64_t side_seed(std::uint64_t seed, int side);
}  // namespace detail

}  // namespace greypath
