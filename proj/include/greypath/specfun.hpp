#pragma once

#include <functional>

namespace greypath {

// Index of the Mittag-Leffler / M-Wright family. Ordinary values lie in
// (0, 1); beta = 1 exists only through degenerate(), where E_1 = exp and the
// subordinator collapses to the constant 1.
class BetaParam {
 public:
  explicit BetaParam(double beta);
  static BetaParam degenerate();

  double value() const noexcept { return beta_; }
  bool is_degenerate() const noexcept { return beta_ == 1.0; }

 private:
  struct DegenerateTag {};
  explicit BetaParam(DegenerateTag) noexcept : beta_(1.0) {}
  double beta_;
};

// Accepts beta in (0,1), and beta == 1 mapped to the degenerate mode.
BetaParam make_beta(double beta);

double gamma_fn(double x);

// E_beta(z) for real z <= 0.
double mittag_leffler(BetaParam beta, double z);

// Switch point x* between the Taylor and asymptotic branches of E_beta(-x).
double mittag_leffler_crossover(BetaParam beta);

// Gamma(delta + 1) / Gamma(beta * delta + 1), the generalized moments of M_beta.
double m_wright_moment(BetaParam beta, double delta);

constexpr double kMWrightMaxBeta = 0.9;

// Density of M_beta at tau >= 0. Supported for beta <= 0.9; beyond that the
// alternating series needs more precision than is carried and
// std::out_of_range is thrown.
double m_wright_pdf(BetaParam beta, double tau);

// Point past which M_beta(tau) < exp(-60) and is treated as zero.
double m_wright_tail_cutoff(BetaParam beta);

// Integral of g(tau) * M_beta(tau) over [0, inf), by composite Gauss-Legendre
// on [0, m_wright_tail_cutoff].
double m_wright_expectation(BetaParam beta, const std::function<double(double)>& g, int panels = 64);

}  // namespace greypath
