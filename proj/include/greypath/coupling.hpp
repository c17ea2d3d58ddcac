#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "greypath/fbm.hpp"
#include "greypath/rng.hpp"

namespace greypath {

// A shift direction on a grid: hdot piecewise constant (one value per cell),
// h = K_H hdot at the grid points, and ||hdot||_2^2 = ||h||^2 in the
// Cameron-Martin space. Entries of h_values that were not requested are NaN.
struct CameronMartinElement {
  TimeGrid grid;
  std::vector<double> hdot;
  std::vector<double> h_values;
  double norm_sq = 0.0;

  bool has_value(std::size_t i) const;
  double h_at(std::size_t i) const;  // throws std::domain_error if not computed
};

enum class CouplingScheme {
  // Cell-averaged kernel on the Brownian increments plus an independent
  // Gaussian residual; exact joint law at the grid points.
  Projected,
  // Midpoint kernel matrix on the increments, no residual.
  Midpoint,
};

// The discretized pair (B, B^H) for a fixed step count. Everything is stored
// for the unit horizon and rescaled per draw: K_H(ct, cr) = c^(H-1/2) K_H(t, r).
class Coupling {
 public:
  Coupling(HurstParam H, std::size_t steps, CouplingScheme scheme = CouplingScheme::Projected,
           Exec exec = Exec::Parallel);

  HurstParam hurst() const noexcept { return matrix_.hurst(); }
  std::size_t steps() const noexcept { return matrix_.grid().steps(); }
  CouplingScheme scheme() const noexcept { return scheme_; }
  const KernelMatrix& unit_matrix() const noexcept { return matrix_; }
  bool has_residual() const noexcept { return residual_.size() > 0; }
  // Lower-triangular factor of the residual covariance on t_1..t_m (unit horizon).
  const KernelMatrix::Matrix& residual_factor() const noexcept { return residual_; }
  std::size_t residual_rank() const noexcept { return residual_rank_; }

  // Value at grid index i of sum_j K(t_i, cell j) hdot_j dt on the grid of the given horizon.
  double shift_at(std::size_t i, const std::vector<double>& hdot, double horizon) const;
  // Kernel row i, rescaled to the given horizon: entries multiply hdot_j dt in shift_at.
  double kernel_entry(std::size_t i, std::size_t j, double horizon) const;

 private:
  CouplingScheme scheme_;
  KernelMatrix matrix_;
  KernelMatrix::Matrix residual_;
  std::size_t residual_rank_ = 0;
};

// Lower-triangular L with L L^T = S for a positive semidefinite S, without
// pivoting. Pivots below tol * max diag(S) are treated as zero and their
// column is dropped; rank receives the number of kept columns.
Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd& S, double tol, std::size_t* rank = nullptr);

// One draw of the pair on a grid. fbm_path holds NaN at indices that were not
// requested; requested entries agree bit for bit with a full draw from the
// same stream state.
struct CoupledPath {
  TimeGrid grid;
  std::vector<double> bm_increments;
  std::vector<double> bm_path;
  std::vector<double> fbm_path;
};

// Consumes m normals for the increments, then m more for the residual when the
// scheme has one.
CoupledPath sample_coupled(const Coupling& coupling, double horizon, Rng& rng,
                           const std::vector<std::size_t>* observe = nullptr);

// h = K_H hdot for piecewise-constant hdot, computed with the coupling's own
// kernel rows so the shift matches the path construction. When rows is given,
// only those grid indices are filled.
CameronMartinElement apply_K(const Coupling& coupling, std::vector<double> hdot, const TimeGrid& grid,
                             const std::vector<std::size_t>* rows = nullptr);

// Standalone form: cell-averaged kernel, all grid points.
CameronMartinElement apply_K(HurstParam H, std::vector<double> hdot, const TimeGrid& grid);

// hdot given as a function; h_values are integrals of K_H(t_i, r) hdot(r) by
// quadrature and hdot holds the cell averages.
CameronMartinElement apply_K(HurstParam H, const std::function<double(double)>& hdot, const TimeGrid& grid);

// Sum of hdot_j dB_j over the cells in [0, upto]; upto must be a grid point.
double wiener_integral(const std::vector<double>& hdot, const CoupledPath& path, double upto);
double wiener_integral(const CameronMartinElement& h, const CoupledPath& path, double upto);

// exp(wiener_integral - 1/2 sum hdot_j^2 dt) over [0, t].
double exp_martingale(const std::vector<double>& hdot, const CoupledPath& path, double t);
double exp_martingale(const CameronMartinElement& h, const CoupledPath& path, double t);

}  // namespace greypath
