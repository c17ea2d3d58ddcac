#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "greypath/rng.hpp"

namespace greypath {

class HurstParam {
 public:
  explicit HurstParam(double H);
  double value() const noexcept { return H_; }
  // a = H - 1/2, the exponent that appears throughout the kernel.
  double excess() const noexcept { return H_ - 0.5; }
  bool is_brownian() const noexcept { return H_ == 0.5; }

 private:
  double H_;
};

// Uniform grid 0 = t_0 < t_1 < ... < t_m = horizon.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);
  // Accepts an explicit point list; anything that is not uniform from 0 is rejected.
  static TimeGrid from_points(const std::vector<double>& points);

  std::size_t steps() const noexcept { return steps_; }
  double horizon() const noexcept { return horizon_; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  double point(std::size_t i) const noexcept { return horizon_ * static_cast<double>(i) / static_cast<double>(steps_); }
  double midpoint(std::size_t j) const noexcept { return horizon_ * (static_cast<double>(j) + 0.5) / static_cast<double>(steps_); }
  std::vector<double> points() const;
  TimeGrid scaled(double factor) const { return TimeGrid(horizon_ * factor, steps_); }

  // Index i with point(i) == t up to rounding; std::domain_error if t is not a grid point.
  std::size_t index_of(double t) const;

 private:
  double horizon_;
  std::size_t steps_;
};

enum class Exec { Serial, Parallel };

double covariance_rh(HurstParam H, double t, double s);

// Normalizing constant of K_H, sqrt(H(2H-1) / B(2-2H, H-1/2)); 1 for H = 1/2.
double kernel_constant(HurstParam H);

enum class KernelMethod {
  Quadrature,  // substitution u = r + (t-r) v^(1/a), Gauss-Legendre 64 on graded panels
  Series,      // closed form through 2F1(-a, 1; a+1; 1 - r/t)
};

// K_H(t, r) for 0 < r; zero for r > t; the indicator of (0, t] when H = 1/2.
double kernel_kh(HurstParam H, double t, double r, KernelMethod method = KernelMethod::Quadrature);

// Integral of K_H(t, r) dr over [r0, r1] with 0 <= r0 <= r1.
double kernel_integral(HurstParam H, double t, double r0, double r1);

// Integral of K_H(t, r) K_H(s, r) dr over (0, t ^ s], by tanh-sinh quadrature.
double kernel_inner_product(HurstParam H, double t, double s, KernelMethod method = KernelMethod::Quadrature);

enum class CellRule {
  Midpoint,     // K_H(t_i, midpoint of cell j)
  CellAverage,  // average of K_H(t_i, r) over cell j
};

// Rows are time points t_0..t_m, columns are cells; entry (i, j) is zero unless
// cell j lies below t_i.
class KernelMatrix {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  KernelMatrix(HurstParam H, TimeGrid grid, CellRule rule, Matrix data);

  HurstParam hurst() const noexcept { return H_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  CellRule rule() const noexcept { return rule_; }
  const Matrix& matrix() const noexcept { return data_; }
  double operator()(std::size_t i, std::size_t j) const { return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

  // Values at all grid points of sum_j K(i, j) dB_j.
  Eigen::VectorXd apply(const Eigen::VectorXd& increments) const;
  // Row i dotted with v (length m).
  double row_dot(std::size_t i, const double* v) const;

  // Header row cell_0..cell_{m-1}, then one row per time point.
  void write_csv(std::ostream& out) const;

 private:
  HurstParam H_;
  TimeGrid grid_;
  CellRule rule_;
  Matrix data_;
};

KernelMatrix build_kernel_matrix(HurstParam H, const TimeGrid& grid, CellRule rule = CellRule::Midpoint,
                                 Exec exec = Exec::Parallel);

// Exact Gaussian sampler from the covariance R_H on the grid points t_1..t_m.
class CholeskySampler {
 public:
  static constexpr std::size_t kDefaultCap = 4096;
  CholeskySampler(HurstParam H, const TimeGrid& grid, std::size_t cap = kDefaultCap);

  // Values at t_0..t_m; entry 0 is 0.
  Eigen::VectorXd sample(Rng& rng) const;
  const TimeGrid& grid() const noexcept { return grid_; }
  bool jittered() const noexcept { return jittered_; }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd lower_;
  bool jittered_ = false;
};

Eigen::VectorXd fbm_sample_cholesky(HurstParam H, const TimeGrid& grid, Rng& rng,
                                    std::size_t cap = CholeskySampler::kDefaultCap);

}  // namespace greypath
