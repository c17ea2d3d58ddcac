#include "greypath/coupling.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "greypath/errors.hpp"

namespace greypath {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

bool CameronMartinElement::has_value(std::size_t i) const { return i < h_values.size() && !std::isnan(h_values[i]); }

double CameronMartinElement::h_at(std::size_t i) const {
  if (!has_value(i)) throw std::domain_error("shift h was not computed at grid index " + std::to_string(i));
  return h_values[i];
}

Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd& S, double tol, std::size_t* rank) {
  const Eigen::Index n = S.rows();
  if (S.cols() != n) throw std::domain_error("semidefinite_cholesky needs a square matrix");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double scale = n > 0 ? S.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double floor = tol * scale;
  std::size_t kept = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = S(j, j) - L.row(j).head(j).squaredNorm();
    if (d < -1e-9 * scale)
      throw numeric_error("residual covariance is not positive semidefinite",
                          {{"column", std::to_string(j)}, {"pivot", std::to_string(d)}, {"scale", std::to_string(scale)}});
    if (d <= floor) continue;
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) L(i, j) = (S(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / ljj;
    ++kept;
  }
  if (rank) *rank = kept;
  return L;
}

Coupling::Coupling(HurstParam H, std::size_t steps, CouplingScheme scheme, Exec exec)
    : scheme_(scheme),
      matrix_(build_kernel_matrix(H, TimeGrid(1.0, steps),
                                  scheme == CouplingScheme::Projected ? CellRule::CellAverage : CellRule::Midpoint,
                                  exec)) {
  if (scheme == CouplingScheme::Midpoint || H.is_brownian()) return;
  const auto m = static_cast<Eigen::Index>(steps);
  const TimeGrid& unit = matrix_.grid();
  const Eigen::MatrixXd K = matrix_.matrix().bottomRows(m);
  Eigen::MatrixXd S = -unit.dt() * (K * K.transpose());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k)
      S(i, k) += covariance_rh(H, unit.point(static_cast<std::size_t>(i + 1)), unit.point(static_cast<std::size_t>(k + 1)));
  S = 0.5 * (S + S.transpose()).eval();
  residual_ = semidefinite_cholesky(S, 1e-14, &residual_rank_);
}

double Coupling::kernel_entry(std::size_t i, std::size_t j, double horizon) const {
  return std::pow(horizon, hurst().excess()) * matrix_(i, j);
}

double Coupling::shift_at(std::size_t i, const std::vector<double>& hdot, double horizon) const {
  if (hdot.size() != steps()) throw std::domain_error("hdot length does not match the coupling grid");
  if (i == 0) return 0.0;
  const double scale = std::pow(horizon, hurst().value() + 0.5) / static_cast<double>(steps());
  return scale * matrix_.row_dot(i, hdot.data());
}

CoupledPath sample_coupled(const Coupling& coupling, double horizon, Rng& rng, const std::vector<std::size_t>* observe) {
  const std::size_t m = coupling.steps();
  CoupledPath p{TimeGrid(horizon, m), std::vector<double>(m), std::vector<double>(m + 1), {}};
  NormalSource normal(rng);
  std::vector<double> xi(m);
  for (auto& x : xi) x = normal();
  const double sd = std::sqrt(p.grid.dt());
  p.bm_path[0] = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    p.bm_increments[j] = sd * xi[j];
    p.bm_path[j + 1] = p.bm_path[j] + p.bm_increments[j];
  }
  if (coupling.hurst().is_brownian()) {
    p.fbm_path = p.bm_path;
    return p;
  }
  std::vector<double> eta;
  if (coupling.has_residual()) {
    eta.resize(m);
    for (auto& x : eta) x = normal();
  }
  const double scale = std::pow(horizon, coupling.hurst().value());
  const double unit_sd = std::sqrt(1.0 / static_cast<double>(m));
  const KernelMatrix& K = coupling.unit_matrix();
  const KernelMatrix::Matrix& L = coupling.residual_factor();
  auto value_at = [&](std::size_t i) {
    if (i == 0) return 0.0;
    double v = unit_sd * K.row_dot(i, xi.data());
    if (!eta.empty()) {
      const double* row = L.data() + (i - 1) * m;
      double r = 0.0;
      for (std::size_t k = 0; k < i; ++k) r += row[k] * eta[k];
      v += r;
    }
    return scale * v;
  };
  if (observe) {
    p.fbm_path.assign(m + 1, kNaN);
    for (std::size_t i : *observe) {
      if (i > m) throw std::domain_error("observed index beyond the grid");
      p.fbm_path[i] = value_at(i);
    }
  } else {
    p.fbm_path.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) p.fbm_path[i] = value_at(i);
  }
  return p;
}

namespace {

double riemann_norm_sq(const std::vector<double>& hdot, double dt) {
  double s = 0.0;
  for (double v : hdot) s += v * v;
  return s * dt;
}

void check_hdot(const std::vector<double>& hdot, const TimeGrid& grid) {
  if (hdot.size() != grid.steps())
    throw std::domain_error("hdot has " + std::to_string(hdot.size()) + " cells, grid has " + std::to_string(grid.steps()));
}

}  // namespace

CameronMartinElement apply_K(const Coupling& coupling, std::vector<double> hdot, const TimeGrid& grid,
                             const std::vector<std::size_t>* rows) {
  if (grid.steps() != coupling.steps()) throw std::domain_error("grid does not match the coupling step count");
  check_hdot(hdot, grid);
  CameronMartinElement e{grid, std::move(hdot), {}, 0.0};
  const std::size_t m = grid.steps();
  e.norm_sq = riemann_norm_sq(e.hdot, grid.dt());
  if (rows) {
    e.h_values.assign(m + 1, kNaN);
    e.h_values[0] = 0.0;
    for (std::size_t i : *rows) {
      if (i > m) throw std::domain_error("requested index beyond the grid");
      e.h_values[i] = coupling.shift_at(i, e.hdot, grid.horizon());
    }
  } else {
    e.h_values.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) e.h_values[i] = coupling.shift_at(i, e.hdot, grid.horizon());
  }
  return e;
}

CameronMartinElement apply_K(HurstParam H, std::vector<double> hdot, const TimeGrid& grid) {
  check_hdot(hdot, grid);
  CameronMartinElement e{grid, std::move(hdot), std::vector<double>(grid.steps() + 1, 0.0), 0.0};
  const double dt = grid.dt();
  e.norm_sq = riemann_norm_sq(e.hdot, dt);
  if (H.is_brownian()) {
    // Same accumulation order and scaling as Coupling::shift_at, so both
    // routes agree bit for bit.
    double s = 0.0;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      s += e.hdot[i];
      e.h_values[i + 1] = dt * s;
    }
    return e;
  }
  const KernelMatrix K = build_kernel_matrix(H, grid, CellRule::CellAverage);
  for (std::size_t i = 1; i <= grid.steps(); ++i) e.h_values[i] = dt * K.row_dot(i, e.hdot.data());
  return e;
}

CameronMartinElement apply_K(HurstParam H, const std::function<double(double)>& hdot, const TimeGrid& grid) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  const std::size_t m = grid.steps();
  CameronMartinElement e{grid, std::vector<double>(m), std::vector<double>(m + 1, 0.0), 0.0};
  for (std::size_t j = 0; j < m; ++j) e.hdot[j] = rule::integrate(hdot, grid.point(j), grid.point(j + 1)) / grid.dt();
  e.norm_sq = riemann_norm_sq(e.hdot, grid.dt());
  for (std::size_t i = 1; i <= m; ++i) {
    const double t = grid.point(i);
    auto f = [&](double r) { return r > 0.0 && r < t ? kernel_kh(H, t, r, KernelMethod::Series) * hdot(r) : 0.0; };
    e.h_values[i] = H.is_brownian() ? rule::integrate(hdot, 0.0, t) : ts.integrate(f, 0.0, t, 1e-12);
  }
  return e;
}

namespace {

std::size_t cells_upto(const TimeGrid& grid, double upto) {
  if (!(upto >= 0.0) || upto > grid.horizon() * (1.0 + 1e-12))
    throw std::domain_error("time " + std::to_string(upto) + " lies beyond the grid horizon " +
                            std::to_string(grid.horizon()));
  return grid.index_of(upto);
}

}  // namespace

double wiener_integral(const std::vector<double>& hdot, const CoupledPath& path, double upto) {
  check_hdot(hdot, path.grid);
  const std::size_t k = cells_upto(path.grid, upto);
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += hdot[j] * path.bm_increments[j];
  return s;
}

double wiener_integral(const CameronMartinElement& h, const CoupledPath& path, double upto) {
  return wiener_integral(h.hdot, path, upto);
}

double exp_martingale(const std::vector<double>& hdot, const CoupledPath& path, double t) {
  const double w = wiener_integral(hdot, path, t);
  const std::size_t k = path.grid.index_of(t);
  double q = 0.0;
  for (std::size_t j = 0; j < k; ++j) q += hdot[j] * hdot[j];
  return std::exp(w - 0.5 * q * path.grid.dt());
}

double exp_martingale(const CameronMartinElement& h, const CoupledPath& path, double t) {
  return exp_martingale(h.hdot, path, t);
}

}  // namespace greypath
