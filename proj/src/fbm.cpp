#include "greypath/fbm.hpp"

#include <Eigen/Cholesky>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "greypath/errors.hpp"

namespace greypath {

HurstParam::HurstParam(double H) : H_(H) {
  if (!(H >= 0.5 && H < 1.0)) throw std::domain_error("Hurst index must lie in [1/2, 1), got " + std::to_string(H));
}

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (steps == 0) throw std::domain_error("time grid needs at least one step");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::domain_error("time grid horizon must be positive and finite, got " + std::to_string(horizon));
}

TimeGrid TimeGrid::from_points(const std::vector<double>& points) {
  if (points.size() < 2) throw std::domain_error("time grid needs at least two points");
  if (points.front() != 0.0) throw std::domain_error("time grid must start at 0");
  TimeGrid grid(points.back(), points.size() - 1);
  const double tol = 1e-12 * grid.horizon();
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) throw std::domain_error("time grid points must be strictly increasing");
    if (std::abs(points[i] - grid.point(i)) > tol) throw std::domain_error("non-uniform time grids are not supported");
  }
  return grid;
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> p(steps_ + 1);
  for (std::size_t i = 0; i <= steps_; ++i) p[i] = point(i);
  return p;
}

std::size_t TimeGrid::index_of(double t) const {
  const double x = t / horizon_ * static_cast<double>(steps_);
  const double k = std::round(x);
  if (!(k >= 0.0 && k <= static_cast<double>(steps_)) || std::abs(x - k) > 1e-9 * std::max(1.0, k))
    throw std::domain_error("time " + std::to_string(t) + " is not a point of the grid");
  return static_cast<std::size_t>(k);
}

double covariance_rh(HurstParam H, double t, double s) {
  if (!(t >= 0.0 && s >= 0.0)) throw std::domain_error("covariance_rh requires non-negative times");
  const double h2 = 2.0 * H.value();
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double kernel_constant(HurstParam H) {
  if (H.is_brownian()) return 1.0;
  const double h = H.value();
  return std::sqrt(h * (2.0 * h - 1.0) / boost::math::beta(2.0 - 2.0 * h, h - 0.5));
}

namespace {

// I(t, r) = integral over [r, t] of u^a (u - r)^(a-1) du, for 0 < r < t.
double kernel_integral_series(double a, double t, double r) {
  const double x = 1.0 - r / t;
  double F;
  if (x <= 0.5) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 400; ++n) {
      term *= (n - a) / (a + 1.0 + n) * x;
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    F = sum;
  } else {
    const double y = r / t;
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 400; ++n) {
      term *= (n - a) / (1.0 - 2.0 * a + n) * y;
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    const double c = std::tgamma(a + 1.0) * std::tgamma(-2.0 * a) / std::tgamma(-a);
    F = 0.5 * sum + c * std::pow(y, 2.0 * a) * std::pow(x, -a);
  }
  return std::pow(t - r, a) * std::pow(t, a) / a * F;
}

double kernel_integral_quadrature(double a, double t, double r) {
  using rule = boost::math::quadrature::gauss<double, 64>;
  const double d = t - r;
  const double inv_a = 1.0 / a;
  auto g = [&](double v) { return std::pow(r + d * std::pow(v, inv_a), a); };
  // The integrand switches from ~r^a to ~d^a v near v0; panels grow
  // geometrically away from that point.
  const double v0 = std::pow(r / d, a);
  double J = 0.0;
  if (v0 >= 1.0) {
    J = rule::integrate(g, 0.0, 1.0);
  } else {
    J = rule::integrate(g, 0.0, v0);
    for (double lo = v0; lo < 1.0;) {
      const double hi = std::min(1.0, 4.0 * lo);
      J += rule::integrate(g, lo, hi);
      lo = hi;
    }
  }
  return std::pow(d, a) / a * J;
}

double kernel_unchecked(HurstParam H, double t, double r, KernelMethod method) {
  if (r > t || r <= 0.0) return 0.0;
  if (H.is_brownian()) return 1.0;
  if (r == t) return 0.0;
  const double a = H.excess();
  const double I = method == KernelMethod::Series ? kernel_integral_series(a, t, r) : kernel_integral_quadrature(a, t, r);
  return kernel_constant(H) * std::pow(r, -a) * I;
}

// One rule per thread: the rule grows its node tables lazily.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

}  // namespace

double kernel_kh(HurstParam H, double t, double r, KernelMethod method) {
  if (!(r > 0.0)) throw std::domain_error("kernel_kh is defined for r > 0, got r = " + std::to_string(r));
  if (!(t >= 0.0)) throw std::domain_error("kernel_kh requires t >= 0");
  return kernel_unchecked(H, t, r, method);
}

double kernel_integral(HurstParam H, double t, double r0, double r1) {
  if (!(r0 >= 0.0 && r1 >= r0)) throw std::domain_error("kernel_integral requires 0 <= r0 <= r1");
  r1 = std::min(r1, t);
  if (!(r1 > r0)) return 0.0;
  if (H.is_brownian()) return r1 - r0;
  auto f = [&](double r) { return kernel_unchecked(H, t, r, KernelMethod::Series); };
  return tanh_sinh_rule().integrate(f, r0, r1, 1e-13);
}

double kernel_inner_product(HurstParam H, double t, double s, KernelMethod method) {
  if (!(t >= 0.0 && s >= 0.0)) throw std::domain_error("kernel_inner_product requires non-negative times");
  const double upper = std::min(t, s);
  if (upper == 0.0) return 0.0;
  if (H.is_brownian()) return upper;
  auto f = [&](double r) { return kernel_unchecked(H, t, r, method) * kernel_unchecked(H, s, r, method); };
  return tanh_sinh_rule().integrate(f, 0.0, upper, 1e-12);
}

KernelMatrix::KernelMatrix(HurstParam H, TimeGrid grid, CellRule rule, Matrix data)
    : H_(H), grid_(grid), rule_(rule), data_(std::move(data)) {}

Eigen::VectorXd KernelMatrix::apply(const Eigen::VectorXd& increments) const {
  if (increments.size() != data_.cols()) throw std::domain_error("increment vector does not match the kernel matrix");
  return data_ * increments;
}

double KernelMatrix::row_dot(std::size_t i, const double* v) const {
  const double* row = data_.data() + i * static_cast<std::size_t>(data_.cols());
  double s = 0.0;
  for (std::size_t j = 0; j < i; ++j) s += row[j] * v[j];
  return s;
}

void KernelMatrix::write_csv(std::ostream& out) const {
  char buf[64];
  for (Eigen::Index j = 0; j < data_.cols(); ++j) out << (j ? "," : "") << "cell_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    for (Eigen::Index j = 0; j < data_.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data_(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

namespace {

double cell_value(HurstParam H, const TimeGrid& grid, CellRule rule, std::size_t i, std::size_t j) {
  if (j >= i) return 0.0;
  if (H.is_brownian()) return 1.0;
  const double t = grid.point(i);
  if (rule == CellRule::Midpoint) return kernel_unchecked(H, t, grid.midpoint(j), KernelMethod::Series);
  const double lo = grid.point(j), hi = grid.point(j + 1);
  // Cells touching r = 0 or r = t carry the endpoint singularities; the rest
  // are analytic at a distance of at least one cell width.
  if (j == 0 || j + 1 == i) return kernel_integral(H, t, lo, hi) / (hi - lo);
  using rule20 = boost::math::quadrature::gauss<double, 20>;
  return rule20::integrate([&](double r) { return kernel_unchecked(H, t, r, KernelMethod::Series); }, lo, hi) /
         (hi - lo);
}

}  // namespace

KernelMatrix build_kernel_matrix(HurstParam H, const TimeGrid& grid, CellRule rule, Exec exec) {
  const auto m = static_cast<Eigen::Index>(grid.steps());
  KernelMatrix::Matrix data = KernelMatrix::Matrix::Zero(m + 1, m);
  if (exec == Exec::Serial) {
    for (Eigen::Index i = 1; i <= m; ++i)
      for (Eigen::Index j = 0; j < i; ++j)
        data(i, j) = cell_value(H, grid, rule, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index i = 1; i <= m; ++i)
      for (Eigen::Index j = 0; j < i; ++j)
        data(i, j) = cell_value(H, grid, rule, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return KernelMatrix(H, grid, rule, std::move(data));
}

CholeskySampler::CholeskySampler(HurstParam H, const TimeGrid& grid, std::size_t cap) : grid_(grid) {
  const std::size_t m = grid.steps();
  if (m > cap)
    throw std::out_of_range("Cholesky sampler grid has " + std::to_string(m) + " steps, cap is " + std::to_string(cap));
  Eigen::MatrixXd R(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k <= i; ++k) R(i, k) = R(k, i) = covariance_rh(H, grid.point(i + 1), grid.point(k + 1));
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * R.diagonal().maxCoeff();
    R.diagonal().array() += jitter;
    llt.compute(R);
    jittered_ = true;
    if (llt.info() != Eigen::Success) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", jitter);
      throw numeric_error("covariance matrix is not positive definite after jitter",
                          {{"H", std::to_string(H.value())},
                           {"steps", std::to_string(m)},
                           {"horizon", std::to_string(grid.horizon())},
                           {"jitter", buf}});
    }
  }
  lower_ = llt.matrixL();
}

Eigen::VectorXd CholeskySampler::sample(Rng& rng) const {
  const auto m = lower_.rows();
  NormalSource normal(rng);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = normal();
  Eigen::VectorXd path(m + 1);
  path(0) = 0.0;
  path.tail(m) = lower_.triangularView<Eigen::Lower>() * z;
  return path;
}

Eigen::VectorXd fbm_sample_cholesky(HurstParam H, const TimeGrid& grid, Rng& rng, std::size_t cap) {
  return CholeskySampler(H, grid, cap).sample(rng);
}

}  // namespace greypath
