#include "greypath/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace greypath {

namespace {

double g(Factor f, double x) {
  switch (f) {
    case Factor::One: return 1.0;
    case Factor::Tanh: return std::tanh(x);
    case Factor::Sin: return std::sin(x);
    case Factor::Bump: return std::exp(-0.5 * x * x);
    case Factor::Logistic: return 1.0 / (1.0 + std::exp(-x));
    case Factor::Identity: return x;
  }
  return 0.0;
}

double dg(Factor f, double x) {
  switch (f) {
    case Factor::One: return 0.0;
    case Factor::Tanh: {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    }
    case Factor::Sin: return std::cos(x);
    case Factor::Bump: return -x * std::exp(-0.5 * x * x);
    case Factor::Logistic: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Factor::Identity: return 1.0;
  }
  return 0.0;
}

double sup_g(Factor f) { return f == Factor::Identity ? INFINITY : 1.0; }

double sup_dg(Factor f) {
  switch (f) {
    case Factor::One: return 0.0;
    case Factor::Tanh: return 1.0;
    case Factor::Sin: return 1.0;
    case Factor::Bump: return std::exp(-0.5);  // attained at x = +-1
    case Factor::Logistic: return 0.25;
    case Factor::Identity: return 1.0;
  }
  return 0.0;
}

}  // namespace

Factor parse_factor(const std::string& name) {
  if (name == "one") return Factor::One;
  if (name == "tanh") return Factor::Tanh;
  if (name == "sin") return Factor::Sin;
  if (name == "bump") return Factor::Bump;
  if (name == "logistic") return Factor::Logistic;
  if (name == "x") return Factor::Identity;
  throw std::invalid_argument("unknown cylinder factor '" + name + "' (expected one, tanh, sin, bump, logistic, x)");
}

std::string factor_name(Factor f) {
  switch (f) {
    case Factor::One: return "one";
    case Factor::Tanh: return "tanh";
    case Factor::Sin: return "sin";
    case Factor::Bump: return "bump";
    case Factor::Logistic: return "logistic";
    case Factor::Identity: return "x";
  }
  return "?";
}

CylinderFunction::CylinderFunction(std::vector<double> times, std::vector<Factor> factors, bool allow_unbounded)
    : times_(std::move(times)), factors_(std::move(factors)) {
  if (times_.empty()) throw std::invalid_argument("cylinder function needs at least one time");
  if (factors_.size() == 1 && times_.size() > 1) factors_.assign(times_.size(), factors_.front());
  if (factors_.size() != times_.size()) throw std::invalid_argument("cylinder function needs one factor per time");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] > 0.0) || !std::isfinite(times_[i])) throw std::invalid_argument("cylinder times must be positive");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw std::invalid_argument("cylinder times must be strictly increasing");
  }
  for (Factor f : factors_)
    if (f == Factor::Identity && !allow_unbounded)
      throw std::invalid_argument("factor 'x' is unbounded; it needs the explicit unbounded-f waiver");
  Rng probe(0x243f6a8885a308d3ULL);
  if (finite_difference_mismatch(probe, 8) > 1e-6)
    throw std::logic_error("cylinder gradient disagrees with finite differences");
}

CylinderFunction CylinderFunction::parse(const std::string& factors, std::vector<double> times, bool allow_unbounded) {
  std::vector<Factor> fs;
  std::stringstream in(factors);
  std::string item;
  while (std::getline(in, item, ',')) fs.push_back(parse_factor(item));
  return CylinderFunction(std::move(times), std::move(fs), allow_unbounded);
}

std::string CylinderFunction::describe() const {
  std::ostringstream s;
  s.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    if (i) s << '*';
    s << factor_name(factors_[i]) << "(X(" << times_[i] << "))";
  }
  return s.str();
}

double CylinderFunction::value(const double* x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < size(); ++i) v *= g(factors_[i], x[i]);
  return v;
}

void CylinderFunction::gradient(const double* x, double* grad) const {
  for (std::size_t i = 0; i < size(); ++i) {
    double p = dg(factors_[i], x[i]);
    for (std::size_t k = 0; k < size(); ++k)
      if (k != i) p *= g(factors_[k], x[k]);
    grad[i] = p;
  }
}

double CylinderFunction::sup_partial(std::size_t i) const {
  double s = sup_dg(factors_.at(i));
  if (s == 0.0) return 0.0;
  for (std::size_t k = 0; k < size(); ++k)
    if (k != i) s *= sup_g(factors_[k]);
  return s;
}

double CylinderFunction::finite_difference_mismatch(Rng& rng, int probes) const {
  constexpr double eps = 1e-5;
  std::normal_distribution<double> normal(0.0, 2.0);
  const std::size_t n = size();
  std::vector<double> x(n), grad(n);
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    for (auto& v : x) v = normal(rng);
    gradient(x.data(), grad.data());
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x[i];
      x[i] = xi + eps;
      const double up = value(x.data());
      x[i] = xi - eps;
      const double down = value(x.data());
      x[i] = xi;
      const double fd = (up - down) / (2.0 * eps);
      worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i])));
    }
  }
  return worst;
}

}  // namespace greypath
