#include "greypath/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "greypath/specfun_detail.hpp"

namespace greypath {

namespace mp = boost::multiprecision;
using mp50 = mp::mpfr_float_50;
using mp100 = mp::mpfr_float_100;

BetaParam::BetaParam(double beta) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("beta must lie in (0, 1), or equal 1 in the degenerate mode; got " +
                            std::to_string(beta));
}

BetaParam BetaParam::degenerate() { return BetaParam(DegenerateTag{}); }

BetaParam make_beta(double beta) { return beta == 1.0 ? BetaParam::degenerate() : BetaParam(beta); }

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn requires x > 0, got " + std::to_string(x));
  return std::tgamma(x);
}

namespace {

std::uint64_t key_of(double b) {
  std::uint64_t k;
  std::memcpy(&k, &b, sizeof k);
  return k;
}

// Coefficient tables are computed once per beta and never modified after
// publication, so readers only need the lock to find the table.
template <class Real>
class CoefficientCache {
 public:
  using Table = std::vector<Real>;
  template <class Build>
  const Table& get(double beta, Build build) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = tables_.find(key_of(beta));
    if (it == tables_.end()) it = tables_.emplace(key_of(beta), std::make_unique<Table>(build(beta))).first;
    return *it->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::uint64_t, std::unique_ptr<Table>> tables_;
};

constexpr double kCrossoverScale = 40.0;  // x* = 40^beta, i.e. x^(1/beta) = 40

// log(40^(beta n) / Gamma(beta n + 1)) falls below this before the Taylor
// table is cut.
constexpr double kTaylorLogFloor = -92.0;

std::vector<mp50> taylor_table(double beta) {
  std::vector<mp50> c;
  const double lx = std::log(kCrossoverScale);
  bool past_peak = false;
  double prev = 0.0;
  for (int n = 0;; ++n) {
    const double bn = beta * n;
    c.push_back(1 / mp::tgamma(mp50(beta) * n + 1));
    const double logterm = bn * lx - std::lgamma(bn + 1.0);
    if (n > 0 && logterm < prev) past_peak = true;
    prev = logterm;
    if (past_peak && logterm < kTaylorLogFloor) break;
  }
  return c;
}

CoefficientCache<mp50>& taylor_cache() {
  static CoefficientCache<mp50> cache;
  return cache;
}

}  // namespace

namespace detail {

double mittag_leffler_taylor(double beta, double x) {
  const auto& c = taylor_cache().get(beta, taylor_table);
  mp50 sum = 0, power = 1;
  const mp50 mx = -mp50(x);
  for (const auto& cn : c) {
    sum += cn * power;
    power *= mx;
  }
  return sum.convert_to<double>();
}

double mittag_leffler_asymptotic(double beta, double x) {
  // Terms x^-k / Gamma(1 - beta k), written through the reflection formula as
  // sin(pi beta k) Gamma(beta k) / pi. The series diverges; it is cut at the
  // smallest value of the envelope Gamma(beta k) x^-k, which does not suffer
  // from the zeros of sin(pi beta k).
  const double lx = std::log(x);
  double sum = 0.0;
  double prev_env = INFINITY;
  for (int k = 1; k <= 400; ++k) {
    const double bk = beta * k;
    const double log_env = std::lgamma(bk) - k * lx;
    if (log_env > prev_env) break;
    prev_env = log_env;
    const double term = boost::math::sin_pi(bk) * std::exp(log_env) / M_PI;
    sum += (k % 2 == 1) ? term : -term;
  }
  return sum;
}

}  // namespace detail

double mittag_leffler_crossover(BetaParam beta) { return std::pow(kCrossoverScale, beta.value()); }

double mittag_leffler(BetaParam beta, double z) {
  if (!(z <= 0.0)) throw std::domain_error("mittag_leffler is defined here for z <= 0, got " + std::to_string(z));
  if (beta.is_degenerate()) return std::exp(z);
  const double x = -z;
  if (x == 0.0) return 1.0;
  if (x <= mittag_leffler_crossover(beta)) return detail::mittag_leffler_taylor(beta.value(), x);
  return detail::mittag_leffler_asymptotic(beta.value(), x);
}

double m_wright_moment(BetaParam beta, double delta) {
  if (!(delta > -1.0)) throw std::domain_error("m_wright_moment requires delta > -1, got " + std::to_string(delta));
  return std::exp(std::lgamma(delta + 1.0) - std::lgamma(beta.value() * delta + 1.0));
}

double m_wright_tail_cutoff(BetaParam beta) {
  const double b = beta.value();
  const double B = (1.0 - b) * std::pow(b, b / (1.0 - b));
  return std::pow(60.0 / B, 1.0 - b);
}

namespace {

void check_mwright_range(BetaParam beta) {
  if (beta.is_degenerate() || beta.value() > kMWrightMaxBeta)
    throw std::out_of_range("m_wright_pdf supports beta <= 0.9, got " + std::to_string(beta.value()));
}

// d_n = sin(pi beta (n+1)) Gamma(beta (n+1)) / (pi n!), so that
// M_beta(tau) = sum_n d_n (-tau)^n. The table runs until the terms are
// negligible at the tail cutoff.
std::vector<mp100> mwright_table(double beta) {
  const double lt = std::log(m_wright_tail_cutoff(BetaParam(beta)));
  std::vector<mp100> d;
  const mp100 pi = boost::math::constants::pi<mp100>();
  const mp100 b = beta;
  mp100 factorial = 1;
  double best = -INFINITY;
  for (int n = 0;; ++n) {
    if (n > 0) factorial *= n;
    const mp100 arg = b * (n + 1);
    d.push_back(mp::sin(pi * arg) * mp::tgamma(arg) / (pi * factorial));
    const double logterm = std::lgamma(beta * (n + 1)) - std::lgamma(n + 1.0) + n * lt;
    best = std::max(best, logterm);
    if (logterm < kTaylorLogFloor && logterm < best - 1.0) break;
  }
  return d;
}

CoefficientCache<mp100>& mwright_cache() {
  static CoefficientCache<mp100> cache;
  return cache;
}

}  // namespace

double m_wright_pdf(BetaParam beta, double tau) {
  check_mwright_range(beta);
  if (!(tau >= 0.0)) throw std::domain_error("m_wright_pdf requires tau >= 0, got " + std::to_string(tau));
  if (tau > m_wright_tail_cutoff(beta)) return 0.0;
  const auto& d = mwright_cache().get(beta.value(), mwright_table);
  mp100 sum = 0, power = 1;
  const mp100 mt = -mp100(tau);
  for (const auto& dn : d) {
    sum += dn * power;
    power *= mt;
  }
  return std::max(0.0, sum.convert_to<double>());
}

double m_wright_expectation(BetaParam beta, const std::function<double(double)>& g, int panels) {
  check_mwright_range(beta);
  if (panels < 1) throw std::invalid_argument("m_wright_expectation needs at least one panel");
  using rule = boost::math::quadrature::gauss<double, 30>;
  const double cut = m_wright_tail_cutoff(beta);
  const double w = cut / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * w;
    total += rule::integrate([&](double t) { return g(t) * m_wright_pdf(beta, t); }, a, a + w);
  }
  return total;
}

}  // namespace greypath
