#pragma once

#include <string>
#include <vector>

#include "greypath/rng.hpp"

namespace greypath {

// One-variable building blocks. All but Identity are bounded with bounded
// derivatives; Identity is only accepted behind an explicit waiver.
enum class Factor { One, Tanh, Sin, Bump, Logistic, Identity };

Factor parse_factor(const std::string& name);
std::string factor_name(Factor f);

// F = f(X(t_1), ..., X(t_n)) with f(x) = prod_i g_i(x_i).
class CylinderFunction {
 public:
  CylinderFunction(std::vector<double> times, std::vector<Factor> factors, bool allow_unbounded = false);
  // "tanh", or one name per time separated by commas; a single name is used for every time.
  static CylinderFunction parse(const std::string& factors, std::vector<double> times, bool allow_unbounded = false);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return times_.size(); }
  std::string describe() const;

  double value(const double* x) const;
  // Partial derivatives into grad[0..n).
  void gradient(const double* x, double* grad) const;
  // sup |d f / d x_i|; infinite when an unbounded factor is involved.
  double sup_partial(std::size_t i) const;

  // Largest mismatch between gradient() and central differences with step
  // 1e-5, relative to max(1, |partial|), over random probe points.
  double finite_difference_mismatch(Rng& rng, int probes = 16) const;

 private:
  std::vector<double> times_;
  std::vector<Factor> factors_;
};

}  // namespace greypath
