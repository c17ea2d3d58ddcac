#pragma once

#include <string>
#include <vector>

#include "greypath/fbm.hpp"

namespace greypath {

// A square-integrable hdot on absolute time, supported on [0, cut]:
//   const:c   hdot(t) = c
//   ramp:a    hdot(t) = a t
//   table:P   rows "t,value" read from the CSV file P; hdot = v_k on
//             [t_k, t_{k+1}), the last row closes the support and its value
//             is ignored. cut does not apply.
class Direction {
 public:
  static Direction parse(const std::string& spec, double cut = 1.0);
  static Direction constant(double c, double cut = 1.0);
  static Direction ramp(double a, double cut = 1.0);
  static Direction table(std::vector<double> knots, std::vector<double> values);

  double operator()(double t) const;
  // Integral of hdot over [a, b].
  double integral(double a, double b) const;
  // Exact cell averages of hdot on the grid.
  std::vector<double> cell_averages(const TimeGrid& grid) const;
  // ||hdot||_2^2 over [0, inf).
  double norm_sq() const;
  bool is_zero() const;
  double support_end() const;
  const std::string& spec() const noexcept { return spec_; }

 private:
  enum class Kind { Constant, Ramp, Table };
  Direction(Kind kind, std::string spec) : kind_(kind), spec_(std::move(spec)) {}
  // Antiderivative of hdot from 0 to t.
  double primitive(double t) const;

  Kind kind_;
  std::string spec_;
  double coef_ = 0.0;
  double cut_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> values_;
};

}  // namespace greypath
