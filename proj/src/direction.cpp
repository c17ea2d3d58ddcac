#include "greypath/direction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace greypath {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(what + ": '" + text + "' is not a finite number");
  return v;
}

void check_cut(double cut) {
  if (!(cut > 0.0) || !std::isfinite(cut)) throw std::invalid_argument("hdot support end must be positive and finite");
}

}  // namespace

Direction Direction::constant(double c, double cut) {
  check_cut(cut);
  std::ostringstream s;
  s.precision(17);
  s << "const:" << c;
  Direction d(Kind::Constant, s.str());
  d.coef_ = c;
  d.cut_ = cut;
  return d;
}

Direction Direction::ramp(double a, double cut) {
  check_cut(cut);
  std::ostringstream s;
  s.precision(17);
  s << "ramp:" << a;
  Direction d(Kind::Ramp, s.str());
  d.coef_ = a;
  d.cut_ = cut;
  return d;
}

Direction Direction::table(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size())
    throw std::invalid_argument("hdot table needs at least two rows of (t, value)");
  if (knots.front() < 0.0) throw std::invalid_argument("hdot table times must be non-negative");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1])) throw std::invalid_argument("hdot table times must be strictly increasing");
  Direction d(Kind::Table, "table");
  d.knots_ = std::move(knots);
  d.values_ = std::move(values);
  d.cut_ = d.knots_.back();
  return d;
}

Direction Direction::parse(const std::string& spec, double cut) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("hdot spec '" + spec + "' must look like kind:argument");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "const") return constant(parse_number(arg, "hdot const"), cut);
  if (kind == "ramp") return ramp(parse_number(arg, "hdot ramp"), cut);
  if (kind != "table") throw std::invalid_argument("unknown hdot kind '" + kind + "' (expected const, ramp or table)");
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot open hdot table '" + arg + "'");
  std::vector<double> knots, values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("hdot table row '" + line + "' needs two columns");
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (first) {
      first = false;
      // A header row is allowed.
      try {
        parse_number(a, "");
      } catch (const std::invalid_argument&) {
        continue;
      }
    }
    knots.push_back(parse_number(a, "hdot table time"));
    values.push_back(parse_number(b, "hdot table value"));
  }
  Direction d = table(std::move(knots), std::move(values));
  d.spec_ = spec;
  return d;
}

double Direction::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return t >= 0.0 && t <= cut_ ? coef_ : 0.0;
    case Kind::Ramp:
      return t >= 0.0 && t <= cut_ ? coef_ * t : 0.0;
    case Kind::Table: {
      if (t < knots_.front() || t >= knots_.back()) return 0.0;
      const auto k = std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin() - 1;
      return values_[static_cast<std::size_t>(k)];
    }
  }
  return 0.0;
}

double Direction::primitive(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Constant:
      return coef_ * std::min(t, cut_);
    case Kind::Ramp: {
      const double u = std::min(t, cut_);
      return 0.5 * coef_ * u * u;
    }
    case Kind::Table: {
      double s = 0.0;
      for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
        const double lo = knots_[k], hi = std::min(knots_[k + 1], t);
        if (hi <= lo) break;
        s += values_[k] * (hi - lo);
      }
      return s;
    }
  }
  return 0.0;
}

double Direction::integral(double a, double b) const { return primitive(b) - primitive(a); }

std::vector<double> Direction::cell_averages(const TimeGrid& grid) const {
  std::vector<double> out(grid.steps());
  double prev = primitive(0.0);
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    const double lo = grid.point(j), hi = grid.point(j + 1);
    if (lo >= cut_) break;  // zero past the support
    const double next = primitive(hi);
    out[j] = (next - prev) / (hi - lo);
    prev = next;
  }
  return out;
}

double Direction::norm_sq() const {
  switch (kind_) {
    case Kind::Constant:
      return coef_ * coef_ * cut_;
    case Kind::Ramp:
      return coef_ * coef_ * cut_ * cut_ * cut_ / 3.0;
    case Kind::Table: {
      double s = 0.0;
      for (std::size_t k = 0; k + 1 < knots_.size(); ++k) s += values_[k] * values_[k] * (knots_[k + 1] - knots_[k]);
      return s;
    }
  }
  return 0.0;
}

bool Direction::is_zero() const {
  if (kind_ != Kind::Table) return coef_ == 0.0;
  for (std::size_t k = 0; k + 1 < values_.size(); ++k)
    if (values_[k] != 0.0) return false;
  return true;
}

double Direction::support_end() const { return cut_; }

}  // namespace greypath
