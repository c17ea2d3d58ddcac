#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "greypath/montecarlo.hpp"

namespace greypath {

constexpr int kReportSchemaVersion = 1;

// JSON report shared by all subcommands. Keys keep insertion order and no
// timing or thread information is recorded, so equal inputs give equal bytes.
class Report {
 public:
  using Json = nlohmann::ordered_json;

  Report(std::string command, std::uint64_t seed);

  Json& parameters() { return doc_["parameters"]; }
  Json& results() { return doc_["results"]; }

  // A check against a closed form: z = (estimate - expected) / se.
  bool add_statistical_check(const std::string& name, const MonteCarloReport& mc, double expected);
  // A check with an already computed comparison (two-sided estimators).
  bool add_comparison_check(const std::string& name, const Comparison& c, const Json& detail = Json::object());
  // A deterministic check: |value - expected| <= tolerance.
  bool add_tolerance_check(const std::string& name, double value, double expected, double tolerance);
  bool add_flag_check(const std::string& name, bool ok, const Json& detail = Json::object());

  bool pass() const { return pass_; }
  std::string dump() const;

  static Json to_json(const MonteCarloReport& mc);

 private:
  Json& checks() { return doc_["checks"]; }
  Json doc_;
  bool pass_ = true;
};

// printf("%.17g") of a double, the CSV number format.
std::string csv_number(double x);

}  // namespace greypath
