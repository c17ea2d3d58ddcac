#include "greypath/report.hpp"

#include <cmath>
#include <cstdio>

namespace greypath {

Report::Report(std::string command, std::uint64_t seed) {
  doc_["schema_version"] = kReportSchemaVersion;
  doc_["command"] = std::move(command);
  doc_["parameters"] = Json::object();
  doc_["seed"] = seed;
  doc_["rng"] = {{"engine", "mt19937_64"},
                 {"stream_derivation", "stream b = mt19937_64(seed ^ splitmix64(b))"},
                 {"block_size", kBlockSize}};
  doc_["results"] = Json::object();
  doc_["checks"] = Json::array();
}

Report::Json Report::to_json(const MonteCarloReport& mc) {
  return {{"estimate", mc.estimate}, {"std_error", mc.std_error}, {"ci95", {mc.ci_low, mc.ci_high}},
          {"samples", mc.samples},   {"seed", mc.seed}};
}

bool Report::add_statistical_check(const std::string& name, const MonteCarloReport& mc, double expected) {
  const Comparison c = compare(mc.estimate - expected, mc.std_error);
  return add_comparison_check(name, c, {{"estimate", mc.estimate}, {"expected", expected}});
}

bool Report::add_comparison_check(const std::string& name, const Comparison& c, const Json& detail) {
  Json entry = {{"name", name}, {"kind", "z-test"}};
  for (auto it = detail.begin(); it != detail.end(); ++it) entry[it.key()] = it.value();
  entry["difference"] = c.difference;
  entry["std_error"] = c.pooled_se;
  entry["z"] = c.z;
  entry["threshold"] = kZThreshold;
  entry["pass"] = c.pass;
  checks().push_back(std::move(entry));
  pass_ = pass_ && c.pass;
  return c.pass;
}

bool Report::add_tolerance_check(const std::string& name, double value, double expected, double tolerance) {
  const double err = std::abs(value - expected);
  const bool ok = err <= tolerance;
  checks().push_back({{"name", name},   {"kind", "tolerance"}, {"value", value}, {"expected", expected},
                      {"abs_error", err}, {"tolerance", tolerance}, {"pass", ok}});
  pass_ = pass_ && ok;
  return ok;
}

bool Report::add_flag_check(const std::string& name, bool ok, const Json& detail) {
  Json entry = {{"name", name}, {"kind", "flag"}};
  for (auto it = detail.begin(); it != detail.end(); ++it) entry[it.key()] = it.value();
  entry["pass"] = ok;
  checks().push_back(std::move(entry));
  pass_ = pass_ && ok;
  return ok;
}

std::string Report::dump() const {
  Json out = doc_;
  out["pass"] = pass_;
  return out.dump(2) + "\n";
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace greypath
