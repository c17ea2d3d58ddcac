// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "greypath/cameron_martin.hpp"
#include "greypath/cli.hpp"
#include "greypath/malliavin.hpp"
#include "greypath/specfun.hpp"

using namespace greypath;
using nlohmann::json;

namespace {

// Pinned tolerances and budgets.
constexpr double kKernelTol = 1e-6;
constexpr double kExpTol = 1e-12;
constexpr double kErfcTol = 1e-9;
constexpr double kRieszTol = 1e-8;
constexpr double kSigma = 3.0;
constexpr std::uint64_t kDraws = 100000;
constexpr std::size_t kSteps = 256;  // step 2^-8 on [0, 1]
constexpr int kMinPassing = 17;      // of 18 configurations

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct CliRun {
  int code = -1;
  std::string text;
  json doc;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "greypath");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.text = out.str();
  if (!r.text.empty()) r.doc = json::parse(r.text);
  if (r.code != 0 && !err.str().empty()) std::cerr << err.str();
  return r;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string failed_checks(const json& doc) {
  std::string s;
  for (const auto& c : doc["checks"])
    if (!c["pass"].get<bool>()) s += " " + c["name"].get<std::string>();
  return s;
}

const std::vector<std::pair<double, double>> kBattery{{0.5, 1.0}, {0.5, 1.5}, {0.7, 1.8}};
const std::vector<std::string> kDirections{"const:1", "ramp:1"};

std::vector<GgbmSampler> battery_samplers(std::size_t steps) {
  std::vector<GgbmSampler> s;
  for (auto [b, a] : kBattery) s.emplace_back(GgbmParams(BetaParam(b), a), TimeGrid(1.0, steps));
  return s;
}

VerifyConfig battery_config(std::size_t k, std::uint64_t seed) {
  VerifyConfig c;
  c.params = GgbmParams(BetaParam(kBattery[k].first), kBattery[k].second);
  c.T = 1.0;
  c.steps = kSteps;
  c.N = kDraws;
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  double worst = 0.0;
  bool ok = true;
  for (const char* H : {"0.55", "0.7", "0.85"}) {
    const CliRun r = cli({"kernel-check", "--H", H});
    ok = ok && r.code == 0;
    worst = std::max(worst, r.doc["results"]["max_abs_error"].get<double>());
  }
  ok = ok && worst <= kKernelTol;
  return {ok, "max |int K K - R_H| over 16 pairs x 3 H = " + fmt("%.3g", worst) + " (tol 1e-6)"};
}

Outcome criterion_2() {
  double e1 = 0.0, e2 = 0.0;
  const BetaParam one = BetaParam::degenerate(), half(0.5);
  for (int k = 0; k <= 1000; ++k) {
    const double x = 0.01 * k;
    e1 = std::max(e1, std::abs(mittag_leffler(one, -x) - std::exp(-x)));
    e2 = std::max(e2, std::abs(mittag_leffler(half, -x) - std::exp(x * x) * std::erfc(x)));
  }
  return {e1 <= kExpTol && e2 <= kErfcTol,
          "max |E_1(-x) - e^-x| = " + fmt("%.3g", e1) + ", max |E_1/2(-x) - e^x^2 erfc x| = " + fmt("%.3g", e2) +
              " on 1001 points of [0, 10]"};
}

Outcome criterion_3() {
  bool ok = true;
  std::string detail = "9 checks per beta:";
  for (const char* b : {"0.3", "0.5", "0.7"}) {
    const CliRun r = cli({"sample-subordinator", "--beta", b, "--N", std::to_string(kDraws), "--seed", "1"});
    double zmax = 0.0;
    for (const auto& c : r.doc["checks"]) zmax = std::max(zmax, std::abs(c["z"].get<double>()));
    ok = ok && r.code == 0;
    detail += std::string(" beta ") + b + " max|z| " + fmt("%.2f", zmax) + (r.code == 0 ? "" : " failed:" + failed_checks(r.doc));
  }
  return {ok, detail};
}

std::vector<std::string> simulate_args(std::size_t steps, std::uint64_t seed) {
  return {"simulate", "--beta", "0.5", "--alpha", "1.5", "--T", "1", "--steps", std::to_string(steps),
          "--N", std::to_string(kDraws), "--seed", std::to_string(seed)};
}

Outcome criterion_4() {
  const CliRun a = cli(simulate_args(kSteps, 1));
  const CliRun b = cli(simulate_args(2 * kSteps, 2));
  const json& ca = a.doc["results"]["covariance"];
  const json& cb = b.doc["results"]["covariance"];
  const double exact = ca["closed_form"].get<double>();
  const double b8 = ca["estimate"].get<double>() - exact, s8 = ca["std_error"].get<double>();
  const double b9 = cb["estimate"].get<double>() - exact, s9 = cb["std_error"].get<double>();
  // A bias that halves with the step: b9 - b8/2 is zero up to sampling noise.
  const double halving_z = (b9 - 0.5 * b8) / std::sqrt(s9 * s9 + 0.25 * s8 * s8);
  bool cov_fine = false;
  for (const auto& c : b.doc["checks"])
    if (c["name"] == "covariance") cov_fine = c["pass"].get<bool>();
  const bool ok = a.code == 0 && cov_fine && std::abs(halving_z) <= kSigma;
  std::string detail = "2nd/4th moment, covariance, increment cf at step 2^-8:";
  for (const auto& c : a.doc["checks"]) detail += " " + fmt("%.2f", c["z"].get<double>());
  detail += "; covariance bias 2^-8 " + fmt("%.2g", b8) + ", 2^-9 " + fmt("%.2g", b9) + ", halving z " +
            fmt("%.2f", halving_z);
  if (a.code != 0) detail += "; failed:" + failed_checks(a.doc);
  return {ok, detail};
}

Outcome criterion_5() {
  const auto samplers = battery_samplers(kSteps);
  const std::vector<CylinderFunction> Fs{CylinderFunction::parse("tanh", {0.5}),
                                         CylinderFunction::parse("sin,tanh", {0.5, 1.0}),
                                         CylinderFunction::parse("bump,logistic", {0.5, 1.0})};
  int identity = 0, density = 0, total = 0;
  double zmax = 0.0;
  for (std::size_t k = 0; k < kBattery.size(); ++k)
    for (const auto& h : kDirections)
      for (const auto& F : Fs) {
        const VerifyConfig cfg = battery_config(k, 100 + static_cast<std::uint64_t>(total));
        const CmReport r = verify_cm_identity(F, Direction::parse(h), cfg, samplers[k]);
        identity += r.identity.pass;
        density += r.density_check.pass && r.density_positive;
        zmax = std::max(zmax, std::abs(r.identity.z));
        ++total;
      }
  return {identity >= kMinPassing && density == total,
          "identity within 3 SE in " + std::to_string(identity) + "/" + std::to_string(total) +
              " (need 17), E[density] = 1 within 3 SE in " + std::to_string(density) + "/" + std::to_string(total) +
              ", max|z| " + fmt("%.2f", zmax)};
}

Outcome criterion_6() {
  const auto samplers = battery_samplers(kSteps);
  const std::vector<std::pair<CylinderFunction, CylinderFunction>> pairs{
      {CylinderFunction::parse("tanh", {0.5}), CylinderFunction::parse("sin", {1.0})},
      {CylinderFunction::parse("sin,tanh", {0.5, 1.0}), CylinderFunction::parse("bump", {0.5})},
      {CylinderFunction::parse("bump,logistic", {0.5, 1.0}), CylinderFunction::parse("tanh,sin", {0.5, 1.0})}};
  int passing = 0, total = 0;
  double zmax = 0.0;
  for (std::size_t k = 0; k < kBattery.size(); ++k)
    for (const auto& h : kDirections)
      for (const auto& [F, G] : pairs) {
        const VerifyConfig cfg = battery_config(k, 200 + static_cast<std::uint64_t>(total));
        const IbpReport r = verify_ibp(F, G, Direction::parse(h), cfg, samplers[k]);
        passing += r.pass();
        zmax = std::max(zmax, std::abs(r.identity.z));
        ++total;
      }
  return {passing >= kMinPassing, "IbP identity within 3 SE in " + std::to_string(passing) + "/" + std::to_string(total) +
                                      " (need 17), max|z| " + fmt("%.2f", zmax)};
}

Outcome criterion_7() {
  const auto samplers = battery_samplers(64);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Factor bounded[] = {Factor::Tanh, Factor::Sin, Factor::Bump, Factor::Logistic};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const GgbmSampler& s = samplers[static_cast<std::size_t>(trial) % samplers.size()];
    const std::size_t n = 1 + gen() % 3;
    std::vector<double> times;
    std::vector<Factor> factors;
    for (std::size_t k = 0; k < n; ++k) {
      times.push_back(static_cast<double>(1 + gen() % 64) / 64.0);
      factors.push_back(bounded[gen() % 4]);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    factors.resize(times.size());
    const CylinderFunction F(times, factors);
    const std::vector<std::size_t> rows = cylinder_indices(F, s.base());
    Rng rng = make_stream(7, static_cast<std::uint64_t>(trial));
    const GgbmDraw d = sample_ggbm(s, rng, &rows);
    std::vector<double> hdot(s.base().steps());
    for (double& v : hdot) v = u(gen);
    const CameronMartinElement h = apply_K(s.coupling(), hdot, d.coupled.grid, &rows);
    const double lhs = cm_inner_product(gradient(F, d), h);
    const double rhs = directional_derivative(F, h, d);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return {worst <= kRieszTol, "max relative |(grad F, h) - d_h F| over 100 triples = " + fmt("%.3g", worst)};
}

// E|d_h F|^p for p = 1, 2, 4 as %.17g text, for the reproducibility rerun.
struct LpResult {
  bool pass = true;
  double worst_ratio = 0.0;
  std::string text;
};

LpResult lp_battery() {
  const auto samplers = battery_samplers(kSteps);
  const std::vector<CylinderFunction> Fs{CylinderFunction::parse("tanh", {1.0}),
                                         CylinderFunction::parse("sin,tanh", {0.5, 1.0})};
  const Direction dir = Direction::parse("const:1");
  const double ps[] = {1.0, 2.0, 4.0};
  LpResult out;
  std::uint64_t seed = 300;
  for (std::size_t k = 0; k < samplers.size(); ++k)
    for (const auto& F : Fs) {
      const std::vector<std::size_t> rows = cylinder_indices(F, samplers[k].base());
      const auto stats = run_blocks(kDraws, seed++, 3, [&](Rng& rng, double* o) {
        const GgbmDraw d = sample_ggbm(samplers[k], rng, &rows);
        const double dd = std::abs(directional_derivative(F, shift_for_draw(dir, d, rows), d));
        for (int i = 0; i < 3; ++i) o[i] = std::pow(dd, ps[i]);
      });
      for (int i = 0; i < 3; ++i) {
        const double bound = lp_bound(F, samplers[k].params(), std::sqrt(dir.norm_sq()), ps[i]);
        out.pass = out.pass && stats[i].mean - kSigma * stats[i].std_error() <= bound;
        out.worst_ratio = std::max(out.worst_ratio, stats[i].mean / bound);
        out.text += fmt("%.17g", stats[i].mean) + "," + fmt("%.17g", stats[i].std_error()) + "\n";
      }
    }
  return out;
}

LpResult g_lp;

Outcome criterion_8() {
  g_lp = lp_battery();
  return {g_lp.pass, "E|d_h F|^p <= bound + 3 SE for p in {1,2,4}, 3 parameter sets x 2 F; largest mean/bound = " +
                         fmt("%.3f", g_lp.worst_ratio)};
}

Outcome criterion_9() {
  struct Case {
    const char* name;
    std::vector<std::string> args;
  };
  std::vector<Case> cases{
      {"kernel-check", {"kernel-check", "--H", "0.7"}},
      {"sample-subordinator", {"sample-subordinator", "--beta", "0.3", "--N", std::to_string(kDraws)}},
      {"simulate", simulate_args(kSteps, 1)},
      {"verify-cm", {"verify-cm", "--beta", "0.7", "--alpha", "1.8", "--N", std::to_string(kDraws), "--hdot", "ramp:1",
                     "--f", "sin,tanh", "--times", "0.5,1", "--seed", "5"}},
      {"verify-ibp", {"verify-ibp", "--beta", "0.5", "--alpha", "1.5", "--N", std::to_string(kDraws), "--f", "tanh",
                      "--g", "sin", "--times", "1", "--seed", "6"}},
  };
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    auto with = [&](const char* threads) {
      std::vector<std::string> a = c.args;
      a.insert(a.begin(), {"--threads", threads});
      return cli(a).text;
    };
    const std::string one = with("1"), four = with("4");
    const bool same = !one.empty() && one == four;
    ok = ok && same;
    detail += std::string(" ") + c.name + (same ? " identical" : " DIFFER");
  }
  omp_set_num_threads(3);
  const std::string lp3 = lp_battery().text;
  const bool lp_same = lp3 == g_lp.text;
  ok = ok && lp_same;
  detail += std::string(", L^p battery") + (lp_same ? " identical" : " DIFFER");
  return {ok, "reports at 1 vs 4 workers:" + detail};
}

}  // namespace

// Arguments, if any, select criteria by number.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* title;
    double budget_s;  // <= 0: no runtime limit
    std::function<Outcome()> run;
  };
  const Criterion list[] = {
      {1, "kernel reproduction", 10, criterion_1},
      {2, "Mittag-Leffler identities", 1, criterion_2},
      {3, "subordinator law", 30, criterion_3},
      {4, "ggBm statistics", 300, criterion_4},
      {5, "Cameron-Martin identity", 900, criterion_5},
      {6, "integration by parts", 900, criterion_6},
      {7, "Riesz representation", 5, criterion_7},
      {8, "L^p bound", 120, criterion_8},
      {9, "reproducibility across worker counts", 0, criterion_9},
  };
  omp_set_num_threads(omp_get_num_procs());
  bool all = true;
  for (const Criterion& c : list) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("criterion %d %s: %s | %s | %.1f s", c.id, c.title, pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    if (c.budget_s > 0) std::printf(" (limit %.0f s%s)", c.budget_s, in_time ? "" : ", exceeded");
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
