#include "greypath/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "greypath/cameron_martin.hpp"
#include "greypath/errors.hpp"
#include "greypath/fbm.hpp"
#include "greypath/ggbm.hpp"
#include "greypath/malliavin.hpp"
#include "greypath/montecarlo.hpp"
#include "greypath/report.hpp"
#include "greypath/specfun.hpp"
#include "greypath/subordinator.hpp"

namespace greypath::cli {

namespace {

// Bad input tied to one option.
struct UsageError : std::invalid_argument {
  UsageError(const std::string& field, const std::string& what) : std::invalid_argument(field + ": " + what) {}
};

template <class F>
auto for_field(const std::string& field, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const numeric_error&) {
    throw;
  } catch (const std::logic_error& e) {
    throw UsageError(field, e.what());
  }
}

std::ofstream open_output(const std::string& field, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError(field, "cannot open " + path + " for writing");
  return f;
}

const std::map<std::string, CouplingScheme> kSchemes{{"projected", CouplingScheme::Projected},
                                                    {"midpoint", CouplingScheme::Midpoint}};

std::string scheme_name(CouplingScheme s) { return s == CouplingScheme::Projected ? "projected" : "midpoint"; }

// Options shared by the Monte Carlo subcommands.
struct ModelOptions {
  double beta = 0.5;
  double alpha = 1.0;
  double T = 1.0;
  std::size_t steps = 256;
  std::uint64_t N = 100000;
  std::uint64_t seed = 1;
  CouplingScheme scheme = CouplingScheme::Projected;

  void add_to(CLI::App& app) {
    app.add_option("--beta", beta, "Mittag-Leffler index beta in (0, 1]")->capture_default_str();
    app.add_option("--alpha", alpha, "alpha = 2H in [1, 2)")->capture_default_str();
    app.add_option("--T", T, "Time horizon")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--steps", steps, "Grid steps on [0, T]")->check(CLI::Range(std::size_t{1}, std::size_t{4096}))
        ->capture_default_str();
    app.add_option("--N", N, "Monte Carlo draws")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", seed, "64-bit master seed")->capture_default_str();
    app.add_option("--scheme", scheme, "Discretization of the kernel coupling")
        ->transform(CLI::CheckedTransformer(kSchemes, CLI::ignore_case))
        ->default_str("projected");
  }

  GgbmParams params() const {
    const BetaParam b = for_field("--beta", [&] { return make_beta(beta); });
    return for_field("--alpha", [&] { return GgbmParams(b, alpha); });
  }

  void describe(Report::Json& p) const {
    p["beta"] = beta;
    p["alpha"] = alpha;
    p["hurst"] = alpha / 2.0;
    p["T"] = T;
    p["steps"] = steps;
    p["N"] = N;
    p["scheme"] = scheme_name(scheme);
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  ModelOptions model;
  std::string sampler = "subordination";
  std::string csv;
  std::uint64_t paths = 4;
  double theta = 1.0;
};

Report run_simulate(const SimulateOptions& o) {
  const GgbmParams params = o.model.params();
  if (o.model.steps % 2 != 0) throw UsageError("--steps", "must be even so that T/2 is a grid point");
  if (!o.csv.empty() && o.paths > o.model.N) throw UsageError("--paths", "cannot exceed --N");
  const TimeGrid base(o.model.T, o.model.steps);
  const GgbmSampler sampler(params, base, o.model.scheme);
  const bool product = o.sampler == "product";
  const std::size_t mid = o.model.steps / 2, end = o.model.steps;
  const std::vector<std::size_t> observe{mid, end};
  auto draw = [&](Rng& rng, const std::vector<std::size_t>* obs) {
    return product ? sample_ggbm_product(sampler, rng, obs) : sample_ggbm(sampler, rng, obs);
  };

  const auto stats = run_blocks(o.model.N, o.model.seed, 5, [&](Rng& rng, double* out) {
    const GgbmDraw d = draw(rng, &observe);
    const double x1 = d.values[mid], x2 = d.values[end];
    out[0] = x2 * x2;
    out[1] = x2 * x2 * x2 * x2;
    out[2] = x1 * x2;
    out[3] = std::cos(o.theta * (x2 - x1));
    out[4] = d.resamples;
  });

  Report rep("simulate", o.model.seed);
  o.model.describe(rep.parameters());
  rep.parameters()["sampler"] = o.sampler;
  rep.parameters()["theta"] = o.theta;
  const double T = o.model.T, t1 = base.point(mid);
  struct Stat {
    const char* name;
    std::size_t out;
    double expected;
  };
  const Stat list[] = {{"second_moment", 0, ggbm_moment(params, 2, T)},
                       {"fourth_moment", 1, ggbm_moment(params, 4, T)},
                       {"covariance", 2, ggbm_covariance(params, t1, T)},
                       {"increment_char_fn", 3, ggbm_char_increment(params, o.theta, T, t1)}};
  for (const Stat& s : list) {
    const MonteCarloReport mc = make_report(stats[s.out], o.model.seed);
    Report::Json r = Report::to_json(mc);
    r["closed_form"] = s.expected;
    rep.results()[s.name] = r;
    rep.add_statistical_check(s.name, mc, s.expected);
  }
  rep.results()["times"] = {{"t", t1}, {"s", T}};
  rep.results()["mean_resamples_per_draw"] = stats[4].mean;

  if (!o.csv.empty()) {
    std::ofstream f = open_output("--csv", o.csv);
    f << "draw_id,tau,t,value\n";
    Rng rng = make_stream(o.model.seed, 0);
    for (std::uint64_t id = 0; id < o.paths; ++id) {
      if (id % kBlockSize == 0) rng = make_stream(o.model.seed, id / kBlockSize);
      const GgbmDraw d = draw(rng, nullptr);
      for (std::size_t i = 0; i <= end; ++i)
        f << id << ',' << csv_number(d.tau) << ',' << csv_number(base.point(i)) << ',' << csv_number(d.values[i])
          << '\n';
    }
    rep.results()["csv_paths"] = o.paths;
  }
  return rep;
}

// --------------------------------------------------------- verify-cm / ibp

struct VerifyOptions {
  ModelOptions model;
  std::string hdot = "const:1";
  double hdot_cut = 1.0;
  std::string f = "tanh";
  std::string g = "sin";
  std::vector<double> times{0.5};
  bool coupled = false;
  bool gbm = false;
  bool allow_unbounded = false;

  void add_to(CLI::App& app, bool ibp) {
    model.add_to(app);
    app.add_option("--hdot", hdot, "Shift direction: const:c, ramp:a or table:<csv-path>")->capture_default_str();
    app.add_option("--hdot-cut", hdot_cut, "Support end for const and ramp directions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--f", f, "Cylinder factors for F: one, tanh, sin, bump, logistic (x with the waiver)")
        ->capture_default_str();
    if (ibp) app.add_option("--g", g, "Cylinder factors for G")->capture_default_str();
    app.add_option("--times", times, "Cylinder times t1,t2,...")->delimiter(',')->default_str("0.5");
    app.add_flag("--coupled-estimator", coupled, "Evaluate both sides on the same draws");
    app.add_flag("--gbm", gbm, "alpha = 1 only: use the dedicated Brownian path");
    app.add_flag("--allow-unbounded", allow_unbounded, "Permit the unbounded factor x");
  }

  VerifyConfig config() const {
    VerifyConfig c;
    c.params = model.params();
    c.T = model.T;
    c.steps = model.steps;
    c.N = model.N;
    c.seed = model.seed;
    c.scheme = model.scheme;
    c.coupled_estimator = coupled;
    c.dedicated_gbm = gbm;
    if (c.N < kMinVerifyDraws) throw UsageError("--N", "need at least " + std::to_string(kMinVerifyDraws) + " draws");
    if (gbm && model.alpha != 1.0) throw UsageError("--gbm", "requires --alpha 1");
    return c;
  }

  Direction direction() const { return for_field("--hdot", [&] { return Direction::parse(hdot, hdot_cut); }); }

  CylinderFunction cylinder(const std::string& field, const std::string& spec) const {
    const CylinderFunction F = for_field(field, [&] { return CylinderFunction::parse(spec, times, allow_unbounded); });
    for_field("--times", [&] { return cylinder_indices(F, TimeGrid(model.T, model.steps)); });
    return F;
  }

  void describe(Report::Json& p, const Direction& h) const {
    model.describe(p);
    p["hdot"] = h.spec();
    p["hdot_cut"] = hdot_cut;
    p["hdot_norm_sq"] = h.norm_sq();
    p["times"] = times;
    p["coupled_estimator"] = coupled;
    p["dedicated_gbm"] = gbm;
  }
};

Report run_verify_cm(const VerifyOptions& o) {
  const VerifyConfig cfg = o.config();
  const Direction h = o.direction();
  const CylinderFunction F = o.cylinder("--f", o.f);
  const CmReport r = verify_cm_identity(F, h, cfg);

  Report rep("verify-cm", cfg.seed);
  o.describe(rep.parameters(), h);
  rep.parameters()["F"] = F.describe();
  rep.results()["lhs"] = Report::to_json(r.lhs);
  rep.results()["rhs"] = Report::to_json(r.rhs);
  rep.results()["density"] = Report::to_json(r.density);
  rep.results()["paired"] = r.paired;
  rep.add_comparison_check("cameron_martin_identity", r.identity, {{"lhs", r.lhs.estimate}, {"rhs", r.rhs.estimate}});
  rep.add_comparison_check("density_mean_is_one", r.density_check, {{"estimate", r.density.estimate}, {"expected", 1.0}});
  rep.add_flag_check("density_positive", r.density_positive);
  return rep;
}

Report run_verify_ibp(const VerifyOptions& o) {
  const VerifyConfig cfg = o.config();
  const Direction h = o.direction();
  const CylinderFunction F = o.cylinder("--f", o.f);
  const CylinderFunction G = o.cylinder("--g", o.g);
  const IbpReport r = verify_ibp(F, G, h, cfg);

  Report rep("verify-ibp", cfg.seed);
  o.describe(rep.parameters(), h);
  rep.parameters()["F"] = F.describe();
  rep.parameters()["G"] = G.describe();
  rep.results()["lhs"] = Report::to_json(r.lhs);
  rep.results()["rhs"] = Report::to_json(r.rhs);
  rep.results()["paired"] = r.paired;
  rep.add_comparison_check("integration_by_parts", r.identity, {{"lhs", r.lhs.estimate}, {"rhs", r.rhs.estimate}});
  return rep;
}

// ------------------------------------------------------------ kernel-check

struct KernelOptions {
  double H = 0.7;
  KernelMethod method = KernelMethod::Quadrature;
  std::string matrix_csv;
  std::size_t steps = 16;
  CellRule rule = CellRule::CellAverage;
};

constexpr double kKernelTolerance = 1e-6;

Report run_kernel_check(const KernelOptions& o) {
  const HurstParam H = for_field("--H", [&] { return HurstParam(o.H); });
  if (o.H < 0.5) throw UsageError("--H", "the kernel representation needs H >= 1/2");
  Report rep("kernel-check", 0);
  rep.parameters()["H"] = o.H;
  rep.parameters()["method"] = o.method == KernelMethod::Quadrature ? "quadrature" : "series";
  rep.parameters()["kernel_constant"] = kernel_constant(H);

  const double pts[] = {0.25, 0.5, 0.75, 1.0};
  Report::Json pairs = Report::Json::array();
  double worst = 0.0;
  for (double t : pts)
    for (double s : pts) {
      const double v = kernel_inner_product(H, t, s, o.method);
      const double r = covariance_rh(H, t, s);
      worst = std::max(worst, std::abs(v - r));
      pairs.push_back({{"t", t}, {"s", s}, {"kernel_product", v}, {"covariance", r}, {"abs_error", std::abs(v - r)}});
    }
  rep.results()["pairs"] = pairs;
  rep.results()["max_abs_error"] = worst;
  rep.add_tolerance_check("kernel_reproduction", worst, 0.0, kKernelTolerance);

  if (!o.matrix_csv.empty()) {
    const KernelMatrix K = build_kernel_matrix(H, TimeGrid(1.0, o.steps), o.rule);
    std::ofstream f = open_output("--matrix-csv", o.matrix_csv);
    K.write_csv(f);
    rep.parameters()["matrix_steps"] = o.steps;
    rep.parameters()["matrix_rule"] = o.rule == CellRule::Midpoint ? "midpoint" : "cell-average";
  }
  return rep;
}

// ----------------------------------------------------------------- ml-eval

struct MlOptions {
  double beta = 0.5;
  double z = -1.0;
  std::optional<double> tau;
};

Report run_ml_eval(const MlOptions& o) {
  const BetaParam b = for_field("--beta", [&] { return make_beta(o.beta); });
  const double v = for_field("--z", [&] { return mittag_leffler(b, o.z); });
  Report rep("ml-eval", 0);
  rep.parameters()["beta"] = o.beta;
  rep.parameters()["z"] = o.z;
  rep.results()["mittag_leffler"] = v;
  rep.results()["crossover"] = mittag_leffler_crossover(b);
  rep.add_flag_check("finite", std::isfinite(v));
  const double x = -o.z;
  // Closed forms where they exist.
  if (b.is_degenerate()) rep.add_tolerance_check("matches_exp", v, std::exp(o.z), 1e-12);
  if (b.value() == 0.5 && x <= 25.0) rep.add_tolerance_check("matches_erfc_form", v, std::exp(x * x) * std::erfc(x), 1e-9);
  if (o.tau) {
    rep.parameters()["tau"] = *o.tau;
    const double m = for_field("--tau", [&] { return m_wright_pdf(b, *o.tau); });
    rep.results()["m_wright_pdf"] = m;
    rep.add_flag_check("pdf_finite_nonnegative", std::isfinite(m) && m >= 0.0);
  }
  return rep;
}

// ----------------------------------------------------- sample-subordinator

struct SubordinatorOptions {
  double beta = 0.5;
  std::uint64_t N = 100000;
  std::uint64_t seed = 1;
  std::string csv;
};

Report run_sample_subordinator(const SubordinatorOptions& o) {
  const BetaParam b = for_field("--beta", [&] { return make_beta(o.beta); });
  const double deltas[] = {0.5, 1.0, 2.0, 3.0};
  const double svals[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  const auto stats = run_blocks(o.N, o.seed, 9, [&](Rng& rng, double* out) {
    const double y = sample_mwright(b, rng);
    for (int k = 0; k < 4; ++k) out[k] = std::pow(y, deltas[k]);
    for (int k = 0; k < 5; ++k) out[4 + k] = std::exp(-svals[k] * y);
  });

  Report rep("sample-subordinator", o.seed);
  rep.parameters()["beta"] = o.beta;
  rep.parameters()["N"] = o.N;
  Report::Json moments = Report::Json::array(), laplace = Report::Json::array();
  for (int k = 0; k < 4; ++k) {
    const MonteCarloReport mc = make_report(stats[k], o.seed);
    const double expected = m_wright_moment(b, deltas[k]);
    Report::Json r = Report::to_json(mc);
    r["delta"] = deltas[k];
    r["closed_form"] = expected;
    moments.push_back(r);
    rep.add_statistical_check("moment_delta_" + csv_number(deltas[k]), mc, expected);
  }
  for (int k = 0; k < 5; ++k) {
    const MonteCarloReport mc = make_report(stats[4 + k], o.seed);
    const double expected = mittag_leffler(b, -svals[k]);
    Report::Json r = Report::to_json(mc);
    r["s"] = svals[k];
    r["closed_form"] = expected;
    laplace.push_back(r);
    rep.add_statistical_check("laplace_s_" + csv_number(svals[k]), mc, expected);
  }
  rep.results()["moments"] = moments;
  rep.results()["laplace"] = laplace;

  if (!o.csv.empty()) {
    std::ofstream f = open_output("--csv", o.csv);
    const std::vector<double> ys = collect_draws(o.N, o.seed, [&](Rng& rng) { return sample_mwright(b, rng); });
    f << "draw_id,y\n";
    for (std::size_t i = 0; i < ys.size(); ++i) f << i << ',' << csv_number(ys[i]) << '\n';
  }
  return rep;
}

}  // namespace

int resolve_threads(std::optional<int> flag, const char* env_value) {
  if (flag) {
    if (*flag < 1) throw std::invalid_argument("--threads must be at least 1");
    return *flag;
  }
  if (env_value && *env_value) {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(env_value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != std::char_traits<char>::length(env_value) || n < 1)
      throw std::invalid_argument(std::string("GREYPATH_THREADS must be a positive integer, got '") + env_value + "'");
    return n;
  }
  return omp_get_num_procs();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized grey Brownian motion: sampling and Monte Carlo verification of Cameron-Martin and "
               "integration-by-parts identities.",
               "greypath"};
  app.set_config("--config", "", "Flat key-value config file; [subcommand] sections, flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<int> threads;
  std::string out_path;
  app.add_option("--threads", threads, "Worker threads (default: GREYPATH_THREADS, then logical cores)");
  app.add_option("--out", out_path, "Write the JSON report here instead of stdout");

  SimulateOptions sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Sample ggBm paths and compare statistics to closed forms");
  sim.model.add_to(*c_sim);
  c_sim->add_option("--sampler", sim.sampler, "subordination or product")
      ->check(CLI::IsMember({"subordination", "product"}))
      ->capture_default_str();
  c_sim->add_option("--csv", sim.csv, "Write the first --paths draws as draw_id,tau,t,value");
  c_sim->add_option("--paths", sim.paths, "Paths written to --csv")->capture_default_str();
  c_sim->add_option("--theta", sim.theta, "Frequency of the increment characteristic function")->capture_default_str();

  VerifyOptions cm;
  CLI::App* c_cm = app.add_subcommand("verify-cm", "Monte Carlo check of the Cameron-Martin identity");
  cm.add_to(*c_cm, false);

  VerifyOptions ibp;
  ibp.f = "sin";
  CLI::App* c_ibp = app.add_subcommand("verify-ibp", "Monte Carlo check of integration by parts");
  ibp.add_to(*c_ibp, true);

  KernelOptions ker;
  const std::map<std::string, KernelMethod> methods{{"quadrature", KernelMethod::Quadrature},
                                                    {"series", KernelMethod::Series}};
  const std::map<std::string, CellRule> rules{{"midpoint", CellRule::Midpoint}, {"cell-average", CellRule::CellAverage}};
  CLI::App* c_ker = app.add_subcommand("kernel-check", "Check that the kernel reproduces the fBm covariance");
  c_ker->add_option("--H", ker.H, "Hurst index in [1/2, 1)")->capture_default_str();
  c_ker->add_option("--method", ker.method, "quadrature or series")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
      ->default_str("quadrature");
  c_ker->add_option("--matrix-csv", ker.matrix_csv, "Write the kernel matrix on [0, 1] as CSV");
  c_ker->add_option("--steps", ker.steps, "Steps of the exported matrix")
      ->check(CLI::Range(std::size_t{1}, std::size_t{4096}))
      ->capture_default_str();
  c_ker->add_option("--rule", ker.rule, "midpoint or cell-average")
      ->transform(CLI::CheckedTransformer(rules, CLI::ignore_case))
      ->default_str("cell-average");

  MlOptions ml;
  CLI::App* c_ml = app.add_subcommand("ml-eval", "Evaluate E_beta(z) for z <= 0, optionally M_beta(tau)");
  c_ml->add_option("--beta", ml.beta, "beta in (0, 1]")->capture_default_str();
  c_ml->add_option("--z", ml.z, "Argument z <= 0")->capture_default_str();
  c_ml->add_option("--tau", ml.tau, "Also evaluate the M-Wright density at tau >= 0");

  SubordinatorOptions sub;
  CLI::App* c_sub = app.add_subcommand("sample-subordinator", "Sample Y_beta and compare moments and Laplace values");
  c_sub->add_option("--beta", sub.beta, "beta in (0, 1]")->capture_default_str();
  c_sub->add_option("--N", sub.N, "Draws")->check(CLI::PositiveNumber)->capture_default_str();
  c_sub->add_option("--seed", sub.seed, "64-bit master seed")->capture_default_str();
  c_sub->add_option("--csv", sub.csv, "Write draws as draw_id,y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    omp_set_num_threads(resolve_threads(threads, std::getenv("GREYPATH_THREADS")));
    Report rep = [&] {
      if (c_sim->parsed()) return run_simulate(sim);
      if (c_cm->parsed()) return run_verify_cm(cm);
      if (c_ibp->parsed()) return run_verify_ibp(ibp);
      if (c_ker->parsed()) return run_kernel_check(ker);
      if (c_ml->parsed()) return run_ml_eval(ml);
      return run_sample_subordinator(sub);
    }();
    if (out_path.empty()) {
      out << rep.dump();
    } else {
      std::ofstream f = open_output("--out", out_path);
      f << rep.dump();
    }
    return rep.pass() ? 0 : kExitChecksFailed;
  } catch (const numeric_error& e) {
    err << "greypath: numeric failure: " << e.what() << "\n[diagnostics]\n";
    for (const auto& [k, v] : e.diagnostics()) err << k << " = " << v << "\n";
    return kExitNumeric;
  } catch (const std::logic_error& e) {
    err << "greypath: invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace greypath::cli
