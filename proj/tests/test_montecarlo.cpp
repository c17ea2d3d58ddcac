#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "greypath/montecarlo.hpp"
#include "greypath/rng.hpp"

using namespace greypath;

TEST_CASE("RunningStats merge matches sequential accumulation") {
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(std::sin(0.37 * i) * 3.0 + 0.01 * i);
  RunningStats all, a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.push(xs[i]);
    (i < 377 ? a : b).push(xs[i]);
  }
  const RunningStats m = RunningStats::merge(a, b);
  CHECK(m.n == all.n);
  CHECK(m.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(m.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK(RunningStats::merge(RunningStats{}, a).mean == a.mean);
}

TEST_CASE("report interval") {
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.push(x);
  const MonteCarloReport r = make_report(s, 42);
  CHECK(r.estimate == 2.5);
  CHECK(r.samples == 4);
  CHECK(r.seed == 42);
  CHECK(r.ci_high - r.estimate == doctest::Approx(1.959963984540054 * r.std_error));
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a = make_stream(1, 0), b = make_stream(1, 0), c = make_stream(1, 1);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("run_blocks is independent of the execution mode") {
  const std::uint64_t draws = 5 * kBlockSize + 17;
  auto fn = [](Rng& rng, double* out) {
    NormalSource z(rng);
    out[0] = z();
    out[1] = out[0] * out[0];
  };
  const auto s = run_blocks(draws, 99, 2, fn, Exec::Serial);
  const auto p = run_blocks(draws, 99, 2, fn, Exec::Parallel);
  for (int k = 0; k < 2; ++k) {
    CHECK(s[k].n == draws);
    CHECK(std::memcmp(&s[k].mean, &p[k].mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&s[k].m2, &p[k].m2, sizeof(double)) == 0);
  }
}

TEST_CASE("collect_draws follows the block streams") {
  const std::uint64_t draws = 2 * kBlockSize + 3;
  auto one = [](Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
  const auto v = collect_draws(draws, 5, one, Exec::Parallel);
  CHECK(v == collect_draws(draws, 5, one, Exec::Serial));
  double sum = 0.0;
  for (double x : v) sum += x;
  const auto stats = run_blocks(draws, 5, 1, [&](Rng& rng, double* out) { out[0] = one(rng); });
  CHECK(stats[0].mean == doctest::Approx(sum / double(draws)).epsilon(1e-13));
  Rng r = make_stream(5, 2);
  CHECK(v[2 * kBlockSize] == one(r));
}

TEST_CASE("exceptions inside blocks reach the caller") {
  auto fn = [](Rng& rng, double* out) {
    out[0] = 0.0;
    if (rng() % 500 == 0) throw std::runtime_error("boom");
  };
  CHECK_THROWS_AS(run_blocks(50000, 1, 1, fn, Exec::Parallel), std::runtime_error);
}

TEST_CASE("comparisons") {
  CHECK(compare(0.0, 0.0).z == 0.0);
  CHECK(compare(0.0, 0.0).pass);
  CHECK(compare(1.0, 0.5).z == 2.0);
  CHECK_FALSE(compare(-4.0, 1.0).pass);
  MonteCarloReport a, b;
  a.estimate = 1.0;
  a.std_error = 0.3;
  b.estimate = 0.0;
  b.std_error = 0.4;
  const Comparison c = compare_independent(a, b);
  CHECK(c.pooled_se == doctest::Approx(0.5));
  CHECK(c.z == doctest::Approx(2.0));
}
