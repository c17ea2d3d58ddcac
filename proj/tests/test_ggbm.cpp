#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "greypath/ggbm.hpp"
#include "support.hpp"

using namespace greypath;

TEST_CASE("GgbmParams validation") {
  CHECK_THROWS_AS(GgbmParams(BetaParam(0.5), 2.0), std::domain_error);
  CHECK_THROWS_AS(GgbmParams(BetaParam(0.5), 0.9), std::domain_error);
  CHECK(GgbmParams(BetaParam(0.5), 1.5).hurst().value() == 0.75);
}

TEST_CASE("closed forms") {
  const GgbmParams p(BetaParam(0.5), 1.5);
  CHECK(std::abs(ggbm_covariance(p, 1.0, 1.0) - 1.1283791671) < 1e-9);
  CHECK(ggbm_covariance(p, 2.0, 2.0) == doctest::Approx(1.1283791671 * std::pow(2.0, 1.5)).epsilon(1e-9));
  CHECK(ggbm_covariance(p, 0.3, 0.9) == ggbm_covariance(p, 0.9, 0.3));
  CHECK_THROWS_AS(ggbm_covariance(p, -1.0, 0.5), std::domain_error);
  const GgbmParams fbm(BetaParam::degenerate(), 1.4);
  CHECK(ggbm_covariance(fbm, 0.4, 0.9) == doctest::Approx(covariance_rh(HurstParam(0.7), 0.4, 0.9)).epsilon(1e-14));

  CHECK(ggbm_char_increment(p, 0.0, 1.0, 0.5) == 1.0);
  CHECK(ggbm_char_increment(p, 2.0, 0.7, 0.7) == 1.0);
  CHECK(ggbm_char_fn(p, {0.0, 0.0}, {0.5, 1.0}) == 1.0);
  CHECK(ggbm_char_fn(p, {1.3}, {0.8}) == doctest::Approx(ggbm_char_increment(p, 1.3, 0.8, 0.0)).epsilon(1e-15));
  CHECK_THROWS_AS(ggbm_char_fn(p, {1.0}, {0.5, 1.0}), std::domain_error);

  CHECK(ggbm_moment(p, 3, 1.0) == 0.0);
  CHECK(ggbm_moment(p, 2, 1.0) == doctest::Approx(1.0 / std::tgamma(1.5)));
  CHECK(ggbm_moment(p, 4, 2.0) == doctest::Approx(24.0 / (4.0 * std::tgamma(2.0)) * std::pow(2.0, 3.0)));
}

TEST_CASE("subordination sampler statistics") {
  const GgbmParams p(BetaParam(0.5), 1.5);
  const TimeGrid base(1.0, 64);
  const GgbmSampler s(p, base);
  const auto stats = run_blocks(40000, 3, 5, [&](Rng& rng, double* out) {
    const GgbmDraw d = sample_ggbm(s, rng);
    out[0] = d.values[64] * d.values[64];
    out[1] = d.values[32] * d.values[64];
    out[2] = std::cos(d.values[64] - d.values[32]);
    out[3] = d.values[0] == 0.0 ? 1.0 : 0.0;
    out[4] = std::abs(d.coupled.grid.horizon() - d.tau_h) < 1e-12 ? 1.0 : 0.0;
  });
  test::check_within_3se(stats[0], ggbm_moment(p, 2, 1.0));
  test::check_within_3se(stats[1], ggbm_covariance(p, 0.5, 1.0));
  test::check_within_3se(stats[2], ggbm_char_increment(p, 1.0, 1.0, 0.5));
  CHECK(stats[3].mean == 1.0);
  CHECK(stats[4].mean == 1.0);
}

TEST_CASE("self-similarity and stationary increments at the second-moment level") {
  const GgbmParams p(BetaParam(0.7), 1.2);
  const GgbmSampler s(p, TimeGrid(2.0, 32));
  const auto stats = run_blocks(40000, 13, 3, [&](Rng& rng, double* out) {
    const GgbmDraw d = sample_ggbm(s, rng);
    out[0] = d.values[8] * d.values[8];                                  // t = 0.5
    out[1] = (d.values[16] - d.values[8]) * (d.values[16] - d.values[8]);  // (0.5, 1)
    out[2] = (d.values[32] - d.values[24]) * (d.values[32] - d.values[24]);  // (1.5, 2)
  });
  test::check_within_3se(stats[0], ggbm_moment(p, 2, 0.5));
  test::check_within_3se(stats[1], ggbm_moment(p, 2, 0.5));
  test::check_within_3se(stats[2], ggbm_moment(p, 2, 0.5));
}

TEST_CASE("product sampler statistics") {
  const GgbmParams p(BetaParam(0.5), 1.5);
  const GgbmSampler s(p, TimeGrid(1.0, 32));
  const auto stats = run_blocks(40000, 4, 3, [&](Rng& rng, double* out) {
    const GgbmDraw d = sample_ggbm_product(s, rng);
    const double x = d.values[32];
    out[0] = x;
    out[1] = x * x * x;
    out[2] = x * x * x * x;
  });
  test::check_within_3se(stats[0], 0.0);
  test::check_within_3se(stats[1], 0.0);
  test::check_within_3se(stats[2], ggbm_moment(p, 4, 1.0));
}

TEST_CASE("both samplers share the two-point characteristic function") {
  const GgbmParams p(BetaParam(0.5), 1.5);
  const GgbmSampler s(p, TimeGrid(1.0, 32));
  const std::vector<std::size_t> obs{16, 32};
  auto cf = [](const GgbmDraw& d) { return std::cos(0.5 * d.values[16] - 0.3 * d.values[32]); };
  const auto a = run_blocks(40000, 8, 1, [&](Rng& rng, double* out) { out[0] = cf(sample_ggbm(s, rng, &obs)); });
  const auto b = run_blocks(40000, 9, 1, [&](Rng& rng, double* out) { out[0] = cf(sample_ggbm_product(s, rng, &obs)); });
  const Comparison c = compare_independent(make_report(a[0], 8), make_report(b[0], 9));
  CHECK(c.pass);
  const double exact = ggbm_char_fn(p, {0.5, -0.3}, {0.5, 1.0});
  test::check_within_3se(a[0], exact);
  test::check_within_3se(b[0], exact);
}

TEST_CASE("degenerate beta gives fBm") {
  const GgbmParams p(BetaParam::degenerate(), 1.4);
  const GgbmSampler s(p, TimeGrid(1.0, 32));
  const auto stats = run_blocks(20000, 6, 2, [&](Rng& rng, double* out) {
    const GgbmDraw d = sample_ggbm(s, rng);
    out[0] = d.values[16] * d.values[32];
    out[1] = d.tau == 1.0 ? 1.0 : 0.0;
  });
  test::check_within_3se(stats[0], covariance_rh(HurstParam(0.7), 0.5, 1.0));
  CHECK(stats[1].mean == 1.0);
}

TEST_CASE("dedicated gBm path consumes the stream like the alpha = 1 subordination path") {
  const GgbmParams p(BetaParam(0.6), 1.0);
  const TimeGrid base(1.0, 16);
  const GgbmSampler s(p, base);
  for (std::uint64_t k = 0; k < 5; ++k) {
    Rng a = make_stream(10, k), b = make_stream(10, k);
    const GgbmDraw x = sample_ggbm(s, a);
    const GgbmDraw y = sample_gbm(p.beta(), base, b);
    CHECK(x.tau == y.tau);
    CHECK(x.values == y.values);
    CHECK(x.coupled.bm_increments == y.coupled.bm_increments);
    CHECK(a() == b());
  }
}
