#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "greypath/fbm.hpp"
#include "greypath/rng.hpp"

namespace greypath {

// Streaming mean and variance (Welford), mergeable with the pairwise update.
struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  static RunningStats merge(const RunningStats& a, const RunningStats& b);
  double variance() const;  // sample variance, n - 1 denominator
  double std_error() const;
};

struct MonteCarloReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // 95% normal interval
  double ci_high = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

MonteCarloReport make_report(const RunningStats& s, std::uint64_t seed);

// Draws are grouped into fixed blocks; block b always uses stream b of the
// master seed, and block statistics are merged in a fixed balanced tree, so
// the result does not depend on the number of workers.
constexpr std::size_t kBlockSize = 1024;

// Fills out[0..outputs) for one draw using the block's stream.
using DrawFn = std::function<void(Rng& rng, double* out)>;

std::vector<RunningStats> run_blocks(std::uint64_t draws, std::uint64_t seed, std::size_t outputs, const DrawFn& draw,
                                     Exec exec = Exec::Parallel);

// One scalar per draw, returned in draw order; same block/stream layout as run_blocks.
std::vector<double> collect_draws(std::uint64_t draws, std::uint64_t seed, const std::function<double(Rng&)>& draw,
                                  Exec exec = Exec::Parallel);

// Merges per-block statistics in the same balanced tree run_blocks uses.
RunningStats merge_tree(const std::vector<RunningStats>& blocks, std::size_t lo, std::size_t hi);

// Two-sided comparison of independent (or paired) estimates.
struct Comparison {
  double difference = 0.0;
  double pooled_se = 0.0;
  double z = 0.0;
  bool pass = false;
};

constexpr double kZThreshold = 3.0;

// z = difference / se, taken as 0 when the difference is exactly 0.
Comparison compare(double difference, double se);
Comparison compare_independent(const MonteCarloReport& a, const MonteCarloReport& b);

}  // namespace greypath
