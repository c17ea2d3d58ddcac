#include "greypath/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace greypath {

void RunningStats::push(double x) {
  ++n;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

RunningStats RunningStats::merge(const RunningStats& a, const RunningStats& b) {
  if (a.n == 0) return b;
  if (b.n == 0) return a;
  RunningStats r;
  r.n = a.n + b.n;
  const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n), n = static_cast<double>(r.n);
  const double d = b.mean - a.mean;
  r.mean = a.mean + d * nb / n;
  r.m2 = a.m2 + b.m2 + d * d * na * nb / n;
  return r;
}

double RunningStats::variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

double RunningStats::std_error() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }

MonteCarloReport make_report(const RunningStats& s, std::uint64_t seed) {
  MonteCarloReport r;
  r.estimate = s.mean;
  r.std_error = s.std_error();
  r.ci_low = s.mean - 1.959963984540054 * r.std_error;
  r.ci_high = s.mean + 1.959963984540054 * r.std_error;
  r.samples = s.n;
  r.seed = seed;
  return r;
}

RunningStats merge_tree(const std::vector<RunningStats>& blocks, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return {};
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return RunningStats::merge(merge_tree(blocks, lo, mid), merge_tree(blocks, mid, hi));
}

namespace {

void run_one_block(std::uint64_t block, std::uint64_t draws, std::uint64_t seed, std::size_t outputs,
                   const DrawFn& draw, RunningStats* stats) {
  Rng rng = make_stream(seed, block);
  std::vector<double> out(outputs);
  const std::uint64_t begin = block * kBlockSize;
  const std::uint64_t end = std::min<std::uint64_t>(draws, begin + kBlockSize);
  for (std::uint64_t d = begin; d < end; ++d) {
    std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
    draw(rng, out.data());
    for (std::size_t k = 0; k < outputs; ++k) stats[k].push(out[k]);
  }
}

}  // namespace

std::vector<RunningStats> run_blocks(std::uint64_t draws, std::uint64_t seed, std::size_t outputs, const DrawFn& draw,
                                     Exec exec) {
  const std::uint64_t blocks = (draws + kBlockSize - 1) / kBlockSize;
  std::vector<RunningStats> per_block(blocks * outputs);
  if (exec == Exec::Serial) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_one_block(b, draws, seed, outputs, draw, &per_block[b * outputs]);
  } else {
    // Exceptions cannot leave a parallel region; keep the one from the
    // lowest block so the reported failure is the same as a serial run.
    std::vector<std::exception_ptr> errors(blocks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      try {
        run_one_block(static_cast<std::uint64_t>(b), draws, seed, outputs, draw,
                      &per_block[static_cast<std::size_t>(b) * outputs]);
      } catch (...) {
        errors[static_cast<std::size_t>(b)] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<RunningStats> result(outputs);
  std::vector<RunningStats> column(blocks);
  for (std::size_t k = 0; k < outputs; ++k) {
    for (std::uint64_t b = 0; b < blocks; ++b) column[b] = per_block[b * outputs + k];
    result[k] = merge_tree(column, 0, column.size());
  }
  return result;
}

std::vector<double> collect_draws(std::uint64_t draws, std::uint64_t seed, const std::function<double(Rng&)>& draw,
                                  Exec exec) {
  std::vector<double> out(draws);
  const std::uint64_t blocks = (draws + kBlockSize - 1) / kBlockSize;
  auto fill = [&](std::uint64_t b) {
    Rng rng = make_stream(seed, b);
    const std::uint64_t end = std::min<std::uint64_t>(draws, (b + 1) * kBlockSize);
    for (std::uint64_t d = b * kBlockSize; d < end; ++d) out[d] = draw(rng);
  };
  if (exec == Exec::Serial) {
    for (std::uint64_t b = 0; b < blocks; ++b) fill(b);
    return out;
  }
  std::vector<std::exception_ptr> errors(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    try {
      fill(static_cast<std::uint64_t>(b));
    } catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Comparison compare(double difference, double se) {
  Comparison c;
  c.difference = difference;
  c.pooled_se = se;
  if (difference == 0.0)
    c.z = 0.0;
  else if (se > 0.0)
    c.z = difference / se;
  else
    c.z = difference > 0 ? INFINITY : -INFINITY;
  c.pass = std::abs(c.z) <= kZThreshold;
  return c;
}

Comparison compare_independent(const MonteCarloReport& a, const MonteCarloReport& b) {
  return compare(a.estimate - b.estimate, std::hypot(a.std_error, b.std_error));
}

}  // namespace greypath
