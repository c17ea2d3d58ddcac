#pragma once

#include <doctest.h>

#include <cmath>

#include "greypath/montecarlo.hpp"

namespace greypath::test {

// |mean - expected| <= 3 standard errors.
inline void check_within_3se(const RunningStats& s, double expected) {
  const double se = s.std_error();
  INFO("mean = " << s.mean << ", expected = " << expected << ", se = " << se);
  CHECK(std::abs(s.mean - expected) <= 3.0 * se);
}

}  // namespace greypath::test
