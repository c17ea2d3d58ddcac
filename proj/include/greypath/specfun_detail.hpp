#pragma once

// Branch-level entry points, exposed for continuity tests at the switch point.
namespace greypath::detail {

double mittag_leffler_taylor(double beta, double x);
double mittag_leffler_asymptotic(double beta, double x);

}  // namespace greypath::detail
