#pragma once

#include <string>

namespace stopscape::nna {

// log10 of the upper standard-normal tail Q(x) = P(Z > x) for x >= 0, finite
// for any finite x. Uses erfc up to x = 8 and the asymptotic expansion
// phi(x)/x * (1 - 1/x^2 + 3/x^4) beyond.
double log10_upper_tail(double x);

// log10 of the two-tailed p-value 2 * Q(|z|).
double log10_two_tailed_p(double z);

// "m.mme[+-]x" rendering of 10^log10_value, e.g. "3.64e-2075".
std::string format_log10(double log10_value, int decimals = 2);

}  // namespace stopscape::nna
