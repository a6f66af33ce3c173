#include "stopscape/nna/normal_tail.h"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace stopscape::nna {

namespace {

constexpr double asymptotic_threshold = 8.0;

// ln(2 Q(x)) for x >= 0.
double ln_two_tailed(double x) {
  if (x <= asymptotic_threshold) {
    return std::log(std::erfc(x / std::numbers::sqrt2));
  }
  auto const x2 = x * x;
  auto const series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2);
  return std::numbers::ln2 - x2 / 2.0 -
         0.5 * std::log(2.0 * std::numbers::pi) - std::log(x) +
         std::log(series);
}

}  // namespace

double log10_upper_tail(double x) {
  return (ln_two_tailed(x) - std::numbers::ln2) / std::numbers::ln10;
}

double log10_two_tailed_p(double z) {
  return ln_two_tailed(std::abs(z)) / std::numbers::ln10;
}

std::string format_log10(double log10_value, int decimals) {
  if (!std::isfinite(log10_value)) {
    return log10_value < 0 ? "0" : "inf";
  }
  auto exponent = std::floor(log10_value);
  auto mantissa = std::pow(10.0, log10_value - exponent);
  auto const scale = std::pow(10.0, decimals);
  if (std::round(mantissa * scale) >= 10.0 * scale) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*fe%+03.0f", decimals, mantissa,
                exponent);
  return buf;
}

}  // namespace stopscape::nna
