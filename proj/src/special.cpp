#include "haplodrift/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace haplodrift {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_poisson_pmf(std::int64_t k, double rate) {
  if (k < 0) return kNegInf;
  if (rate == 0.0) return k == 0 ? 0.0 : kNegInf;
  const double kd = static_cast<double>(k);
  return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

double poisson_pmf(std::int64_t k, double rate) { return std::exp(log_poisson_pmf(k, rate)); }

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double log_binomial_pmf(std::int64_t x, std::int64_t n, double p) {
  if (x < 0 || x > n) return kNegInf;
  const std::int64_t failures = n - x;
  double out = log_choose(n, x);
  if (x > 0) out += p == 0.0 ? kNegInf : static_cast<double>(x) * std::log(p);
  if (failures > 0) out += p == 1.0 ? kNegInf : static_cast<double>(failures) * std::log1p(-p);
  return out;
}

double log_hypergeometric_pmf(std::int64_t k, std::int64_t successes, std::int64_t draws, std::int64_t population) {
  if (population < 0 || successes < 0 || draws < 0 || successes > population || draws > population) return kNegInf;
  const std::int64_t a = std::min(successes, draws);
  const std::int64_t b = std::max(successes, draws);
  if (k < 0 || k > a || a + b - k > population) return kNegInf;
  const double omega = static_cast<double>(population);
  const double bd = static_cast<double>(b);
  double out = log_choose(a, k);
  // Non-matching draws: (omega - b - i) / (omega - i), i < a - k.
  for (std::int64_t i = 0; i < a - k; ++i) out += std::log1p(-bd / (omega - static_cast<double>(i)));
  // Matching draws: (b - i) / (omega - (a - k) - i), i < k.
  for (std::int64_t i = 0; i < k; ++i) {
    out += std::log((bd - static_cast<double>(i)) / (omega - static_cast<double>(a - k + i)));
  }
  return out;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace haplodrift
