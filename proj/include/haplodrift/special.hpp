#pragma once

#include <cstdint>
#include <span>

namespace haplodrift {

// Log-space probability masses. Invalid supports return -infinity.

double log_poisson_pmf(std::int64_t k, double rate);
double poisson_pmf(std::int64_t k, double rate);
double log_binomial_pmf(std::int64_t x, std::int64_t n, double p);
double log_choose(std::int64_t n, std::int64_t k);

/// Hypergeometric mass: a population of `population` holds `successes`
/// marked items; `draws` are taken without replacement; returns
/// log P(k marked items drawn). Evaluated as an explicit product over the
/// smaller of (successes, draws), so it stays exact for populations of 1e8+
/// where differences of log-gamma values lose all precision.
double log_hypergeometric_pmf(std::int64_t k, std::int64_t successes, std::int64_t draws, std::int64_t population);

double log_sum_exp(std::span<const double> values);

}  // namespace haplodrift
