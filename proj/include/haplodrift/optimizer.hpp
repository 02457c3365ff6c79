#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace haplodrift {

struct SimplexOptions {
  std::size_t max_iterations = 2000;
  /// Stops when the simplex characteristic size falls below this.
  double size_tolerance = 1e-6;
  /// Initial step along every coordinate.
  double initial_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization (GSL nmsimplex2). Deterministic.
/// Non-finite objective values are treated as +infinity.
SimplexResult minimize_simplex(const std::function<double(std::span<const double>)>& objective,
                               std::vector<double> start, const SimplexOptions& options = {});

}  // namespace haplodrift
