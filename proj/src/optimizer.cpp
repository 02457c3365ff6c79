#include "haplodrift/optimizer.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "haplodrift/error.hpp"

namespace haplodrift {

namespace {

using Objective = std::function<double(std::span<const double>)>;

double trampoline(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  const double value = f(std::span<const double>(v->data, v->size));
  // GSL rejects NaN; a huge finite value keeps the simplex moving away.
  return std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

SimplexResult minimize_simplex(const Objective& objective, std::vector<double> start, const SimplexOptions& options) {
  require(!start.empty(), ErrorCode::InvalidArgument, "empty start point");
  gsl_set_error_handler_off();
  const std::size_t n = start.size();
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, start[i]);
    gsl_vector_set(step.get(), i, options.initial_step);
  }

  SimplexResult out;
  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &trampoline;
  fn.params = const_cast<Objective*>(&objective);

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  require(m != nullptr, ErrorCode::InvalidArgument, "cannot allocate simplex minimizer");
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());

  for (out.iterations = 0; out.iterations < options.max_iterations;) {
    ++out.iterations;
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(m.get());
    if (gsl_multimin_test_size(size, options.size_tolerance) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(m.get());
  out.x.assign(best->data, best->data + n);
  out.value = gsl_multimin_fminimizer_minimum(m.get());
  return out;
}

}  // namespace haplodrift
