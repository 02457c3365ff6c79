#include "haplodrift/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "haplodrift/error.hpp"
#include "haplodrift/special.hpp"

namespace haplodrift {

namespace {

void check_distribution(const ClusterDistribution& f) {
  require(f.probs.size() >= 2, ErrorCode::InvalidArgument, "cluster distribution needs truncation K >= 2");
  for (double v : f.probs) require(v >= 0 && std::isfinite(v), ErrorCode::InvalidArgument, "negative cluster probability");
}

double normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  require(total > 0 && std::isfinite(total), ErrorCode::InvalidArgument, "distribution has no mass");
  for (double& x : v) x /= total;
  return total;
}

// Singletons across three generations: mutant children and grandchildren
// plus founders whose line left no identical descendants.
double first_cluster_term(const ClusterDistribution& f, const PopulationParams& p) {
  const double lm = p.lambda * p.mu;
  const double ea = std::exp(-p.identical_rate());
  double g = (p.lambda * lm + (1.0 + lm) * ea) * f.probs[0];
  for (std::size_t j = 2; j <= f.truncation(); ++j) {
    g += static_cast<double>(j) * (p.lambda * lm + lm * ea) * f.probs[j - 1];
  }
  return g;
}

}  // namespace

void PopulationParams::validate(bool allow_critical) const {
  require(lambda > 0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be positive");
  require(mu >= 0 && mu <= 1, ErrorCode::InvalidArgument, "mu must lie in [0, 1]");
  require(identical_rate() < 1.0 || (allow_critical && identical_rate() == 1.0), ErrorCode::Supercritical,
          "lambda (1 - mu) = " + std::to_string(identical_rate()) + " is not sub-critical");
}

double ClusterDistribution::mean_size() const {
  double s = 0;
  for (std::size_t k = 1; k <= probs.size(); ++k) s += static_cast<double>(k) * probs[k - 1];
  return s;
}

ClusterDistribution ClusterDistribution::singleton(std::size_t truncation) {
  require(truncation >= 2, ErrorCode::InvalidArgument, "truncation must be >= 2");
  ClusterDistribution f;
  f.probs.assign(truncation, 0.0);
  f.probs[0] = 1.0;
  return f;
}

PoissonKernel::PoissonKernel(std::size_t truncation, double rate)
    : truncation_(truncation), rate_(rate), table_((truncation + 1) * (truncation + 1), 0.0) {
  const std::size_t n = truncation_ + 1;
  std::vector<double> log_factorial(n);
  for (std::size_t x = 0; x < n; ++x) log_factorial[x] = std::lgamma(static_cast<double>(x) + 1.0);
  table_[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double r = static_cast<double>(j) * rate_;
    double* col = table_.data() + j * n;
    if (r == 0.0) {
      col[0] = 1.0;
      continue;
    }
    const double log_r = std::log(r);
    for (std::size_t x = 0; x < n; ++x) col[x] = std::exp(static_cast<double>(x) * log_r - r - log_factorial[x]);
  }
}

GenerationStep next_generation(const ClusterDistribution& f, const PopulationParams& p) {
  return next_generation(f, p, PoissonKernel(f.truncation(), p.identical_rate()));
}

GenerationStep next_generation(const ClusterDistribution& f, const PopulationParams& p, const PoissonKernel& kernel) {
  p.validate();
  check_distribution(f);
  const std::size_t K = f.truncation();
  require(kernel.truncation() >= K, ErrorCode::InvalidArgument, "Poisson kernel smaller than truncation");
  const double mutant_rate = p.lambda * p.mu;
  std::vector<double> g(K, 0.0);
  for (std::size_t j = 1; j <= K; ++j) {
    const double fj = f.probs[j - 1];
    if (fj == 0.0) continue;
    g[0] += (static_cast<double>(j) * mutant_rate + kernel(1, j)) * fj;
    for (std::size_t m = 2; m <= K; ++m) g[m - 1] += kernel(m, j) * fj;
  }
  GenerationStep out;
  out.unnormalized_mass = normalize(g);
  out.next.probs = std::move(g);
  out.next.generations = Generations::One;
  return out;
}

EquilibriumResult equilibrium(const PopulationParams& p, const EquilibriumOptions& options) {
  require(options.truncation >= 2, ErrorCode::InvalidArgument, "truncation must be >= 2");
  p.validate();
  return equilibrium(p, options, PoissonKernel(options.truncation, p.identical_rate()));
}

EquilibriumResult equilibrium(const PopulationParams& p, const EquilibriumOptions& options, const PoissonKernel& kernel) {
  p.validate();
  require(options.max_iterations >= 1, ErrorCode::InvalidArgument, "need at least one iteration");
  EquilibriumResult r;
  r.distribution = ClusterDistribution::singleton(options.truncation);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    auto step = next_generation(r.distribution, p, kernel);
    double residual = 0;
    for (std::size_t k = 0; k < options.truncation; ++k) {
      residual = std::max(residual, std::abs(step.next.probs[k] - r.distribution.probs[k]));
    }
    r.distribution = std::move(step.next);
    r.iterations = it + 1;
    r.residual = residual;
    if (residual < options.tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

ClusterDistribution combine_two(const ClusterDistribution& f, const PopulationParams& p) {
  p.validate(true);
  check_distribution(f);
  return combine_two(f, p, PoissonKernel(f.truncation(), p.identical_rate()));
}

ClusterDistribution combine_two(const ClusterDistribution& f, const PopulationParams& p, const PoissonKernel& kernel) {
  p.validate(true);
  check_distribution(f);
  const std::size_t K = f.truncation();
  require(kernel.truncation() >= K, ErrorCode::InvalidArgument, "Poisson kernel smaller than truncation");
  const double a = p.identical_rate();
  std::vector<double> g(K, 0.0);
  g[0] = (p.lambda * p.mu + std::exp(-a)) * f.probs[0];
  for (std::size_t j = 2; j <= K; ++j) g[0] += static_cast<double>(j) * p.lambda * p.mu * f.probs[j - 1];
  for (std::size_t m = 2; m <= K; ++m) {
    double s = 0;
    for (std::size_t j = 1; j <= m; ++j) s += kernel(m - j, j) * f.probs[j - 1];
    g[m - 1] = s;
  }
  normalize(g);
  return ClusterDistribution{std::move(g), Generations::TwoCombined};
}

double three_generation_term(std::size_t j, std::size_t z, std::size_t k, std::size_t m, const PopulationParams& p) {
  if (m > k || z < j + m) return 0.0;
  const double a = p.identical_rate();
  const double lp = log_poisson_pmf(static_cast<std::int64_t>(k), static_cast<double>(j) * p.lambda) +
                    log_binomial_pmf(static_cast<std::int64_t>(k - m), static_cast<std::int64_t>(k), p.mu) +
                    log_poisson_pmf(static_cast<std::int64_t>(z - j - m), static_cast<double>(m) * a);
  return std::exp(lp);
}

double three_generation_inner_sum(std::size_t j, std::size_t z, const PopulationParams& p) {
  if (z < j) return 0.0;
  const double mean = static_cast<double>(j) * p.lambda;
  const double spread = 12.0 * std::sqrt(mean);
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(mean - spread - 10.0)));
  const auto hi = static_cast<std::size_t>(std::ceil(mean + spread + 30.0));
  double s = 0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const std::size_t mmax = std::min(k, z - j);
    for (std::size_t m = 0; m <= mmax; ++m) s += three_generation_term(j, z, k, m, p);
  }
  return s;
}

ClusterDistribution combine_three(const ClusterDistribution& f, const PopulationParams& p,
                                  ThreeGenerationMethod method) {
  p.validate(true);
  check_distribution(f);
  const std::size_t K = f.truncation();
  const PoissonKernel kernel(K, p.identical_rate());
  if (method == ThreeGenerationMethod::Thinned) return combine_three(f, p, kernel);

  const double lm = p.lambda * p.mu;
  std::vector<double> g(K, 0.0);
  g[0] = first_cluster_term(f, p);
  const double size_weighted = f.mean_size();
  for (std::size_t z = 2; z <= K; ++z) {
    double s = lm * kernel(z - 1, 1) * size_weighted;
    for (std::size_t j = 1; j <= z; ++j) {
      const double fj = f.probs[j - 1];
      if (fj != 0.0) s += fj * three_generation_inner_sum(j, z, p);
    }
    g[z - 1] = s;
  }
  normalize(g);
  return ClusterDistribution{std::move(g), Generations::ThreeCombined};
}

ClusterDistribution combine_three(const ClusterDistribution& f, const PopulationParams& p, const PoissonKernel& kernel) {
  p.validate(true);
  check_distribution(f);
  const std::size_t K = f.truncation();
  require(kernel.truncation() >= K, ErrorCode::InvalidArgument, "Poisson kernel smaller than truncation");
  const double lm = p.lambda * p.mu;
  const double size_weighted = f.mean_size();

  // Accumulate f_j Pois(m; j a) Pois(r; m a) into cluster size z = j + m + r,
  // walking each kernel column contiguously.
  std::vector<double> g(K, 0.0);
  for (std::size_t j = 1; j <= K; ++j) {
    const double fj = f.probs[j - 1];
    if (fj == 0.0) continue;
    const double* children = kernel.column(j);
    for (std::size_t m = 0; j + m <= K; ++m) {
      const double w = fj * children[m];
      if (w == 0.0) continue;
      const double* grandchildren = kernel.column(m);
      double* out = g.data() + (j + m - 1);
      const std::size_t len = K - (j + m) + 1;
      for (std::size_t r = 0; r < len; ++r) out[r] += w * grandchildren[r];
    }
  }
  for (std::size_t z = 2; z <= K; ++z) g[z - 1] += lm * kernel(z - 1, 1) * size_weighted;
  g[0] = first_cluster_term(f, p);
  normalize(g);
  return ClusterDistribution{std::move(g), Generations::ThreeCombined};
}

std::size_t MatchingNumberDistribution::quantile(double q) const {
  require(q >= 0 && q <= 1, ErrorCode::InvalidArgument, "quantile level must lie in [0, 1]");
  double c = 0;
  for (std::size_t k = 1; k <= probs.size(); ++k) {
    c += probs[k - 1];
    if (c >= q - 1e-15) return k;
  }
  return probs.size();
}

MatchingNumberDistribution matching_number_distribution(const ClusterDistribution& f) {
  require(!f.probs.empty(), ErrorCode::InvalidArgument, "empty cluster distribution");
  MatchingNumberDistribution out;
  out.probs.resize(f.probs.size());
  double total = 0;
  for (std::size_t k = 1; k <= f.probs.size(); ++k) {
    require(f.probs[k - 1] >= 0, ErrorCode::InvalidArgument, "negative cluster probability");
    out.probs[k - 1] = static_cast<double>(k) * f.probs[k - 1];
    total += out.probs[k - 1];
  }
  require(total > 0, ErrorCode::InvalidArgument, "cluster distribution is all zero");
  double mean = 0;
  for (std::size_t k = 1; k <= out.probs.size(); ++k) {
    out.probs[k - 1] /= total;
    mean += static_cast<double>(k) * out.probs[k - 1];
  }
  out.mean = mean;
  return out;
}

MatchingPrior matching_prior(const PopulationParams& p, Generations generations, const EquilibriumOptions& options) {
  MatchingPrior out;
  out.params = p;
  require(options.truncation >= 2, ErrorCode::InvalidArgument, "truncation must be >= 2");
  p.validate();
  const PoissonKernel kernel(options.truncation, p.identical_rate());
  out.single_generation = equilibrium(p, options, kernel);
  switch (generations) {
    case Generations::One:
      out.combined = out.single_generation.distribution;
      break;
    case Generations::TwoCombined:
      out.combined = combine_two(out.single_generation.distribution, p, kernel);
      break;
    case Generations::ThreeCombined:
      out.combined = combine_three(out.single_generation.distribution, p, kernel);
      break;
  }
  out.distribution = matching_number_distribution(out.combined);
  return out;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q, std::size_t kmax) {
  double s = 0;
  for (std::size_t k = 0; k < kmax; ++k) {
    const double a = k < p.size() ? p[k] : 0.0;
    const double b = k < q.size() ? q[k] : 0.0;
    s += std::abs(a - b);
  }
  return 0.5 * s;
}

}  // namespace haplodrift
