#pragma once

#include <cstddef>
#include <vector>

namespace haplodrift {

/// Offspring mean `lambda` (1 + growth rate) and aggregate per-generation
/// mutation probability `mu` of a haplotype. The identical-offspring process
/// must be sub-critical: lambda (1 - mu) < 1.
struct PopulationParams {
  double lambda = 1.0;
  double mu = 0.0;

  static PopulationParams from_growth(double growth, double mu) { return {1.0 + growth, mu}; }

  double identical_rate() const { return lambda * (1.0 - mu); }
  /// Throws Supercritical or InvalidArgument. The one-step combinations are
  /// finite sums and accept the critical case lambda (1 - mu) = 1.
  void validate(bool allow_critical = false) const;
};

enum class Generations { One = 1, TwoCombined = 2, ThreeCombined = 3 };

/// Proportion of clusters (sets of identical haplotypes) having k members,
/// stored as probs[k - 1] for k = 1..K.
struct ClusterDistribution {
  std::vector<double> probs;
  Generations generations = Generations::One;

  std::size_t truncation() const { return probs.size(); }
  double at(std::size_t k) const { return probs.at(k - 1); }
  /// Mass at the truncation bound; large values mean K is too small.
  double tail() const { return probs.back(); }
  double mean_size() const;

  static ClusterDistribution singleton(std::size_t truncation);
};

/// Poisson(x; j * rate) for x, j in 0..K, stored column-wise by j.
class PoissonKernel {
 public:
  PoissonKernel(std::size_t truncation, double rate);

  std::size_t truncation() const { return truncation_; }
  double rate() const { return rate_; }
  double operator()(std::size_t x, std::size_t j) const { return table_[j * (truncation_ + 1) + x]; }
  const double* column(std::size_t j) const { return table_.data() + j * (truncation_ + 1); }

 private:
  std::size_t truncation_;
  double rate_;
  std::vector<double> table_;
};

struct GenerationStep {
  ClusterDistribution next;
  double unnormalized_mass = 0.0;  // C* for C = 1
};

GenerationStep next_generation(const ClusterDistribution& f, const PopulationParams& p);
GenerationStep next_generation(const ClusterDistribution& f, const PopulationParams& p, const PoissonKernel& kernel);

struct EquilibriumOptions {
  std::size_t truncation = 512;
  std::size_t max_iterations = 200;
  double tolerance = 1e-14;
};

struct EquilibriumResult {
  ClusterDistribution distribution;
  std::size_t iterations = 0;
  double residual = 0.0;  // max_k |f_k - f*_k| of the last step
  bool converged = false;
};

/// Iterates the single-generation map from the all-singletons start until the
/// sup-norm change drops below tolerance or max_iterations is reached.
EquilibriumResult equilibrium(const PopulationParams& p, const EquilibriumOptions& options = {});
EquilibriumResult equilibrium(const PopulationParams& p, const EquilibriumOptions& options, const PoissonKernel& kernel);

/// Cluster sizes over a generation and its offspring generation combined.
ClusterDistribution combine_two(const ClusterDistribution& f, const PopulationParams& p);
ClusterDistribution combine_two(const ClusterDistribution& f, const PopulationParams& p, const PoissonKernel& kernel);

enum class ThreeGenerationMethod {
  /// Collapses the Poisson(j lambda) / binomial thinning pair into
  /// Poisson(j lambda (1 - mu)); exact and O(K^3 / 6).
  Thinned,
  /// Sums the offspring count k explicitly over a window of the
  /// Poisson(j lambda) mass. Reference route; O(K^4) so only for small K.
  DirectSum,
};

/// Cluster sizes over three successive generations combined.
ClusterDistribution combine_three(const ClusterDistribution& f, const PopulationParams& p,
                                  ThreeGenerationMethod method = ThreeGenerationMethod::Thinned);
/// Thinned route with a prebuilt kernel of rate lambda (1 - mu).
ClusterDistribution combine_three(const ClusterDistribution& f, const PopulationParams& p, const PoissonKernel& kernel);

/// One (k, m) term of the grandchild sum for a founding cluster of size j
/// reaching combined size z: Pois(k; j lambda) b(k - m; k, mu)
/// Pois(z - j - m; m lambda (1 - mu)).
double three_generation_term(std::size_t j, std::size_t z, std::size_t k, std::size_t m, const PopulationParams& p);
/// The full k/m double sum of `three_generation_term` over the k window.
double three_generation_inner_sum(std::size_t j, std::size_t z, const PopulationParams& p);

/// Probability that a randomly chosen male shares his haplotype with k males
/// in total (himself included): the size-biased cluster distribution.
struct MatchingNumberDistribution {
  std::vector<double> probs;  // probs[k - 1]
  double mean = 0.0;

  std::size_t truncation() const { return probs.size(); }
  double at(std::size_t k) const { return probs.at(k - 1); }
  /// Smallest k with P(N <= k) >= q.
  std::size_t quantile(double q) const;
};

MatchingNumberDistribution matching_number_distribution(const ClusterDistribution& f);

struct MatchingPrior {
  MatchingNumberDistribution distribution;
  EquilibriumResult single_generation;
  ClusterDistribution combined;
  PopulationParams params;
};

/// Equilibrium, generation combination and size-biasing in one call.
MatchingPrior matching_prior(const PopulationParams& p, Generations generations,
                             const EquilibriumOptions& options = {});

/// Total variation distance restricted to sizes 1..kmax, 0.5 * sum |p - q|.
double total_variation(const std::vector<double>& p, const std::vector<double>& q, std::size_t kmax);

}  // namespace haplodrift
