#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace haplodrift {

enum class SimMode {
  /// Each individual leaves Poisson(lambda) offspring.
  PoissonGrowth,
  /// Generation g has round(initial_size * lambda^g) members, each choosing a
  /// parent uniformly with replacement. lambda = 1 is the classical fixed-size
  /// Wright-Fisher model.
  WrightFisherFixed,
};

struct SimConfig {
  std::uint64_t initial_size = 1000;
  std::size_t generations = 100;
  double lambda = 1.0;
  double mu = 0.0;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::WrightFisherFixed;
  /// Generations whose final-generation cluster histogram is kept.
  std::vector<std::size_t> snapshot_generations;
  std::uint64_t max_population = 50'000'000;

  void validate() const;
};

/// counts[k - 1] = number of clusters of size k.
struct ClusterHistogram {
  std::vector<std::uint64_t> counts;

  std::uint64_t clusters() const;
  std::uint64_t individuals() const;
  /// Proportion of clusters of each size, padded or cut to `truncation`
  /// entries (0 keeps the natural length).
  std::vector<double> proportions(std::size_t truncation = 0) const;
  void add(std::size_t size, std::uint64_t n = 1);
};

/// Cluster sizes of a label vector (labels equal means haplotypes identical).
ClusterHistogram histogram_of_labels(std::vector<std::uint64_t> labels);

struct SimSnapshot {
  std::size_t generation = 0;
  ClusterHistogram histogram;
};

struct SimSummary {
  ClusterHistogram final_generation;
  /// Final three generations pooled (fewer if the run is shorter).
  ClusterHistogram final_three_generations;
  std::vector<std::uint64_t> population_trajectory;  // sizes for generations 0..G
  std::vector<SimSnapshot> snapshots;
  std::optional<std::size_t> extinct_at;
};

/// Forward simulation under the infinite-sites approximation: every mutation
/// yields a fresh label. Generation 0 is all distinct. Deterministic in seed.
SimSummary simulate(const SimConfig& cfg);

/// Independent generator for replicate `stream` of a run seeded with `seed`.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Founder plus all identical descendants of a Poisson(lambda_eff) branching
/// process, over `trials` independent realizations. Totals above `cap` are
/// pooled into the last bin.
ClusterHistogram total_progeny_histogram(double lambda_eff, std::uint64_t trials, std::uint64_t seed,
                                         std::size_t cap = 100000);

/// Direct Monte Carlo of combined-generation clusters: founder clusters of
/// size j drawn from `founder_sizes` (probs[j - 1]), individual offspring
/// Poisson(lambda), each mutating with probability mu. Records every cluster
/// observed across `generations` successive generations (2 or 3).
ClusterHistogram simulate_family_clusters(const std::vector<double>& founder_sizes, double lambda, double mu,
                                          int generations, std::uint64_t trials, std::uint64_t seed);

}  // namespace haplodrift
