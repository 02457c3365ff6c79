#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "haplodrift/branching.hpp"
#include "haplodrift/haplotype.hpp"

namespace haplodrift {

/// Deletion (a, b) and excess-duplication (c, d) weights.
struct PatternFactorParams {
  double a = 0.0048;
  double b = 0.105;
  double c = 0.0064;
  double d = 0.063;

  void validate() const;
};

/// P(c_I other copies among the M observed | n copies in a population of
/// omega, h_u among the M + 1 sampled).
double conditional_count_likelihood(std::size_t c_identity, std::size_t n, std::size_t observed, std::uint64_t omega);

struct PosteriorResult {
  std::vector<double> probs;  // probs[n - 1] = P(N = n | c_I, M, omega)
  double mean = 0.0;
  double p_u = 0.0;
  /// Posterior mass at the truncation bound.
  double tail_mass = 0.0;

  std::size_t quantile(double q) const;
};

/// Lightweight view used for a single posterior evaluation.
struct PopulationContext {
  std::uint64_t omega = 200'000'000;
  std::size_t observed = 0;  // M
  const MatchingNumberDistribution* prior = nullptr;
};

PosteriorResult posterior_matching(std::size_t c_identity, const PopulationContext& ctx);

/// Run-length weights over loci in kit order: deletions give a then b per
/// continuation, excess duplications on single-copy loci give c then d.
/// A multicopy locus never counts as a duplication and ends a duplication run.
struct DelDupExponents {
  int a = 0;
  int b = 0;
  int c = 0;
  int d = 0;
};
DelDupExponents deldup_factor_exponents(const DelDupPattern& d, const Kit& kit);

double deletion_duplication_factor(const DelDupPattern& d, const Kit& kit, std::size_t c_deldup, std::size_t observed,
                                   const PatternFactorParams& params);

double repeat_factor(const RepeatPattern& r, const MatchCounts& counts);

struct MatchModelConfig {
  double growth = 0.0;
  Generations generations = Generations::ThreeCombined;
  EquilibriumOptions equilibrium{};
  PatternFactorParams factors{};
  std::uint64_t omega = 200'000'000;

  void validate() const;
};

/// Matching-number priors keyed by deletion/duplication pattern, which alone
/// fixes the aggregate mutation rate. Thread-safe.
class PriorCache {
 public:
  PriorCache(Kit kit, double growth, Generations generations, EquilibriumOptions options = {});

  std::shared_ptr<const MatchingPrior> get(const DelDupPattern& pattern);
  std::size_t size() const;
  const Kit& kit() const { return kit_; }
  double growth() const { return growth_; }
  Generations generations() const { return generations_; }
  const EquilibriumOptions& options() const { return options_; }

 private:
  Kit kit_;
  double growth_;
  Generations generations_;
  EquilibriumOptions options_;
  mutable std::mutex mutex_;
  std::unordered_map<DelDupPattern, std::shared_ptr<const MatchingPrior>> priors_;
};

struct MatchProbabilityResult {
  double p_u = 0.0;
  double f_D = 1.0;
  double f_R = 1.0;
  double probability = 0.0;
  double aggregate_mu = 0.0;
  MatchCounts counts;
  PosteriorResult posterior;
};

/// P(h_u) for single haplotypes, with prior and posterior caches.
class MatchModel {
 public:
  explicit MatchModel(Kit kit, MatchModelConfig cfg = {});
  /// Shares an existing prior cache (must agree on kit, growth and generations).
  MatchModel(std::shared_ptr<PriorCache> priors, MatchModelConfig cfg);

  const MatchModelConfig& config() const { return cfg_; }
  const Kit& kit() const { return priors_->kit(); }
  std::shared_ptr<PriorCache> priors() const { return priors_; }

  MatchProbabilityResult probability(const Haplotype& h, const HaplotypeDatabase& db,
                                     std::span<const Haplotype> typed) const;
  /// Same, from already computed counts.
  MatchProbabilityResult probability(const Haplotype& h, const MatchCounts& counts) const;

 private:
  std::shared_ptr<const PosteriorResult> posterior(const std::shared_ptr<const MatchingPrior>& prior,
                                                   std::size_t c_identity, std::size_t observed) const;

  MatchModelConfig cfg_;
  std::shared_ptr<PriorCache> priors_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<const MatchingPrior*, std::size_t, std::size_t>, std::shared_ptr<const PosteriorResult>>
      posteriors_;
};

MatchProbabilityResult haplotype_probability(const Haplotype& h, const HaplotypeDatabase& db,
                                             std::span<const Haplotype> typed, const MatchModel& model);

}  // namespace haplodrift
