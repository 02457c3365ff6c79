#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "haplodrift/haplotype.hpp"
#include "haplodrift/match_model.hpp"
#include "haplodrift/optimizer.hpp"
#include "haplodrift/peak_model.hpp"

namespace haplodrift {

/// Contributors under a hypothesis: the listed typed persons followed by
/// `n_untyped` unknown males.
struct Hypothesis {
  std::vector<Haplotype> typed;
  std::size_t n_untyped = 0;
  std::string label;

  std::size_t contributors() const { return typed.size() + n_untyped; }
  void validate(const Kit& kit) const;
};

/// Which locus profiles an untyped male may carry at a locus.
struct CandidateOptions {
  /// Alleles considered: every observed peak allele shifted by up to this
  /// many whole repeats.
  int neighbourhood = 1;
  bool allow_deleted = true;
  bool allow_duplicated = true;
};

/// Candidate profiles S_y at one locus with their log frequencies
/// log((n_g + 1) / (sum_S n + |S|)) from the database.
struct LocusCandidates {
  std::vector<LocusProfile> profiles;
  std::vector<double> log_frequency;
};

/// Candidate set for one locus. Multicopy loci admit duplicated pairs only.
/// A locus without peaks falls back to the profiles seen in the database.
std::vector<LocusProfile> candidate_locus_profiles(const LocusEvidence& evidence, const Locus& locus,
                                                   const HaplotypeDatabase& db, std::size_t locus_index,
                                                   const CandidateOptions& options);

std::vector<LocusCandidates> build_locus_candidates(const Kit& kit, const EvidenceProfile& evidence,
                                                    const HaplotypeDatabase& db, const CandidateOptions& options);

struct MixtureOptions {
  std::size_t k = 1500;
  std::size_t m = 5000;
  CandidateOptions candidates{};
  SimplexOptions simplex{};
  bool fit_degradation = false;
};

/// Everything the likelihood needs, fixed for one hypothesis.
struct MixtureProblem {
  Kit kit;
  EvidenceProfile evidence;
  Hypothesis hypothesis;
  PeakModelConfig peak_model;
  std::vector<LocusCandidates> candidates;

  MixtureProblem(Kit kit, EvidenceProfile evidence, Hypothesis hypothesis, PeakModelConfig peak_model,
                 const HaplotypeDatabase& db, const CandidateOptions& options = {});

  /// log P(E_y | typed, untyped choice) where `choice[u]` indexes candidates[y].
  double locus_log_likelihood(std::size_t y, const std::vector<std::size_t>& choice,
                              const ContributorParams& params) const;
  /// Number of untyped joint profiles at locus y, |S_y|^U.
  std::size_t joint_count(std::size_t y) const;
};

struct Step1Result {
  ContributorParams params;
  double log_likelihood = 0.0;  // natural log
  std::size_t evaluations = 0;
};

/// Product-rule log-likelihood sum_y log sum_g P(E_y | g) prod_u p(g_u).
double product_rule_log_likelihood(const MixtureProblem& problem, const ContributorParams& params);

/// Step 1. Multi-start simplex over log cell counts: an equal split plus, for
/// each contributor, 0.6 of the total with the rest shared; the total comes
/// from the mean per-locus peak-height sum.
Step1Result maximize_product_rule(const MixtureProblem& problem, const MixtureOptions& options = {});

struct LocusListEntry {
  std::vector<std::size_t> choice;  // per untyped person, index into candidates[y]
  double log_score = 0.0;           // log P(E_y | .) + sum_u log p(g_u)
};

/// Step 2. The k best untyped joint profiles at locus y by exhaustive
/// enumeration; ties keep enumeration order.
std::vector<LocusListEntry> top_k_locus_profiles(const MixtureProblem& problem, std::size_t y,
                                                 const ContributorParams& params, std::size_t k);

struct Combination {
  std::vector<std::size_t> index;
  double score = 0.0;
};

/// The m best index vectors by summed score over lists sorted descending,
/// by best-first search on the index lattice. Ties are broken by the
/// lexicographically smaller index vector.
std::vector<Combination> top_m_combinations(const std::vector<std::vector<double>>& sorted_scores, std::size_t m);

struct CandidateHaplotype {
  std::vector<std::size_t> list_index;  // per locus, into the Step 2 lists
  std::vector<Haplotype> untyped;
  double product_log_score = 0.0;
  double log_probability = 0.0;     // sum_u log P(h_u)
  double log_likelihood = 0.0;      // log P(E | h, K) at the final parameters
  double log_weight = 0.0;          // log_likelihood + log_probability
  double posterior = 0.0;           // normalized weight
};

struct CandidateHaplotypeSet {
  std::vector<std::vector<LocusListEntry>> locus_lists;
  std::vector<CandidateHaplotype> candidates;
};

/// Step 3 applied to the Step 2 lists.
CandidateHaplotypeSet top_m_haplotypes(const MixtureProblem& problem, std::vector<std::vector<LocusListEntry>> lists,
                                       std::size_t m);

struct Step5Result {
  ContributorParams params;
  double log_likelihood = 0.0;  // natural log of sum_h P(E | h, K) p(h)
  std::size_t evaluations = 0;
};

/// Steps 4 and 5: attach P(h) = prod_u P(h_u) from the match model (counts
/// taken over the database and `typed_pool`), then re-maximize the candidate
/// sum over cell counts. Fills the per-candidate likelihoods and weights and
/// sorts the set by weight.
Step5Result reweight_and_maximize(const MixtureProblem& problem, CandidateHaplotypeSet& set,
                                  const HaplotypeDatabase& db, std::span<const Haplotype> typed_pool,
                                  const MatchModel& model, const ContributorParams& start,
                                  const MixtureOptions& options = {});

struct MarginalHaplotype {
  Haplotype haplotype;
  double probability = 0.0;
};

/// Marginal distribution of untyped person `u` over the weighted set.
std::vector<MarginalHaplotype> deconvolve(const CandidateHaplotypeSet& set, std::size_t u);

struct MixtureAnalysis {
  Step1Result step1;
  Step5Result step5;
  CandidateHaplotypeSet set;
  std::vector<std::vector<MarginalHaplotype>> marginals;
  std::vector<double> ranked_log10_weights;
};

/// Steps 1 to 5 and deconvolution. With no untyped contributors the
/// haplotype model adds nothing and the Step 1 result is returned for both.
MixtureAnalysis analyze_mixture(const MixtureProblem& problem, const HaplotypeDatabase& db,
                                std::span<const Haplotype> typed_pool, const MatchModel& model,
                                const MixtureOptions& options = {});

}  // namespace haplodrift
