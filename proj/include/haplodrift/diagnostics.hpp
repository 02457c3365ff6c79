#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "haplodrift/haplotype.hpp"
#include "haplodrift/mixture.hpp"
#include "haplodrift/peak_model.hpp"

namespace haplodrift {

/// A fitted model as a finite mixture: each candidate lists every
/// contributor's haplotype (typed first), with a prior log weight.
struct FittedMixture {
  std::vector<std::vector<Haplotype>> candidates;
  std::vector<double> log_prior;
  ContributorParams params;
  PeakModelConfig peak_model;
  double threshold = 15.0;
};

/// The Step 5 candidates (or the typed contributors alone when there are no
/// untyped ones), weighted by their haplotype probabilities.
FittedMixture fitted_mixture(const MixtureProblem& problem, const MixtureAnalysis& analysis);

struct PitPoint {
  std::size_t locus = 0;
  Allele allele;
  double height = 0.0;
  double value = 0.0;  // P(H <= h | H >= T, earlier peaks)
};

struct MonitorPoint {
  std::size_t locus = 0;
  Allele allele;
  bool present = false;
  double p_present = 0.0;
  double score = 0.0;  // normalized cumulative score after this position
};

struct DiagnosticTrace {
  std::vector<PitPoint> pit;
  std::vector<MonitorPoint> monitor;
  double final_score = 0.0;
};

/// Prequential pass over loci in kit order and allele positions in ascending
/// order. Positions are those any candidate expects plus the observed peaks.
/// Mixture weights are updated with each position's evidence before moving on.
/// The monitor accumulates the logarithmic score of presence/absence and
/// normalizes it as (S - E) / sqrt(V).
DiagnosticTrace prequential_diagnostics(const Kit& kit, const EvidenceProfile& evidence, const FittedMixture& model);

/// Draws a candidate by prior weight, then a peak table from it.
EvidenceProfile simulate_from_fitted(const Kit& kit, const FittedMixture& model, std::mt19937_64& rng);

/// Two-sided one-sample Kolmogorov-Smirnov test against Uniform(0, 1),
/// asymptotic distribution with the Stephens small-sample correction.
double ks_uniform_pvalue(std::span<const double> values);

}  // namespace haplodrift
