#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "haplodrift/haplotype.hpp"

namespace haplodrift {

struct Peak {
  Allele allele;
  double height = 0.0;
};

struct LocusEvidence {
  std::vector<Peak> peaks;  // sorted by allele, unique alleles

  const Peak* find(const Allele& a) const;
};

struct EvidenceProfile {
  std::vector<LocusEvidence> loci;
  double analytic_threshold = 15.0;
};

/// Reference peak-height model.
///
/// Contributor i delivers w_i = height_per_cell * extraction_efficiency *
/// aliquot_fraction * cells_i * exp(-degradation_i * x_y) RFU per allele copy,
/// where x_y in [0, 1] is the locus position in kit order. The allelic dose
/// D_a sums w_i over copies of allele a. A fraction `stutter_proportion` of
/// each allele's product moves one repeat down, so the expected height at
/// position a is (1 - s) D_a + s D_{a+1}. Observed heights are gamma
/// distributed with that mean and coefficient of variation `cv`; positions
/// with positive expectation but no peak contribute P(H < T) (dropout); peaks
/// at positions with nothing expected are drop-in, with probability
/// `dropin_rate` times an exponential excess over T of mean `dropin_mean`.
struct PeakModelConfig {
  double height_per_cell = 8.0;
  double stutter_proportion = 0.08;
  double cv = 0.3;
  double extraction_efficiency = 0.2;
  double aliquot_fraction = 0.1;
  double dropin_rate = 0.005;
  double dropin_mean = 20.0;

  void validate() const;
  double rfu_per_cell() const { return height_per_cell * extraction_efficiency * aliquot_fraction; }
};

struct ContributorParams {
  std::vector<double> cell_counts;  // pre-extraction cells per contributor
  std::vector<double> degradation;  // per contributor, empty means all zero

  std::size_t size() const { return cell_counts.size(); }
  double degradation_of(std::size_t i) const { return degradation.empty() ? 0.0 : degradation[i]; }
  std::vector<double> proportions() const;
  void validate() const;
};

struct ExpectedPeak {
  Allele allele;
  double mean = 0.0;
};

double locus_position(std::size_t locus_index, std::size_t locus_count);

/// Expected heights for one locus given one profile per contributor, sorted
/// by allele. Only positions with positive expectation are returned.
std::vector<ExpectedPeak> expected_peaks(std::span<const LocusProfile> joint, const ContributorParams& params,
                                         const PeakModelConfig& cfg, double position);

double peak_log_density(double height, double mean, const PeakModelConfig& cfg);
double log_dropout_probability(double mean, double threshold, const PeakModelConfig& cfg);
/// P(H <= h) under the gamma height model (no censoring).
double peak_cdf(double height, double mean, const PeakModelConfig& cfg);
double dropin_log_density(double height, double threshold, const PeakModelConfig& cfg);

double locus_log_likelihood(const LocusEvidence& evidence, std::span<const LocusProfile> joint,
                            const ContributorParams& params, const PeakModelConfig& cfg, double threshold,
                            double position);
double locus_likelihood(const LocusEvidence& evidence, std::span<const LocusProfile> joint,
                        const ContributorParams& params, const PeakModelConfig& cfg, double threshold,
                        double position);

struct EvidenceSimulationOptions {
  bool dropin = false;
};

/// Draws a peak table from the reference model for fully known contributors.
EvidenceProfile simulate_evidence(const Kit& kit, std::span<const Haplotype> contributors,
                                  const ContributorParams& params, const PeakModelConfig& cfg, double threshold,
                                  std::mt19937_64& rng, const EvidenceSimulationOptions& options = {});

}  // namespace haplodrift
