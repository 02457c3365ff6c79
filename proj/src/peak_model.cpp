#include "haplodrift/peak_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "haplodrift/error.hpp"

namespace haplodrift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void add_dose(std::vector<ExpectedPeak>& doses, const Allele& a, double amount) {
  for (auto& d : doses) {
    if (d.allele == a) {
      d.mean += amount;
      return;
    }
  }
  doses.push_back({a, amount});
}

}  // namespace

const Peak* LocusEvidence::find(const Allele& a) const {
  auto it = std::lower_bound(peaks.begin(), peaks.end(), a,
                             [](const Peak& p, const Allele& x) { return p.allele < x; });
  if (it == peaks.end() || it->allele != a) return nullptr;
  return &*it;
}

void PeakModelConfig::validate() const {
  require(height_per_cell > 0 && cv > 0 && extraction_efficiency > 0 && aliquot_fraction > 0,
          ErrorCode::InvalidArgument, "peak model parameters must be positive");
  require(stutter_proportion >= 0 && stutter_proportion < 0.5, ErrorCode::InvalidArgument,
          "stutter proportion must lie in [0, 0.5)");
  require(dropin_rate > 0 && dropin_rate < 1 && dropin_mean > 0, ErrorCode::InvalidArgument,
          "drop-in rate must lie in (0, 1) with positive mean");
}

std::vector<double> ContributorParams::proportions() const {
  const double total = std::accumulate(cell_counts.begin(), cell_counts.end(), 0.0);
  std::vector<double> out(cell_counts.size(), 0.0);
  if (total > 0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = cell_counts[i] / total;
  }
  return out;
}

void ContributorParams::validate() const {
  require(!cell_counts.empty(), ErrorCode::InvalidArgument, "no contributors");
  for (double c : cell_counts) require(c >= 0 && std::isfinite(c), ErrorCode::InvalidArgument, "cell counts must be >= 0");
  require(degradation.empty() || degradation.size() == cell_counts.size(), ErrorCode::InvalidArgument,
          "degradation vector length differs from contributor count");
}

double locus_position(std::size_t locus_index, std::size_t locus_count) {
  if (locus_count <= 1) return 0.0;
  return static_cast<double>(locus_index) / static_cast<double>(locus_count - 1);
}

std::vector<ExpectedPeak> expected_peaks(std::span<const LocusProfile> joint, const ContributorParams& params,
                                         const PeakModelConfig& cfg, double position) {
  require(!joint.empty(), ErrorCode::InvalidArgument, "empty joint profile");
  require(joint.size() == params.size(), ErrorCode::InvalidArgument, "joint profile and contributor count differ");
  std::vector<ExpectedPeak> doses;
  doses.reserve(8);
  const double unit = cfg.rfu_per_cell();
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const double w = unit * params.cell_counts[i] * std::exp(-params.degradation_of(i) * position);
    if (w <= 0) continue;
    const auto& p = joint[i];
    if (p.kind() == ProfileKind::Deleted) continue;
    add_dose(doses, p.low(), w);
    if (p.kind() == ProfileKind::Duplicated) add_dose(doses, p.high(), w);
  }
  const double s = cfg.stutter_proportion;
  std::vector<ExpectedPeak> out;
  out.reserve(doses.size() * 2);
  for (const auto& d : doses) {
    add_dose(out, d.allele, (1.0 - s) * d.mean);
    if (s > 0) add_dose(out, d.allele.stutter(), s * d.mean);
  }
  std::sort(out.begin(), out.end(), [](const ExpectedPeak& a, const ExpectedPeak& b) { return a.allele < b.allele; });
  return out;
}

double peak_log_density(double height, double mean, const PeakModelConfig& cfg) {
  const double shape = 1.0 / (cfg.cv * cfg.cv);
  const double scale = mean / shape;
  return (shape - 1.0) * std::log(height) - height / scale - shape * std::log(scale) - std::lgamma(shape);
}

double peak_cdf(double height, double mean, const PeakModelConfig& cfg) {
  const double shape = 1.0 / (cfg.cv * cfg.cv);
  return boost::math::gamma_p(shape, height * shape / mean);
}

double log_dropout_probability(double mean, double threshold, const PeakModelConfig& cfg) {
  const double shape = 1.0 / (cfg.cv * cfg.cv);
  const double x = threshold * shape / mean;
  // The upper tail is tiny when the mean is far below threshold; use the
  // complement to keep precision.
  const double q = boost::math::gamma_q(shape, x);
  if (q < 0.5) return std::log1p(-q);
  return std::log(boost::math::gamma_p(shape, x));
}

double dropin_log_density(double height, double threshold, const PeakModelConfig& cfg) {
  return std::log(cfg.dropin_rate) - std::log(cfg.dropin_mean) - (height - threshold) / cfg.dropin_mean;
}

double locus_log_likelihood(const LocusEvidence& evidence, std::span<const LocusProfile> joint,
                            const ContributorParams& params, const PeakModelConfig& cfg, double threshold,
                            double position) {
  const auto expected = expected_peaks(joint, params, cfg, position);
  double ll = 0.0;
  std::size_t e = 0;
  std::size_t o = 0;
  const auto& peaks = evidence.peaks;
  // Merge the two sorted position lists.
  while (e < expected.size() || o < peaks.size()) {
    if (o == peaks.size() || (e < expected.size() && expected[e].allele < peaks[o].allele)) {
      ll += log_dropout_probability(expected[e].mean, threshold, cfg);
      ++e;
    } else if (e == expected.size() || peaks[o].allele < expected[e].allele) {
      ll += dropin_log_density(peaks[o].height, threshold, cfg);
      ++o;
    } else {
      ll += peak_log_density(peaks[o].height, expected[e].mean, cfg);
      ++e;
      ++o;
    }
    if (ll == kNegInf) break;
  }
  return ll;
}

double locus_likelihood(const LocusEvidence& evidence, std::span<const LocusProfile> joint,
                        const ContributorParams& params, const PeakModelConfig& cfg, double threshold,
                        double position) {
  return std::exp(locus_log_likelihood(evidence, joint, params, cfg, threshold, position));
}

EvidenceProfile simulate_evidence(const Kit& kit, std::span<const Haplotype> contributors,
                                  const ContributorParams& params, const PeakModelConfig& cfg, double threshold,
                                  std::mt19937_64& rng, const EvidenceSimulationOptions& options) {
  require(contributors.size() == params.size(), ErrorCode::InvalidArgument, "contributor count mismatch");
  const double shape = 1.0 / (cfg.cv * cfg.cv);
  EvidenceProfile ev;
  ev.analytic_threshold = threshold;
  ev.loci.resize(kit.size());
  std::vector<LocusProfile> joint;
  for (std::size_t y = 0; y < kit.size(); ++y) {
    joint.clear();
    for (const auto& h : contributors) {
      require(h.size() == kit.size(), ErrorCode::KitMismatch, "contributor typed on a different kit");
      joint.push_back(h.profiles[y]);
    }
    const auto expected = expected_peaks(joint, params, cfg, locus_position(y, kit.size()));
    auto& peaks = ev.loci[y].peaks;
    for (const auto& x : expected) {
      std::gamma_distribution<double> height(shape, x.mean / shape);
      const double h = height(rng);
      if (h >= threshold) peaks.push_back({x.allele, h});
    }
    if (options.dropin && !expected.empty()) {
      std::bernoulli_distribution has_dropin(cfg.dropin_rate);
      if (has_dropin(rng)) {
        std::vector<Allele> free;
        for (int r = expected.front().allele.repeat - 2; r <= expected.back().allele.repeat + 2; ++r) {
          if (r < 0) continue;
          Allele a{r, 0};
          bool taken = false;
          for (const auto& x : expected) taken = taken || x.allele == a;
          if (!taken) free.push_back(a);
        }
        if (!free.empty()) {
          std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
          std::exponential_distribution<double> excess(1.0 / cfg.dropin_mean);
          peaks.push_back({free[pick(rng)], threshold + excess(rng)});
        }
      }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.allele < b.allele; });
  }
  return ev;
}

}  // namespace haplodrift
