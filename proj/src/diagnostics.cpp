#include "haplodrift/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "haplodrift/error.hpp"
#include "haplodrift/special.hpp"

namespace haplodrift {

namespace {

constexpr double kTiny = 1e-300;

double clamp_probability(double p) { return std::clamp(p, kTiny, 1.0 - 1e-16); }

}  // namespace

FittedMixture fitted_mixture(const MixtureProblem& problem, const MixtureAnalysis& analysis) {
  FittedMixture out;
  out.params = analysis.step5.params;
  out.peak_model = problem.peak_model;
  out.threshold = problem.evidence.analytic_threshold;
  for (const auto& c : analysis.set.candidates) {
    std::vector<Haplotype> all = problem.hypothesis.typed;
    all.insert(all.end(), c.untyped.begin(), c.untyped.end());
    out.candidates.push_back(std::move(all));
    out.log_prior.push_back(c.log_probability);
  }
  return out;
}

DiagnosticTrace prequential_diagnostics(const Kit& kit, const EvidenceProfile& evidence, const FittedMixture& model) {
  require(!model.candidates.empty() && model.candidates.size() == model.log_prior.size(), ErrorCode::InvalidArgument,
          "fitted mixture has no candidates");
  require(evidence.loci.size() == kit.size(), ErrorCode::KitMismatch, "evidence locus count differs from kit");
  const auto& cfg = model.peak_model;
  const double T = model.threshold;
  const std::size_t n = model.candidates.size();
  std::vector<double> logw = model.log_prior;
  DiagnosticTrace trace;
  double S = 0, E = 0, V = 0;

  std::vector<std::vector<ExpectedPeak>> expected(n);
  std::vector<LocusProfile> joint;
  for (std::size_t y = 0; y < kit.size(); ++y) {
    const double position = locus_position(y, kit.size());
    std::vector<Allele> positions;
    for (std::size_t c = 0; c < n; ++c) {
      joint.clear();
      for (const auto& h : model.candidates[c]) joint.push_back(h.profiles.at(y));
      expected[c] = expected_peaks(joint, model.params, cfg, position);
      for (const auto& e : expected[c]) positions.push_back(e.allele);
    }
    for (const auto& p : evidence.loci[y].peaks) positions.push_back(p.allele);
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

    for (const auto& a : positions) {
      const Peak* peak = evidence.loci[y].find(a);
      const double top = *std::max_element(logw.begin(), logw.end());
      std::vector<double> w(n);
      double wsum = 0;
      for (std::size_t c = 0; c < n; ++c) {
        w[c] = std::exp(logw[c] - top);
        wsum += w[c];
      }
      double p_present = 0, pit_num = 0, pit_den = 0;
      for (std::size_t c = 0; c < n; ++c) {
        const auto it = std::find_if(expected[c].begin(), expected[c].end(),
                                     [&](const ExpectedPeak& e) { return e.allele == a; });
        const double mean = it == expected[c].end() ? 0.0 : it->mean;
        const double wc = w[c] / wsum;
        double present = cfg.dropin_rate;
        if (mean > 0) present = -std::expm1(log_dropout_probability(mean, T, cfg));
        p_present += wc * present;
        if (peak != nullptr) {
          if (mean > 0) {
            pit_num += wc * (peak_cdf(peak->height, mean, cfg) - peak_cdf(T, mean, cfg));
            logw[c] += peak_log_density(peak->height, mean, cfg);
          } else {
            pit_num += wc * cfg.dropin_rate * -std::expm1(-(peak->height - T) / cfg.dropin_mean);
            logw[c] += dropin_log_density(peak->height, T, cfg);
          }
          pit_den += wc * present;
        } else if (mean > 0) {
          logw[c] += log_dropout_probability(mean, T, cfg);
        }
      }
      const double p = clamp_probability(p_present);
      const bool is_present = peak != nullptr;
      S += -std::log(is_present ? p : 1.0 - p);
      E += -(p * std::log(p) + (1.0 - p) * std::log1p(-p));
      const double logit = std::log(p) - std::log1p(-p);
      V += p * (1.0 - p) * logit * logit;
      const double z = V > 0 ? (S - E) / std::sqrt(V) : 0.0;
      trace.monitor.push_back({y, a, is_present, p_present, z});
      if (is_present && pit_den > 0) {
        trace.pit.push_back({y, a, peak->height, std::clamp(pit_num / pit_den, 0.0, 1.0)});
      }
    }
  }
  trace.final_score = V > 0 ? (S - E) / std::sqrt(V) : 0.0;
  return trace;
}

EvidenceProfile simulate_from_fitted(const Kit& kit, const FittedMixture& model, std::mt19937_64& rng) {
  require(!model.candidates.empty(), ErrorCode::InvalidArgument, "fitted mixture has no candidates");
  const double top = *std::max_element(model.log_prior.begin(), model.log_prior.end());
  std::vector<double> w;
  for (double lw : model.log_prior) w.push_back(std::exp(lw - top));
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  const auto& chosen = model.candidates[pick(rng)];
  return simulate_evidence(kit, chosen, model.params, model.peak_model, model.threshold, rng);
}

double ks_uniform_pvalue(std::span<const double> values) {
  require(!values.empty(), ErrorCode::InvalidArgument, "KS test needs data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = std::clamp(v[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - x, x - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double q = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace haplodrift
