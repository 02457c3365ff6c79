#include "haplodrift/match_model.hpp"

#include <algorithm>
#include <cmath>

#include "haplodrift/error.hpp"
#include "haplodrift/special.hpp"

namespace haplodrift {

void PatternFactorParams::validate() const {
  for (double x : {a, b, c, d}) {
    require(x >= 0 && x <= 1, ErrorCode::InvalidArgument, "pattern factors must lie in [0, 1]");
  }
}

double conditional_count_likelihood(std::size_t c_identity, std::size_t n, std::size_t observed, std::uint64_t omega) {
  require(observed + 1 <= omega, ErrorCode::InvalidArgument, "M + 1 exceeds the population size");
  require(n >= 1 && n <= omega, ErrorCode::InvalidArgument, "n must lie in [1, omega]");
  if (c_identity + 1 > n || c_identity > observed) return 0.0;
  const auto N = static_cast<std::int64_t>(n);
  const auto draws = static_cast<std::int64_t>(observed + 1);
  const auto pop = static_cast<std::int64_t>(omega);
  const double log_hit = log_hypergeometric_pmf(static_cast<std::int64_t>(c_identity) + 1, N, draws, pop);
  const double log_none = log_hypergeometric_pmf(0, N, draws, pop);
  const double seen = -std::expm1(log_none);
  if (seen <= 0) return 0.0;
  return std::exp(log_hit) / seen;
}

std::size_t PosteriorResult::quantile(double q) const {
  require(q >= 0 && q <= 1, ErrorCode::InvalidArgument, "quantile level must lie in [0, 1]");
  double c = 0;
  for (std::size_t n = 1; n <= probs.size(); ++n) {
    c += probs[n - 1];
    if (c >= q - 1e-15) return n;
  }
  return probs.size();
}

PosteriorResult posterior_matching(std::size_t c_identity, const PopulationContext& ctx) {
  require(ctx.prior != nullptr && !ctx.prior->probs.empty(), ErrorCode::InvalidArgument, "missing prior");
  require(ctx.observed + 1 <= ctx.omega, ErrorCode::InvalidArgument, "omega must be at least M + 1");
  const auto& prior = ctx.prior->probs;
  PosteriorResult out;
  out.probs.assign(prior.size(), 0.0);
  double total = 0;
  const std::size_t nmax = static_cast<std::size_t>(std::min<std::uint64_t>(prior.size(), ctx.omega));
  for (std::size_t n = 1; n <= nmax; ++n) {
    if (prior[n - 1] == 0.0) continue;
    const double v = conditional_count_likelihood(c_identity, n, ctx.observed, ctx.omega) * prior[n - 1];
    out.probs[n - 1] = v;
    total += v;
  }
  require(total > 0 && std::isfinite(total), ErrorCode::ZeroPosterior,
          "no prior support is consistent with " + std::to_string(c_identity) + " observed matches");
  double mean = 0;
  for (std::size_t n = 1; n <= out.probs.size(); ++n) {
    out.probs[n - 1] /= total;
    mean += static_cast<double>(n) * out.probs[n - 1];
  }
  out.mean = mean;
  out.p_u = mean / static_cast<double>(ctx.omega);
  out.tail_mass = out.probs.back();
  return out;
}

DelDupExponents deldup_factor_exponents(const DelDupPattern& d, const Kit& kit) {
  require(d.copies.size() == kit.size(), ErrorCode::KitMismatch, "pattern length differs from kit");
  DelDupExponents e;
  bool prev_deleted = false;
  bool prev_excess = false;
  for (std::size_t y = 0; y < d.copies.size(); ++y) {
    const bool deleted = d.copies[y] == 0;
    const bool excess = d.copies[y] == 2 && !kit.locus(y).multicopy;
    if (deleted) ++(prev_deleted ? e.b : e.a);
    if (excess) ++(prev_excess ? e.d : e.c);
    prev_deleted = deleted;
    prev_excess = excess;
  }
  return e;
}

double deletion_duplication_factor(const DelDupPattern& d, const Kit& kit, std::size_t c_deldup, std::size_t observed,
                                   const PatternFactorParams& params) {
  if (c_deldup > 0) return (1.0 + static_cast<double>(c_deldup)) / (static_cast<double>(observed) + 1.0);
  const auto e = deldup_factor_exponents(d, kit);
  return std::pow(params.a, e.a) * std::pow(params.b, e.b) * std::pow(params.c, e.c) * std::pow(params.d, e.d);
}

double repeat_factor(const RepeatPattern& r, const MatchCounts& counts) {
  const double denom = static_cast<double>(counts.observed) + 1.0;
  if (counts.repeat > 0) return (1.0 + static_cast<double>(counts.repeat)) / denom;
  require(counts.per_locus_repeat.size() == r.parts.size(), ErrorCode::KitMismatch,
          "per-locus repeat counts differ from pattern length");
  double f = 1.0;
  for (auto rm : counts.per_locus_repeat) f *= (1.0 + static_cast<double>(rm)) / denom;
  return f;
}

void MatchModelConfig::validate() const {
  require(growth > -1.0 && std::isfinite(growth), ErrorCode::InvalidArgument, "growth must exceed -1");
  require(omega >= 1, ErrorCode::InvalidArgument, "omega must be positive");
  factors.validate();
}

PriorCache::PriorCache(Kit kit, double growth, Generations generations, EquilibriumOptions options)
    : kit_(std::move(kit)), growth_(growth), generations_(generations), options_(options) {}

std::shared_ptr<const MatchingPrior> PriorCache::get(const DelDupPattern& pattern) {
  {
    std::lock_guard lock(mutex_);
    auto it = priors_.find(pattern);
    if (it != priors_.end()) return it->second;
  }
  const double mu = 1.0 - aggregate_nonmutation(pattern, kit_);
  auto prior = std::make_shared<const MatchingPrior>(
      matching_prior(PopulationParams::from_growth(growth_, mu), generations_, options_));
  std::lock_guard lock(mutex_);
  return priors_.emplace(pattern, std::move(prior)).first->second;
}

std::size_t PriorCache::size() const {
  std::lock_guard lock(mutex_);
  return priors_.size();
}

MatchModel::MatchModel(Kit kit, MatchModelConfig cfg)
    : cfg_(cfg), priors_(std::make_shared<PriorCache>(std::move(kit), cfg.growth, cfg.generations, cfg.equilibrium)) {
  cfg_.validate();
}

MatchModel::MatchModel(std::shared_ptr<PriorCache> priors, MatchModelConfig cfg) : cfg_(cfg), priors_(std::move(priors)) {
  require(priors_ != nullptr, ErrorCode::InvalidArgument, "null prior cache");
  cfg_.validate();
  require(priors_->growth() == cfg_.growth && priors_->generations() == cfg_.generations, ErrorCode::InvalidArgument,
          "prior cache built for different growth or generations");
}

std::shared_ptr<const PosteriorResult> MatchModel::posterior(const std::shared_ptr<const MatchingPrior>& prior,
                                                             std::size_t c_identity, std::size_t observed) const {
  const auto key = std::make_tuple(prior.get(), c_identity, observed);
  {
    std::lock_guard lock(mutex_);
    auto it = posteriors_.find(key);
    if (it != posteriors_.end()) return it->second;
  }
  auto result = std::make_shared<const PosteriorResult>(
      posterior_matching(c_identity, PopulationContext{cfg_.omega, observed, &prior->distribution}));
  std::lock_guard lock(mutex_);
  return posteriors_.emplace(key, std::move(result)).first->second;
}

MatchProbabilityResult MatchModel::probability(const Haplotype& h, const HaplotypeDatabase& db,
                                               std::span<const Haplotype> typed) const {
  return probability(h, count_matches(h, db, typed));
}

MatchProbabilityResult MatchModel::probability(const Haplotype& h, const MatchCounts& counts) const {
  require(h.size() == kit().size(), ErrorCode::KitMismatch, "haplotype typed on a different kit");
  const auto patterns = extract_patterns(h);
  auto prior = priors_->get(patterns.deldup);
  auto post = posterior(prior, counts.identity, counts.observed);
  MatchProbabilityResult r;
  r.counts = counts;
  r.aggregate_mu = prior->params.mu;
  r.posterior = *post;
  r.p_u = post->p_u;
  if (counts.identity == 0) {
    r.f_D = deletion_duplication_factor(patterns.deldup, kit(), counts.deldup, counts.observed, cfg_.factors);
    r.f_R = repeat_factor(patterns.repeat, counts);
  }
  r.probability = r.p_u * r.f_D * r.f_R;
  return r;
}

MatchProbabilityResult haplotype_probability(const Haplotype& h, const HaplotypeDatabase& db,
                                             std::span<const Haplotype> typed, const MatchModel& model) {
  return model.probability(h, db, typed);
}

}  // namespace haplodrift
