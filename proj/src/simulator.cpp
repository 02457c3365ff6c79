#include "haplodrift/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "haplodrift/error.hpp"

namespace haplodrift {

namespace {

// Indices of the mutated entries among n trials with success probability mu,
// found by geometric skips rather than n Bernoulli draws.
template <typename F>
void for_each_mutation(std::uint64_t n, double mu, std::mt19937_64& rng, F&& fn) {
  if (mu <= 0.0 || n == 0) return;
  if (mu >= 1.0) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::geometric_distribution<std::uint64_t> skip(mu);
  std::uint64_t pos = skip(rng);
  while (pos < n) {
    fn(pos);
    pos += 1 + skip(rng);
  }
}

std::uint64_t target_size(const SimConfig& cfg, std::size_t generation) {
  const double s = static_cast<double>(cfg.initial_size) * std::pow(cfg.lambda, static_cast<double>(generation));
  return static_cast<std::uint64_t>(std::llround(s));
}

}  // namespace

void SimConfig::validate() const {
  require(initial_size >= 1, ErrorCode::InvalidArgument, "initial size must be >= 1");
  require(generations >= 1, ErrorCode::InvalidArgument, "generations must be >= 1");
  require(lambda > 0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be positive");
  require(mu >= 0 && mu <= 1, ErrorCode::InvalidArgument, "mu must lie in [0, 1]");
  require(initial_size <= max_population, ErrorCode::InvalidArgument, "initial size exceeds max population");
}

std::uint64_t ClusterHistogram::clusters() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

std::uint64_t ClusterHistogram::individuals() const {
  std::uint64_t s = 0;
  for (std::size_t k = 1; k <= counts.size(); ++k) s += k * counts[k - 1];
  return s;
}

std::vector<double> ClusterHistogram::proportions(std::size_t truncation) const {
  const std::size_t n = truncation == 0 ? counts.size() : truncation;
  std::vector<double> out(n, 0.0);
  const double total = static_cast<double>(clusters());
  if (total == 0) return out;
  for (std::size_t k = 0; k < std::min(n, counts.size()); ++k) out[k] = static_cast<double>(counts[k]) / total;
  return out;
}

void ClusterHistogram::add(std::size_t size, std::uint64_t n) {
  require(size >= 1, ErrorCode::InvalidArgument, "cluster size must be >= 1");
  if (counts.size() < size) counts.resize(size, 0);
  counts[size - 1] += n;
}

ClusterHistogram histogram_of_labels(std::vector<std::uint64_t> labels) {
  std::sort(labels.begin(), labels.end());
  ClusterHistogram h;
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i + 1;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    h.add(j - i);
    i = j;
  }
  return h;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

SimSummary simulate(const SimConfig& cfg) {
  cfg.validate();
  auto rng = make_stream(cfg.seed, 0);
  std::vector<std::uint64_t> current(cfg.initial_size);
  std::iota(current.begin(), current.end(), std::uint64_t{0});
  std::uint64_t next_label = cfg.initial_size;

  SimSummary out;
  out.population_trajectory.push_back(current.size());
  std::deque<std::vector<std::uint64_t>> window{current};
  auto snapshot = [&](std::size_t g) {
    if (std::find(cfg.snapshot_generations.begin(), cfg.snapshot_generations.end(), g) !=
        cfg.snapshot_generations.end()) {
      out.snapshots.push_back({g, histogram_of_labels(current)});
    }
  };
  snapshot(0);

  std::vector<std::uint64_t> next;
  for (std::size_t g = 1; g <= cfg.generations; ++g) {
    next.clear();
    if (cfg.mode == SimMode::WrightFisherFixed) {
      const std::uint64_t n = target_size(cfg, g);
      require(n <= cfg.max_population, ErrorCode::InvalidArgument, "population exceeds max_population");
      next.resize(n);
      std::uniform_int_distribution<std::size_t> parent(0, current.size() - 1);
      for (auto& x : next) x = current[parent(rng)];
    } else {
      std::poisson_distribution<std::uint64_t> offspring(cfg.lambda);
      for (auto label : current) {
        const auto c = offspring(rng);
        for (std::uint64_t i = 0; i < c; ++i) next.push_back(label);
      }
      require(next.size() <= cfg.max_population, ErrorCode::InvalidArgument, "population exceeds max_population");
    }
    for_each_mutation(next.size(), cfg.mu, rng, [&](std::uint64_t i) { next[i] = next_label++; });
    std::swap(current, next);
    out.population_trajectory.push_back(current.size());
    window.push_back(current);
    if (window.size() > 3) window.pop_front();
    snapshot(g);
    if (current.empty()) {
      out.extinct_at = g;
      break;
    }
  }
  out.final_generation = histogram_of_labels(current);
  std::vector<std::uint64_t> pooled;
  for (const auto& w : window) pooled.insert(pooled.end(), w.begin(), w.end());
  out.final_three_generations = histogram_of_labels(std::move(pooled));
  return out;
}

ClusterHistogram total_progeny_histogram(double lambda_eff, std::uint64_t trials, std::uint64_t seed,
                                         std::size_t cap) {
  require(lambda_eff >= 0 && lambda_eff < 1, ErrorCode::Supercritical, "lambda_eff must lie in [0, 1)");
  require(cap >= 1, ErrorCode::InvalidArgument, "cap must be >= 1");
  auto rng = make_stream(seed, 0);
  std::poisson_distribution<std::uint64_t> offspring(lambda_eff > 0 ? lambda_eff : 1.0);
  ClusterHistogram h;
  h.counts.assign(cap, 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t total = 1;
    std::uint64_t pending = 1;
    while (pending > 0 && total < cap && lambda_eff > 0) {
      --pending;
      const auto c = offspring(rng);
      total += c;
      pending += c;
    }
    h.counts[std::min<std::uint64_t>(total, cap) - 1] += 1;
  }
  return h;
}

ClusterHistogram simulate_family_clusters(const std::vector<double>& founder_sizes, double lambda, double mu,
                                          int generations, std::uint64_t trials, std::uint64_t seed) {
  require(generations == 2 || generations == 3, ErrorCode::InvalidArgument, "generations must be 2 or 3");
  require(!founder_sizes.empty(), ErrorCode::InvalidArgument, "empty founder distribution");
  require(lambda > 0 && mu >= 0 && mu <= 1, ErrorCode::InvalidArgument, "invalid lambda or mu");
  auto rng = make_stream(seed, 0);
  std::discrete_distribution<std::size_t> founder(founder_sizes.begin(), founder_sizes.end());
  std::poisson_distribution<std::uint64_t> offspring(lambda);
  std::bernoulli_distribution mutates(mu);

  // Identical and mutant children of n individuals.
  auto children = [&](std::uint64_t n, std::uint64_t& identical, std::uint64_t& mutant) {
    identical = 0;
    mutant = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto c = offspring(rng);
      for (std::uint64_t k = 0; k < c; ++k) (mutates(rng) ? mutant : identical) += 1;
    }
  };

  ClusterHistogram h;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t j = founder(rng) + 1;
    std::uint64_t m = 0;
    std::uint64_t novel = 0;
    children(j, m, novel);
    if (generations == 2) {
      h.add(j + m);
      if (novel > 0) h.add(1, novel);
      continue;
    }
    std::uint64_t gm = 0;
    std::uint64_t gnovel = 0;
    children(m, gm, gnovel);
    h.add(j + m + gm);
    for (std::uint64_t i = 0; i < novel; ++i) {
      std::uint64_t same = 0;
      std::uint64_t other = 0;
      children(1, same, other);
      h.add(1 + same);
      gnovel += other;
    }
    if (gnovel > 0) h.add(1, gnovel);
  }
  return h;
}

}  // namespace haplodrift
