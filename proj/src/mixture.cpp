#include "haplodrift/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "haplodrift/error.hpp"
#include "haplodrift/parallel.hpp"
#include "haplodrift/special.hpp"

namespace haplodrift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Advances a mixed-radix counter; false once it wraps.
bool next_choice(std::vector<std::size_t>& choice, std::size_t radix) {
  for (std::size_t i = choice.size(); i-- > 0;) {
    if (++choice[i] < radix) return true;
    choice[i] = 0;
  }
  return false;
}

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    require(base == 0 || r <= std::numeric_limits<std::size_t>::max() / base, ErrorCode::InvalidArgument,
            "joint profile enumeration too large");
    r *= base;
  }
  return r;
}

ContributorParams params_from(std::span<const double> x, std::size_t contributors, bool degradation) {
  ContributorParams p;
  p.cell_counts.resize(contributors);
  for (std::size_t i = 0; i < contributors; ++i) p.cell_counts[i] = std::exp(x[i]);
  if (degradation) {
    p.degradation.resize(contributors);
    for (std::size_t i = 0; i < contributors; ++i) p.degradation[i] = x[contributors + i] * x[contributors + i];
  }
  return p;
}

std::vector<double> point_from(const ContributorParams& p, bool degradation) {
  std::vector<double> x;
  for (double c : p.cell_counts) x.push_back(std::log(std::max(c, 1e-6)));
  if (degradation) {
    for (std::size_t i = 0; i < p.size(); ++i) x.push_back(std::sqrt(p.degradation_of(i)));
  }
  return x;
}

double estimated_total_cells(const MixtureProblem& problem) {
  double sum = 0;
  std::size_t loci = 0;
  for (const auto& l : problem.evidence.loci) {
    if (l.peaks.empty()) continue;
    for (const auto& p : l.peaks) sum += p.height;
    ++loci;
  }
  if (loci == 0) return 1.0;
  return std::max(1.0, sum / static_cast<double>(loci) / problem.peak_model.rfu_per_cell());
}

}  // namespace

void Hypothesis::validate(const Kit& kit) const {
  require(contributors() >= 1, ErrorCode::InvalidArgument, "hypothesis has no contributors");
  for (const auto& h : typed) require(h.size() == kit.size(), ErrorCode::KitMismatch, "typed contributor kit mismatch");
}

std::vector<LocusProfile> candidate_locus_profiles(const LocusEvidence& evidence, const Locus& locus,
                                                   const HaplotypeDatabase& db, std::size_t locus_index,
                                                   const CandidateOptions& options) {
  require(options.neighbourhood >= 0, ErrorCode::InvalidArgument, "neighbourhood must be >= 0");
  std::vector<LocusProfile> out;
  if (options.allow_deleted) out.push_back(LocusProfile::deleted());
  if (evidence.peaks.empty()) {
    for (const auto& h : db.haplotypes) {
      const auto& p = h.profiles.at(locus_index);
      if (p.kind() == ProfileKind::Deleted) continue;
      if (p.kind() == ProfileKind::Duplicated && !locus.multicopy && !options.allow_duplicated) continue;
      if (p.kind() == ProfileKind::Single && locus.multicopy) continue;
      out.push_back(p);
    }
    if (out.empty()) out.push_back(LocusProfile::deleted());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<Allele> alleles;
  for (const auto& p : evidence.peaks) {
    for (int s = -options.neighbourhood; s <= options.neighbourhood; ++s) {
      const int r = p.allele.repeat + s;
      if (r >= 0 && r <= 99) alleles.push_back(Allele{r, p.allele.part});
    }
  }
  std::sort(alleles.begin(), alleles.end());
  alleles.erase(std::unique(alleles.begin(), alleles.end()), alleles.end());
  if (!locus.multicopy) {
    for (const auto& a : alleles) out.push_back(LocusProfile::single(a));
  }
  if (locus.multicopy || options.allow_duplicated) {
    for (std::size_t i = 0; i < alleles.size(); ++i) {
      for (std::size_t j = i; j < alleles.size(); ++j) out.push_back(LocusProfile::duplicated(alleles[i], alleles[j]));
    }
  }
  return out;
}

std::vector<LocusCandidates> build_locus_candidates(const Kit& kit, const EvidenceProfile& evidence,
                                                    const HaplotypeDatabase& db, const CandidateOptions& options) {
  require(evidence.loci.size() == kit.size(), ErrorCode::KitMismatch, "evidence locus count differs from kit");
  std::vector<LocusCandidates> out(kit.size());
  for (std::size_t y = 0; y < kit.size(); ++y) {
    auto& c = out[y];
    c.profiles = candidate_locus_profiles(evidence.loci[y], kit.locus(y), db, y, options);
    std::vector<double> counts(c.profiles.size(), 0.0);
    for (const auto& h : db.haplotypes) {
      const auto it = std::lower_bound(c.profiles.begin(), c.profiles.end(), h.profiles.at(y));
      if (it != c.profiles.end() && *it == h.profiles[y]) counts[static_cast<std::size_t>(it - c.profiles.begin())] += 1;
    }
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0) + static_cast<double>(counts.size());
    c.log_frequency.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) c.log_frequency[i] = std::log((counts[i] + 1.0) / total);
  }
  return out;
}

MixtureProblem::MixtureProblem(Kit kit_in, EvidenceProfile evidence_in, Hypothesis hypothesis_in,
                               PeakModelConfig peak_model_in, const HaplotypeDatabase& db,
                               const CandidateOptions& options)
    : kit(std::move(kit_in)),
      evidence(std::move(evidence_in)),
      hypothesis(std::move(hypothesis_in)),
      peak_model(peak_model_in) {
  hypothesis.validate(kit);
  peak_model.validate();
  candidates = build_locus_candidates(kit, evidence, db, options);
  for (const auto& c : candidates) {
    require(std::is_sorted(c.profiles.begin(), c.profiles.end()), ErrorCode::InvalidArgument, "unsorted candidates");
  }
}

double MixtureProblem::locus_log_likelihood(std::size_t y, const std::vector<std::size_t>& choice,
                                            const ContributorParams& params) const {
  thread_local std::vector<LocusProfile> joint;
  joint.clear();
  for (const auto& h : hypothesis.typed) joint.push_back(h.profiles[y]);
  for (auto c : choice) joint.push_back(candidates[y].profiles[c]);
  return haplodrift::locus_log_likelihood(evidence.loci[y], joint, params, peak_model, evidence.analytic_threshold,
                                          locus_position(y, kit.size()));
}

std::size_t MixtureProblem::joint_count(std::size_t y) const {
  return checked_power(candidates[y].profiles.size(), hypothesis.n_untyped);
}

namespace {

// log P(E_y | .) + sum_u log p(g_u) for every untyped joint profile, in
// odometer order.
template <typename F>
void for_each_joint(const MixtureProblem& problem, std::size_t y, const ContributorParams& params, F&& fn) {
  const std::size_t radix = problem.candidates[y].profiles.size();
  std::vector<std::size_t> choice(problem.hypothesis.n_untyped, 0);
  if (radix == 0 && !choice.empty()) return;
  do {
    double s = problem.locus_log_likelihood(y, choice, params);
    for (auto c : choice) s += problem.candidates[y].log_frequency[c];
    fn(choice, s);
  } while (!choice.empty() && next_choice(choice, radix));
}

}  // namespace

double product_rule_log_likelihood(const MixtureProblem& problem, const ContributorParams& params) {
  std::vector<double> per_locus(problem.kit.size(), 0.0);
  std::vector<double> terms;
  for (std::size_t y = 0; y < problem.kit.size(); ++y) {
    terms.clear();
    for_each_joint(problem, y, params, [&](const std::vector<std::size_t>&, double s) { terms.push_back(s); });
    per_locus[y] = log_sum_exp(terms);
  }
  double total = 0;
  for (double v : per_locus) total += v;
  return total;
}

Step1Result maximize_product_rule(const MixtureProblem& problem, const MixtureOptions& options) {
  const std::size_t C = problem.hypothesis.contributors();
  const bool deg = options.fit_degradation;
  const double total = estimated_total_cells(problem);

  std::vector<std::vector<double>> starts;
  starts.emplace_back(C, total / static_cast<double>(C));
  if (C >= 2) {
    for (std::size_t i = 0; i < C; ++i) {
      std::vector<double> s(C, 0.4 * total / static_cast<double>(C - 1));
      s[i] = 0.6 * total;
      starts.push_back(std::move(s));
    }
  }

  Step1Result best;
  best.log_likelihood = kNegInf;
  std::size_t evaluations = 0;
  auto objective = [&](std::span<const double> x) {
    ++evaluations;
    return -product_rule_log_likelihood(problem, params_from(x, C, deg));
  };
  for (const auto& cells : starts) {
    ContributorParams p0;
    p0.cell_counts = cells;
    if (deg) p0.degradation.assign(C, 0.0);
    auto r = minimize_simplex(objective, point_from(p0, deg), options.simplex);
    // A restart from the reported optimum guards against simplex collapse.
    r = minimize_simplex(objective, r.x, options.simplex);
    if (-r.value > best.log_likelihood) {
      best.log_likelihood = -r.value;
      best.params = params_from(r.x, C, deg);
    }
  }
  require(std::isfinite(best.log_likelihood), ErrorCode::Infeasible,
          "no contributor amounts give the evidence positive likelihood");
  best.evaluations = evaluations;
  return best;
}

std::vector<LocusListEntry> top_k_locus_profiles(const MixtureProblem& problem, std::size_t y,
                                                 const ContributorParams& params, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  std::vector<LocusListEntry> all;
  all.reserve(std::min<std::size_t>(problem.joint_count(y), 1u << 20));
  for_each_joint(problem, y, params, [&](const std::vector<std::size_t>& choice, double s) {
    if (s > kNegInf) all.push_back({choice, s});
  });
  std::stable_sort(all.begin(), all.end(),
                   [](const LocusListEntry& a, const LocusListEntry& b) { return a.log_score > b.log_score; });
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<Combination> top_m_combinations(const std::vector<std::vector<double>>& sorted_scores, std::size_t m) {
  const std::size_t L = sorted_scores.size();
  for (const auto& l : sorted_scores) {
    require(!l.empty(), ErrorCode::InvalidArgument, "empty score list");
    require(std::is_sorted(l.begin(), l.end(), std::greater<>()), ErrorCode::InvalidArgument,
            "score lists must be sorted descending");
  }
  std::vector<Combination> out;
  if (m == 0) return out;
  auto score_of = [&](const std::vector<std::size_t>& v) {
    double s = 0;
    for (std::size_t i = 0; i < L; ++i) s += sorted_scores[i][v[i]];
    return s;
  };
  auto worse = [](const Combination& a, const Combination& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.index > b.index;
  };
  std::priority_queue<Combination, std::vector<Combination>, decltype(worse)> frontier(worse);
  std::vector<std::size_t> root(L, 0);
  frontier.push({root, score_of(root)});
  while (!frontier.empty() && out.size() < m) {
    Combination top = frontier.top();
    frontier.pop();
    // Each vector has one parent (its last nonzero coordinate decremented),
    // so expanding only coordinates at or after that position avoids repeats.
    std::size_t first = 0;
    for (std::size_t i = L; i-- > 0;) {
      if (top.index[i] != 0) {
        first = i;
        break;
      }
    }
    for (std::size_t i = first; i < L; ++i) {
      if (top.index[i] + 1 >= sorted_scores[i].size()) continue;
      Combination child{top.index, 0.0};
      ++child.index[i];
      child.score = score_of(child.index);
      frontier.push(std::move(child));
    }
    out.push_back(std::move(top));
  }
  return out;
}

CandidateHaplotypeSet top_m_haplotypes(const MixtureProblem& problem, std::vector<std::vector<LocusListEntry>> lists,
                                       std::size_t m) {
  require(lists.size() == problem.kit.size(), ErrorCode::InvalidArgument, "one list per locus required");
  std::vector<std::vector<double>> scores(lists.size());
  for (std::size_t y = 0; y < lists.size(); ++y) {
    require(!lists[y].empty(), ErrorCode::Infeasible, "no joint profile explains locus " + problem.kit.locus(y).name);
    for (const auto& e : lists[y]) scores[y].push_back(e.log_score);
  }
  CandidateHaplotypeSet set;
  const auto combos = top_m_combinations(scores, m);
  const std::size_t U = problem.hypothesis.n_untyped;
  set.candidates.reserve(combos.size());
  for (const auto& c : combos) {
    CandidateHaplotype h;
    h.list_index = c.index;
    h.product_log_score = c.score;
    h.untyped.assign(U, Haplotype{std::vector<LocusProfile>(lists.size(), LocusProfile::deleted())});
    for (std::size_t y = 0; y < lists.size(); ++y) {
      const auto& choice = lists[y][c.index[y]].choice;
      for (std::size_t u = 0; u < U; ++u) h.untyped[u].profiles[y] = problem.candidates[y].profiles[choice[u]];
    }
    set.candidates.push_back(std::move(h));
  }
  set.locus_lists = std::move(lists);
  return set;
}

namespace {

// Per-locus likelihoods of the list entries referenced by the candidate set,
// then the log-sum-exp over candidates of likelihood times probability.
class CandidateLikelihood {
 public:
  CandidateLikelihood(const MixtureProblem& problem, const CandidateHaplotypeSet& set) : problem_(problem), set_(set) {
    const std::size_t L = problem.kit.size();
    slots_.resize(L);
    referenced_.resize(L);
    for (std::size_t y = 0; y < L; ++y) {
      std::vector<std::size_t> used;
      for (const auto& c : set.candidates) used.push_back(c.list_index[y]);
      std::sort(used.begin(), used.end());
      used.erase(std::unique(used.begin(), used.end()), used.end());
      referenced_[y] = used;
      slots_[y].assign(set.locus_lists[y].size(), 0);
      for (std::size_t s = 0; s < used.size(); ++s) slots_[y][used[s]] = s;
    }
    locus_values_.resize(L);
  }

  // Fills per-candidate log P(E | h, K) into `out`.
  void evaluate(const ContributorParams& params, std::vector<double>& out) {
    const std::size_t L = problem_.kit.size();
    parallel_for(L, [&](std::size_t y) {
      auto& v = locus_values_[y];
      v.resize(referenced_[y].size());
      for (std::size_t s = 0; s < referenced_[y].size(); ++s) {
        v[s] = problem_.locus_log_likelihood(y, set_.locus_lists[y][referenced_[y][s]].choice, params);
      }
    });
    out.resize(set_.candidates.size());
    for (std::size_t i = 0; i < set_.candidates.size(); ++i) {
      double s = 0;
      for (std::size_t y = 0; y < L; ++y) s += locus_values_[y][slots_[y][set_.candidates[i].list_index[y]]];
      out[i] = s;
    }
  }

 private:
  const MixtureProblem& problem_;
  const CandidateHaplotypeSet& set_;
  std::vector<std::vector<std::size_t>> slots_;
  std::vector<std::vector<std::size_t>> referenced_;
  std::vector<std::vector<double>> locus_values_;
};

}  // namespace

Step5Result reweight_and_maximize(const MixtureProblem& problem, CandidateHaplotypeSet& set,
                                  const HaplotypeDatabase& db, std::span<const Haplotype> typed_pool,
                                  const MatchModel& model, const ContributorParams& start,
                                  const MixtureOptions& options) {
  require(!set.candidates.empty(), ErrorCode::InvalidArgument, "empty candidate set");
  std::map<Haplotype, double> log_prob_cache;
  for (auto& c : set.candidates) {
    double lp = 0;
    for (const auto& h : c.untyped) {
      auto it = log_prob_cache.find(h);
      if (it == log_prob_cache.end()) {
        it = log_prob_cache.emplace(h, std::log(model.probability(h, db, typed_pool).probability)).first;
      }
      lp += it->second;
    }
    c.log_probability = lp;
  }

  const std::size_t C = problem.hypothesis.contributors();
  const bool deg = options.fit_degradation;
  CandidateLikelihood likelihood(problem, set);
  std::vector<double> ll;
  std::vector<double> weights;
  std::size_t evaluations = 0;
  auto total = [&](const ContributorParams& p) {
    likelihood.evaluate(p, ll);
    weights.resize(ll.size());
    for (std::size_t i = 0; i < ll.size(); ++i) weights[i] = ll[i] + set.candidates[i].log_probability;
    return log_sum_exp(weights);
  };
  auto objective = [&](std::span<const double> x) {
    ++evaluations;
    return -total(params_from(x, C, deg));
  };

  ContributorParams p0 = start;
  if (deg && p0.degradation.empty()) p0.degradation.assign(C, 0.0);
  const double at_start = total(p0);
  auto r = minimize_simplex(objective, point_from(p0, deg), options.simplex);
  r = minimize_simplex(objective, r.x, options.simplex);

  Step5Result out;
  if (-r.value >= at_start) {
    out.params = params_from(r.x, C, deg);
  } else {
    out.params = p0;
  }
  out.log_likelihood = total(out.params);
  require(std::isfinite(out.log_likelihood), ErrorCode::Infeasible, "all candidate likelihoods vanish");
  out.evaluations = evaluations;

  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    auto& c = set.candidates[i];
    c.log_likelihood = ll[i];
    c.log_weight = weights[i];
    c.posterior = std::exp(weights[i] - out.log_likelihood);
  }
  std::stable_sort(set.candidates.begin(), set.candidates.end(),
                   [](const CandidateHaplotype& a, const CandidateHaplotype& b) { return a.log_weight > b.log_weight; });
  return out;
}

std::vector<MarginalHaplotype> deconvolve(const CandidateHaplotypeSet& set, std::size_t u) {
  std::map<Haplotype, double> mass;
  double total = 0;
  for (const auto& c : set.candidates) {
    require(u < c.untyped.size(), ErrorCode::InvalidArgument, "no such untyped contributor");
    mass[c.untyped[u]] += c.posterior;
    total += c.posterior;
  }
  std::vector<MarginalHaplotype> out;
  for (auto& [h, p] : mass) out.push_back({h, total > 0 ? p / total : 0.0});
  std::stable_sort(out.begin(), out.end(),
                   [](const MarginalHaplotype& a, const MarginalHaplotype& b) { return a.probability > b.probability; });
  return out;
}

MixtureAnalysis analyze_mixture(const MixtureProblem& problem, const HaplotypeDatabase& db,
                                std::span<const Haplotype> typed_pool, const MatchModel& model,
                                const MixtureOptions& options) {
  MixtureAnalysis out;
  out.step1 = maximize_product_rule(problem, options);
  const std::size_t U = problem.hypothesis.n_untyped;
  if (U == 0) {
    out.step5.params = out.step1.params;
    out.step5.log_likelihood = out.step1.log_likelihood;
    CandidateHaplotype only;
    only.list_index.assign(problem.kit.size(), 0);
    only.log_likelihood = out.step1.log_likelihood;
    only.log_weight = out.step1.log_likelihood;
    only.posterior = 1.0;
    out.set.candidates.push_back(std::move(only));
    out.ranked_log10_weights.push_back(out.step1.log_likelihood / std::log(10.0));
    return out;
  }
  std::vector<std::vector<LocusListEntry>> lists(problem.kit.size());
  parallel_for(problem.kit.size(),
               [&](std::size_t y) { lists[y] = top_k_locus_profiles(problem, y, out.step1.params, options.k); });
  out.set = top_m_haplotypes(problem, std::move(lists), options.m);
  out.step5 = reweight_and_maximize(problem, out.set, db, typed_pool, model, out.step1.params, options);
  for (std::size_t u = 0; u < U; ++u) out.marginals.push_back(deconvolve(out.set, u));
  for (const auto& c : out.set.candidates) out.ranked_log10_weights.push_back(c.log_weight / std::log(10.0));
  return out;
}

}  // namespace haplodrift
