#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "haplodrift/haplotype.hpp"
#include "haplodrift/io.hpp"
#include "haplodrift/peak_model.hpp"
#include "haplodrift/simulator.hpp"

namespace fixtures {

using namespace haplodrift;

inline std::string data_path(const std::string& relative) { return std::string(HAPLODRIFT_DATA_DIR) + "/" + relative; }

inline Kit load_data_kit(const std::string& file) { return load_kit(data_path("kits/" + file)); }

inline Kit uniform_kit(std::size_t loci, double mu = 0.003, std::size_t multicopy_at = static_cast<std::size_t>(-1)) {
  std::vector<Locus> v;
  for (std::size_t i = 0; i < loci; ++i) {
    v.push_back(Locus{"L" + std::to_string(i + 1), static_cast<int>(i + 1), mu, i == multicopy_at});
  }
  return Kit("synthetic", std::move(v));
}

/// The nine loci of the deletion/duplication worked examples, in that order.
inline Kit table_kit() {
  const char* names[] = {"DYS19", "DYS385a/b", "DYS389I", "DYS389II", "DYS390",
                         "DYS391", "DYS392", "DYS393", "DYS437"};
  std::vector<Locus> v;
  for (int i = 0; i < 9; ++i) v.push_back(Locus{names[i], i + 1, 0.002, i == 1});
  return Kit("table", std::move(v));
}

inline Haplotype haplotype_with_copies(const Kit& kit, const std::vector<int>& copies) {
  Haplotype h;
  for (std::size_t y = 0; y < kit.size(); ++y) {
    const Allele a = Allele::make(10 + static_cast<int>(y));
    if (copies[y] == 0) {
      h.profiles.push_back(LocusProfile::deleted());
    } else if (copies[y] == 1) {
      h.profiles.push_back(LocusProfile::single(a));
    } else {
      h.profiles.push_back(LocusProfile::duplicated(a, a.forward()));
    }
  }
  return h;
}

/// Haplotypes descended from a handful of founders: each draw copies a
/// founder and applies Poisson(step_rate) single-step mutations, with rare
/// partial repeats, deletions and duplications.
class SyntheticPopulation {
 public:
  SyntheticPopulation(const Kit& kit, std::size_t founders, std::uint64_t seed, double step_rate = 1.5)
      : kit_(kit), rng_(make_stream(seed, 7)), step_rate_(step_rate) {
    for (std::size_t f = 0; f < founders; ++f) {
      Haplotype h;
      for (std::size_t y = 0; y < kit.size(); ++y) {
        const int mode = 11 + static_cast<int>((y * 7) % 9);
        std::uniform_int_distribution<int> spread(-3, 3);
        const Allele a = Allele::make(mode + spread(rng_));
        if (kit.locus(y).multicopy) {
          std::uniform_int_distribution<int> gap(1, 4);
          h.profiles.push_back(LocusProfile::duplicated(a, Allele::make(a.repeat + gap(rng_))));
        } else {
          h.profiles.push_back(LocusProfile::single(a));
        }
      }
      founders_.push_back(std::move(h));
    }
  }

  std::size_t founder_count() const { return founders_.size(); }

  Haplotype draw(std::size_t founder) {
    Haplotype h = founders_.at(founder);
    std::poisson_distribution<int> steps(step_rate_);
    std::uniform_int_distribution<std::size_t> locus(0, kit_.size() - 1);
    std::bernoulli_distribution up(0.5);
    const int n = steps(rng_);
    for (int i = 0; i < n; ++i) {
      const auto y = locus(rng_);
      h.profiles[y] = shifted(h.profiles[y], up(rng_) ? 1 : -1);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) < 0.02) {
      const auto y = locus(rng_);
      if (h.profiles[y].kind() == ProfileKind::Single) {
        h.profiles[y] = LocusProfile::single(Allele::make(h.profiles[y].low().repeat, 2));
      }
    }
    if (u(rng_) < 0.01) h.profiles[locus(rng_)] = LocusProfile::deleted();
    if (u(rng_) < 0.01) {
      const auto y = locus(rng_);
      if (h.profiles[y].kind() == ProfileKind::Single) {
        h.profiles[y] = LocusProfile::duplicated(h.profiles[y].low(), h.profiles[y].low().forward());
      }
    }
    return h;
  }

  Haplotype draw() {
    std::uniform_int_distribution<std::size_t> f(0, founders_.size() - 1);
    return draw(f(rng_));
  }

  HaplotypeDatabase database(std::size_t size) {
    HaplotypeDatabase db;
    db.population_label = "synthetic";
    for (std::size_t i = 0; i < size; ++i) db.haplotypes.push_back(draw());
    return db;
  }

 private:
  static LocusProfile shifted(const LocusProfile& p, int step) {
    auto move = [&](Allele a) { return Allele::make(std::clamp(a.repeat + step, 1, 99), a.part); };
    switch (p.kind()) {
      case ProfileKind::Deleted:
        return p;
      case ProfileKind::Single:
        return LocusProfile::single(move(p.low()));
      case ProfileKind::Duplicated:
        return step > 0 ? LocusProfile::duplicated(p.low(), move(p.high()))
                        : LocusProfile::duplicated(move(p.low()), p.high());
    }
    return p;
  }

  Kit kit_;
  std::mt19937_64 rng_;
  double step_rate_;
  std::vector<Haplotype> founders_;
};

/// Three contributors from distinct founders, a non-contributor X, a
/// reference database and evidence drawn from the reference peak model.
struct MixtureScenario {
  Kit kit;
  HaplotypeDatabase db;
  Haplotype A, C, D, X;
  std::vector<double> cells;
  PeakModelConfig peak_model;
  double threshold = 15.0;
  EvidenceProfile evidence;
};

inline MixtureScenario make_mixture_scenario(std::uint64_t seed, std::size_t db_size = 700,
                                             std::vector<double> cells = {1500, 500, 1000}) {
  Kit kit = load_data_kit("yfiler.json");
  SyntheticPopulation pop(kit, 40, seed);
  MixtureScenario s{kit, pop.database(db_size), {}, {}, {}, {}, cells, {}, 15.0, {}};
  auto distinct = [](const Haplotype& a, const Haplotype& b) {
    std::size_t same = 0;
    for (std::size_t y = 0; y < a.size(); ++y) same += a.profiles[y] == b.profiles[y];
    return same + 2 < a.size();
  };
  s.A = pop.draw(seed % pop.founder_count());
  do s.C = pop.draw(); while (!distinct(s.C, s.A));
  do s.D = pop.draw(); while (!distinct(s.D, s.A) || !distinct(s.D, s.C));
  do s.X = pop.draw(); while (!distinct(s.X, s.A) || !distinct(s.X, s.C) || !distinct(s.X, s.D));
  auto rng = make_stream(seed, 11);
  ContributorParams params;
  params.cell_counts = s.cells;
  std::vector<Haplotype> contributors{s.A, s.C, s.D};
  s.evidence = simulate_evidence(kit, contributors, params, s.peak_model, s.threshold, rng);
  return s;
}

}  // namespace fixtures
