#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace haplodrift {

/// STR allele designation kept as an exact integer pair: 17.2 is
/// {repeat = 17, part = 2}. Ordered lexicographically.
struct Allele {
  int repeat = 0;
  int part = 0;

  static Allele make(int repeat, int part = 0);

  Allele stutter() const { return Allele{repeat - 1, part}; }
  Allele forward() const { return Allele{repeat + 1, part}; }

  auto operator<=>(const Allele&) const = default;
};

std::string to_string(const Allele& a);

enum class ProfileKind : std::uint8_t { Deleted = 0, Single = 1, Duplicated = 2 };

/// Genotype of one person at one locus. For Single only `low` is meaningful;
/// Duplicated keeps low <= high.
class LocusProfile {
 public:
  static LocusProfile deleted() { return LocusProfile{}; }
  static LocusProfile single(Allele a);
  static LocusProfile duplicated(Allele a, Allele b);

  ProfileKind kind() const { return kind_; }
  const Allele& low() const { return low_; }
  const Allele& high() const { return high_; }

  /// Number of copies of the locus carried (0, 1 or 2).
  int copies() const { return static_cast<int>(kind_); }
  /// Number of copies of allele `a` carried.
  int dose(const Allele& a) const;

  auto operator<=>(const LocusProfile&) const = default;

 private:
  LocusProfile() = default;
  ProfileKind kind_ = ProfileKind::Deleted;
  Allele low_{};
  Allele high_{};
};

std::string to_string(const LocusProfile& p);

struct Locus {
  std::string name;
  int chromosome_order = 0;
  double mutation_rate = 0.0;
  bool multicopy = false;
};

/// Ordered set of Y-STR loci. Loci are sorted by chromosome position on
/// construction.
class Kit {
 public:
  Kit(std::string name, std::vector<Locus> loci);

  const std::string& name() const { return name_; }
  const std::vector<Locus>& loci() const { return loci_; }
  const Locus& locus(std::size_t i) const { return loci_.at(i); }
  std::size_t size() const { return loci_.size(); }
  /// Throws if the name is not in the kit.
  std::size_t index_of(std::string_view locus_name) const;

 private:
  std::string name_;
  std::vector<Locus> loci_;
};

struct Haplotype {
  std::vector<LocusProfile> profiles;

  std::size_t size() const { return profiles.size(); }
  auto operator<=>(const Haplotype&) const = default;
};

using IdentityPattern = std::vector<LocusProfile>;

struct DelDupPattern {
  std::vector<std::uint8_t> copies;
  auto operator<=>(const DelDupPattern&) const = default;
};

struct RepeatPattern {
  std::vector<std::pair<int, int>> parts;
  auto operator<=>(const RepeatPattern&) const = default;
};

struct HaplotypePatterns {
  IdentityPattern identity;
  DelDupPattern deldup;
  RepeatPattern repeat;
};

struct HaplotypeDatabase {
  std::vector<Haplotype> haplotypes;
  std::string population_label;
};

struct MatchCounts {
  std::size_t identity = 0;  // c_I
  std::size_t deldup = 0;    // c_D
  std::size_t repeat = 0;    // c_R
  std::vector<std::size_t> per_locus_repeat;  // r_m
  std::size_t observed = 0;  // M = |database| + |typed|
};

/// Token grammar per locus: "-" deleted, "14" single, "17.2" partial repeat,
/// "13/18" duplicated. A single allele on a multicopy locus is read as a
/// homozygous duplication.
Haplotype parse_haplotype(std::string_view text, const Kit& kit);
LocusProfile parse_locus_profile(std::string_view token, const Locus& locus);
std::string format_haplotype(const Haplotype& h);

HaplotypePatterns extract_patterns(const Haplotype& h);
DelDupPattern deldup_pattern(const Haplotype& h);
std::pair<int, int> repeat_pair(const LocusProfile& p);

/// Product over loci of (1 - mu_i)^copies.
double aggregate_nonmutation(const DelDupPattern& d, const Kit& kit);

/// The typical profile shape of a kit: single copy everywhere except
/// multicopy loci, which carry two.
DelDupPattern standard_deldup(const Kit& kit);

MatchCounts count_matches(const Haplotype& h, const HaplotypeDatabase& db,
                          std::span<const Haplotype> typed);

}  // namespace haplodrift

template <>
struct std::hash<haplodrift::DelDupPattern> {
  std::size_t operator()(const haplodrift::DelDupPattern& d) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto c : d.copies) h = (h ^ c) * 1099511628211ull;
    return h;
  }
};
