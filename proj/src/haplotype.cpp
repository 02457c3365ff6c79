#include "haplodrift/haplotype.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "haplodrift/error.hpp"

namespace haplodrift {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::KitMismatch: return "kit_mismatch";
    case ErrorCode::Supercritical: return "supercritical";
    case ErrorCode::ZeroPosterior: return "zero_posterior";
    case ErrorCode::Extinction: return "extinction";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Infeasible: return "infeasible";
  }
  return "unknown";
}

Allele Allele::make(int repeat, int part) {
  require(repeat >= 0 && repeat <= 99, ErrorCode::InvalidArgument,
          "allele repeat count out of range: " + std::to_string(repeat));
  require(part >= 0 && part < 10, ErrorCode::InvalidArgument,
          "allele partial repeat out of range: " + std::to_string(part));
  return Allele{repeat, part};
}

std::string to_string(const Allele& a) {
  if (a.part == 0) return std::to_string(a.repeat);
  return std::to_string(a.repeat) + "." + std::to_string(a.part);
}

LocusProfile LocusProfile::single(Allele a) {
  LocusProfile p;
  p.kind_ = ProfileKind::Single;
  p.low_ = a;
  p.high_ = Allele{};
  return p;
}

LocusProfile LocusProfile::duplicated(Allele a, Allele b) {
  LocusProfile p;
  p.kind_ = ProfileKind::Duplicated;
  p.low_ = std::min(a, b);
  p.high_ = std::max(a, b);
  return p;
}

int LocusProfile::dose(const Allele& a) const {
  switch (kind_) {
    case ProfileKind::Deleted: return 0;
    case ProfileKind::Single: return low_ == a ? 1 : 0;
    case ProfileKind::Duplicated: return (low_ == a ? 1 : 0) + (high_ == a ? 1 : 0);
  }
  return 0;
}

std::string to_string(const LocusProfile& p) {
  switch (p.kind()) {
    case ProfileKind::Deleted: return "-";
    case ProfileKind::Single: return to_string(p.low());
    case ProfileKind::Duplicated: return to_string(p.low()) + "/" + to_string(p.high());
  }
  return "?";
}

Kit::Kit(std::string name, std::vector<Locus> loci) : name_(std::move(name)), loci_(std::move(loci)) {
  require(!loci_.empty(), ErrorCode::InvalidArgument, "kit '" + name_ + "' has no loci");
  std::stable_sort(loci_.begin(), loci_.end(),
                   [](const Locus& a, const Locus& b) { return a.chromosome_order < b.chromosome_order; });
  double survive = 1.0;
  for (std::size_t i = 0; i < loci_.size(); ++i) {
    const auto& l = loci_[i];
    require(l.mutation_rate >= 0.0 && l.mutation_rate < 1.0, ErrorCode::InvalidArgument,
            "locus " + l.name + ": mutation rate must lie in [0, 1)");
    if (i > 0) {
      require(l.chromosome_order != loci_[i - 1].chromosome_order, ErrorCode::InvalidArgument,
              "duplicate chromosome_order " + std::to_string(l.chromosome_order) + " in kit " + name_);
    }
    survive *= 1.0 - l.mutation_rate;
  }
  require(survive > 0.0, ErrorCode::InvalidArgument, "kit non-mutation probability underflows to zero");
}

std::size_t Kit::index_of(std::string_view locus_name) const {
  for (std::size_t i = 0; i < loci_.size(); ++i) {
    if (loci_[i].name == locus_name) return i;
  }
  throw Error(ErrorCode::KitMismatch, "locus '" + std::string(locus_name) + "' not in kit " + name_);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, "malformed allele token '" + std::string(whole) + "'");
  }
  return v;
}

Allele parse_allele(std::string_view token) {
  token = trim(token);
  const auto dot = token.find('.');
  if (dot == std::string_view::npos) return Allele::make(parse_int(token, token), 0);
  const auto part = token.substr(dot + 1);
  if (part.size() != 1) throw Error(ErrorCode::Parse, "malformed allele token '" + std::string(token) + "'");
  return Allele::make(parse_int(token.substr(0, dot), token), parse_int(part, token));
}

}  // namespace

LocusProfile parse_locus_profile(std::string_view token, const Locus& locus) {
  token = trim(token);
  if (token.empty()) throw Error(ErrorCode::Parse, "empty profile at locus " + locus.name);
  if (token == "-") return LocusProfile::deleted();
  const auto slash = token.find('/');
  if (slash == std::string_view::npos) {
    const auto a = parse_allele(token);
    return locus.multicopy ? LocusProfile::duplicated(a, a) : LocusProfile::single(a);
  }
  const auto rest = token.substr(slash + 1);
  if (rest.find('/') != std::string_view::npos) {
    throw Error(ErrorCode::Parse, "triplicated locus " + locus.name + " ('" + std::string(token) +
                                      "') is not supported");
  }
  return LocusProfile::duplicated(parse_allele(token.substr(0, slash)), parse_allele(rest));
}

Haplotype parse_haplotype(std::string_view text, const Kit& kit) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    fields.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != kit.size()) {
    throw Error(ErrorCode::Parse, "haplotype has " + std::to_string(fields.size()) + " loci, kit " + kit.name() +
                                      " has " + std::to_string(kit.size()));
  }
  Haplotype h;
  h.profiles.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) h.profiles.push_back(parse_locus_profile(fields[i], kit.locus(i)));
  return h;
}

std::string format_haplotype(const Haplotype& h) {
  std::string out;
  for (std::size_t i = 0; i < h.profiles.size(); ++i) {
    if (i) out += ',';
    out += to_string(h.profiles[i]);
  }
  return out;
}

std::pair<int, int> repeat_pair(const LocusProfile& p) {
  switch (p.kind()) {
    case ProfileKind::Deleted: return {0, 0};
    case ProfileKind::Single: return {0, p.low().part};
    case ProfileKind::Duplicated: {
      const int a = p.low().part;
      const int b = p.high().part;
      return {std::min(a, b), std::max(a, b)};
    }
  }
  return {0, 0};
}

DelDupPattern deldup_pattern(const Haplotype& h) {
  DelDupPattern d;
  d.copies.reserve(h.size());
  for (const auto& p : h.profiles) d.copies.push_back(static_cast<std::uint8_t>(p.copies()));
  return d;
}

HaplotypePatterns extract_patterns(const Haplotype& h) {
  HaplotypePatterns out;
  out.identity = h.profiles;
  out.deldup = deldup_pattern(h);
  out.repeat.parts.reserve(h.size());
  for (const auto& p : h.profiles) out.repeat.parts.push_back(repeat_pair(p));
  return out;
}

double aggregate_nonmutation(const DelDupPattern& d, const Kit& kit) {
  require(d.copies.size() == kit.size(), ErrorCode::KitMismatch, "deletion/duplication pattern length differs from kit");
  double log_survive = 0.0;
  for (std::size_t i = 0; i < kit.size(); ++i) {
    require(d.copies[i] <= 2, ErrorCode::InvalidArgument, "copy number must be 0, 1 or 2");
    log_survive += d.copies[i] * std::log1p(-kit.locus(i).mutation_rate);
  }
  return std::exp(log_survive);
}

DelDupPattern standard_deldup(const Kit& kit) {
  DelDupPattern d;
  for (const auto& l : kit.loci()) d.copies.push_back(l.multicopy ? 2 : 1);
  return d;
}

MatchCounts count_matches(const Haplotype& h, const HaplotypeDatabase& db, std::span<const Haplotype> typed) {
  const auto target = extract_patterns(h);
  MatchCounts counts;
  counts.per_locus_repeat.assign(h.size(), 0);
  auto visit = [&](const Haplotype& other) {
    require(other.size() == h.size(), ErrorCode::KitMismatch, "haplotypes are typed on different kits");
    bool identical = true;
    bool same_deldup = true;
    bool same_repeat = true;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto& p = other.profiles[i];
      if (p != target.identity[i]) identical = false;
      if (p.copies() != target.deldup.copies[i]) same_deldup = false;
      if (repeat_pair(p) == target.repeat.parts[i]) {
        ++counts.per_locus_repeat[i];
      } else {
        same_repeat = false;
      }
    }
    counts.identity += identical;
    counts.deldup += same_deldup;
    counts.repeat += same_repeat;
  };
  for (const auto& other : db.haplotypes) visit(other);
  for (const auto& other : typed) visit(other);
  counts.observed = db.haplotypes.size() + typed.size();
  return counts;
}

}  // namespace haplodrift
