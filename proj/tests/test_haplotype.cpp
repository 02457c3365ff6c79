#include <gtest/gtest.h>

#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "haplodrift/error.hpp"
#include "haplodrift/haplotype.hpp"
#include "haplodrift/io.hpp"
#include "support/fixtures.hpp"

using namespace haplodrift;

TEST(Allele, RejectsOutOfRange) {
  EXPECT_THROW(Allele::make(100), Error);
  EXPECT_THROW(Allele::make(17, 10), Error);
  EXPECT_THROW(Allele::make(-1), Error);
  EXPECT_EQ(Allele::make(17, 2), (Allele{17, 2}));
}

TEST(ParseHaplotype, SingleLocus) {
  const auto kit = fixtures::uniform_kit(1);
  const auto h = parse_haplotype("14", kit);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h.profiles[0], LocusProfile::single(Allele{14, 0}));
}

TEST(ParseHaplotype, DuplicationIsOrdered) {
  const auto kit = fixtures::uniform_kit(1);
  const auto expected = LocusProfile::duplicated(Allele{13, 0}, Allele{18, 0});
  EXPECT_EQ(parse_haplotype("13/18", kit).profiles[0], expected);
  EXPECT_EQ(parse_haplotype("18/13", kit).profiles[0], expected);
  EXPECT_EQ(expected.low(), (Allele{13, 0}));
}

TEST(ParseHaplotype, PartialRepeat) {
  const auto kit = fixtures::uniform_kit(1);
  const auto p = parse_haplotype("17.2", kit).profiles[0];
  EXPECT_EQ(p.kind(), ProfileKind::Single);
  EXPECT_EQ(p.low().repeat, 17);
  EXPECT_EQ(p.low().part, 2);
}

TEST(ParseHaplotype, Errors) {
  const auto kit = fixtures::uniform_kit(3);
  EXPECT_THROW(parse_haplotype("14,15", kit), Error);
  EXPECT_THROW(parse_haplotype("14,x,15", kit), Error);
  EXPECT_THROW(parse_haplotype("14,15/16/17,15", kit), Error);
  EXPECT_THROW(parse_haplotype("14,15.,15", kit), Error);
  try {
    parse_haplotype("14,15/16/17,15", kit);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
}

TEST(ParseHaplotype, DeletionAndMulticopySingle) {
  const auto kit = fixtures::uniform_kit(3, 0.003, 1);
  const auto h = parse_haplotype("-,14,15", kit);
  EXPECT_EQ(h.profiles[0].kind(), ProfileKind::Deleted);
  EXPECT_EQ(h.profiles[1], LocusProfile::duplicated(Allele{14, 0}, Allele{14, 0}));
}

TEST(ParseHaplotype, RoundTrip) {
  const auto kit = fixtures::uniform_kit(5);
  for (const char* text : {"14,13/18,-,17.2,9", "10,11,12,13,14", "-,-,-,-,-", "9.3,9.3/10.1,12,12/12,8"}) {
    const auto h = parse_haplotype(text, kit);
    const auto again = parse_haplotype(format_haplotype(h), kit);
    EXPECT_EQ(h, again) << text;
    const auto a = extract_patterns(h);
    const auto b = extract_patterns(again);
    EXPECT_EQ(a.deldup, b.deldup);
    EXPECT_EQ(a.repeat, b.repeat);
    EXPECT_EQ(a.identity, b.identity);
  }
}

TEST(Kit, SortedAndValidated) {
  std::vector<Locus> loci{{"B", 2, 0.01, false}, {"A", 1, 0.02, false}};
  const Kit kit("k", loci);
  EXPECT_EQ(kit.locus(0).name, "A");
  EXPECT_EQ(kit.index_of("B"), 1u);
  EXPECT_THROW(kit.index_of("C"), Error);
  EXPECT_THROW(Kit("k", {}), Error);
  EXPECT_THROW(Kit("k", {{"A", 1, 0.0, false}, {"B", 1, 0.0, false}}), Error);
  EXPECT_THROW(Kit("k", {{"A", 1, 1.0, false}}), Error);
}

TEST(ExtractPatterns, IntegerSingles) {
  const auto kit = fixtures::uniform_kit(4);
  const auto p = extract_patterns(parse_haplotype("10,11,12,13", kit));
  EXPECT_EQ(p.deldup.copies, (std::vector<std::uint8_t>{1, 1, 1, 1}));
  for (const auto& r : p.repeat.parts) EXPECT_EQ(r, (std::pair<int, int>{0, 0}));
}

TEST(ExtractPatterns, TableDelDupVerbatim) {
  const auto kit = fixtures::table_kit();
  const auto h = fixtures::haplotype_with_copies(kit, {2, 2, 0, 1, 0, 0, 0, 1, 0});
  EXPECT_EQ(deldup_pattern(h).copies, (std::vector<std::uint8_t>{2, 2, 0, 1, 0, 0, 0, 1, 0}));
}

TEST(ExtractPatterns, RepeatPairs) {
  EXPECT_EQ(repeat_pair(LocusProfile::single(Allele{17, 2})), (std::pair<int, int>{0, 2}));
  EXPECT_EQ(repeat_pair(LocusProfile::deleted()), (std::pair<int, int>{0, 0}));
  EXPECT_EQ(repeat_pair(LocusProfile::duplicated(Allele{9, 3}, Allele{10, 1})), (std::pair<int, int>{1, 3}));
}

TEST(ExtractPatterns, DeletedImpliesZeroRepeatPair) {
  const auto kit = fixtures::uniform_kit(6);
  fixtures::SyntheticPopulation pop(kit, 5, 3);
  for (int i = 0; i < 200; ++i) {
    const auto p = extract_patterns(pop.draw());
    for (std::size_t y = 0; y < kit.size(); ++y) {
      if (p.deldup.copies[y] == 0) EXPECT_EQ(p.repeat.parts[y], (std::pair<int, int>{0, 0}));
    }
  }
}

TEST(AggregateNonmutation, Examples) {
  std::vector<Locus> loci{{"A", 1, 0.002, false}, {"B", 2, 0.003, false}};
  const Kit kit("k", loci);
  EXPECT_DOUBLE_EQ(aggregate_nonmutation(DelDupPattern{{0, 0}}, kit), 1.0);

  using big = boost::multiprecision::cpp_dec_float_50;
  const big singles = (big(1) - big("0.002")) * (big(1) - big("0.003"));
  EXPECT_NEAR(aggregate_nonmutation(DelDupPattern{{1, 1}}, kit), singles.convert_to<double>(), 1e-15);
  EXPECT_NEAR(aggregate_nonmutation(DelDupPattern{{1, 1}}, kit), 0.995006, 1e-15);

  const big dup = (big(1) - big("0.002")) * (big(1) - big("0.002"));
  EXPECT_NEAR(aggregate_nonmutation(DelDupPattern{{2, 0}}, kit), dup.convert_to<double>(), 1e-15);
  EXPECT_NEAR(aggregate_nonmutation(DelDupPattern{{2, 0}}, kit), 0.996004, 1e-15);
}

TEST(AggregateNonmutation, MonotoneInCopies) {
  const auto kit = fixtures::uniform_kit(3, 0.01);
  for (std::uint8_t y = 0; y < 3; ++y) {
    double prev = 2.0;
    for (std::uint8_t c = 0; c <= 2; ++c) {
      DelDupPattern d{{1, 1, 1}};
      d.copies[y] = c;
      const double v = aggregate_nonmutation(d, kit);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(CountMatches, SelfMatch) {
  const auto kit = fixtures::uniform_kit(3);
  const auto h = parse_haplotype("10,11,12", kit);
  HaplotypeDatabase db{{h}, "x"};
  const auto c = count_matches(h, db, {});
  EXPECT_EQ(c.identity, 1u);
  EXPECT_EQ(c.deldup, 1u);
  EXPECT_EQ(c.repeat, 1u);
  EXPECT_EQ(c.observed, 1u);
}

TEST(CountMatches, Empty) {
  const auto kit = fixtures::uniform_kit(3);
  const auto c = count_matches(parse_haplotype("10,11,12", kit), HaplotypeDatabase{}, {});
  EXPECT_EQ(c.identity + c.deldup + c.repeat + c.observed, 0u);
}

TEST(CountMatches, OneRepeatDifference) {
  const auto kit = fixtures::uniform_kit(3);
  HaplotypeDatabase db{{parse_haplotype("10,11,13", kit)}, "x"};
  const auto c = count_matches(parse_haplotype("10,11,12", kit), db, {});
  EXPECT_EQ(c.identity, 0u);
  EXPECT_EQ(c.deldup, 1u);
  EXPECT_EQ(c.repeat, 1u);
  EXPECT_EQ(c.observed, 1u);
}

TEST(CountMatches, TypedPooledAndKitMismatch) {
  const auto kit = fixtures::uniform_kit(3);
  const auto h = parse_haplotype("10,11,12", kit);
  HaplotypeDatabase db{{parse_haplotype("10,11.1,12", kit)}, "x"};
  std::vector<Haplotype> typed{h};
  const auto c = count_matches(h, db, typed);
  EXPECT_EQ(c.observed, 2u);
  EXPECT_EQ(c.identity, 1u);
  EXPECT_EQ(c.per_locus_repeat, (std::vector<std::size_t>{2, 1, 2}));
  std::vector<Haplotype> bad{parse_haplotype("10,11", fixtures::uniform_kit(2))};
  EXPECT_THROW(count_matches(h, db, bad), Error);
}

TEST(CountMatches, Invariants) {
  const auto kit = fixtures::uniform_kit(8, 0.003, 2);
  fixtures::SyntheticPopulation pop(kit, 6, 21, 0.8);
  const auto db = pop.database(300);
  for (int i = 0; i < 100; ++i) {
    const auto h = pop.draw();
    const auto c = count_matches(h, db, {});
    EXPECT_LE(c.identity, c.repeat);
    EXPECT_LE(c.identity, c.deldup);
    EXPECT_LE(c.repeat, c.observed);
    EXPECT_LE(c.deldup, c.observed);
    for (auto r : c.per_locus_repeat) {
      EXPECT_LE(r, c.observed);
      if (c.repeat > 0) EXPECT_GE(r, 1u);
    }
  }
}

TEST(StandardDelDup, MulticopyGetsTwo) {
  const auto kit = fixtures::table_kit();
  EXPECT_EQ(standard_deldup(kit).copies, (std::vector<std::uint8_t>{1, 2, 1, 1, 1, 1, 1, 1, 1}));
}

TEST(Io, KitJsonAndDatabase) {
  const auto kit = parse_kit_json(
      R"({"name":"t","loci":[{"name":"B","chromosome_order":2,"mutation_rate":0.01},)"
      R"({"name":"A","chromosome_order":1,"mutation_rate":0.02,"multicopy":true}]})");
  EXPECT_EQ(kit.locus(0).name, "A");
  EXPECT_TRUE(kit.locus(0).multicopy);
  EXPECT_THROW(parse_kit_json("{"), Error);
  EXPECT_THROW(parse_kit_json(R"({"name":"t"})"), Error);

  std::istringstream csv("# comment\nB,A\n14,13/15\n\n-,12/12\n");
  const auto db = read_database(csv, kit);
  ASSERT_EQ(db.haplotypes.size(), 2u);
  EXPECT_EQ(db.haplotypes[0].profiles[0], LocusProfile::duplicated(Allele{13, 0}, Allele{15, 0}));
  EXPECT_EQ(db.haplotypes[1].profiles[1].kind(), ProfileKind::Deleted);

  std::istringstream bad("B,C\n1,2\n");
  EXPECT_THROW(read_database(bad, kit), Error);
}

TEST(Io, Peaks) {
  const auto kit = fixtures::uniform_kit(2);
  std::istringstream in("locus,allele,height\nL1,14,120\nL1,13,30\nL1,12,9\nL2,17.2,55\n");
  const auto ev = read_peaks(in, kit, 15.0);
  ASSERT_EQ(ev.loci[0].peaks.size(), 2u);
  EXPECT_EQ(ev.loci[0].peaks[0].allele, (Allele{13, 0}));
  EXPECT_EQ(ev.loci[1].peaks[0].allele, (Allele{17, 2}));
  std::istringstream dup("L1,14,120\nL1,14,30\n");
  EXPECT_THROW(read_peaks(dup, kit, 15.0), Error);
  std::istringstream unknown("L9,14,120\n");
  EXPECT_THROW(read_peaks(unknown, kit, 15.0), Error);
}

TEST(Io, DataKitsLoad) {
  for (const char* f : {"yfiler.json", "ppy23.json", "yfilerplus.json"}) {
    const auto kit = fixtures::load_data_kit(f);
    EXPECT_GE(kit.size(), 16u);
    EXPECT_GT(aggregate_nonmutation(standard_deldup(kit), kit), 0.8);
  }
}
