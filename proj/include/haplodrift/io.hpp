#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "haplodrift/haplotype.hpp"
#include "haplodrift/peak_model.hpp"

namespace haplodrift {

/// Kit JSON: {"name": ..., "loci": [{"name", "chromosome_order",
/// "mutation_rate", "multicopy"}]}.
Kit parse_kit_json(const std::string& json_text);
Kit load_kit(const std::filesystem::path& path);

/// Database CSV: header of locus names (any order matching the kit's loci),
/// then one haplotype per row in the locus token grammar. Blank lines and
/// lines starting with '#' are skipped.
HaplotypeDatabase read_database(std::istream& in, const Kit& kit, std::string population_label = {});
HaplotypeDatabase load_database(const std::filesystem::path& path, const Kit& kit);

/// Peaks CSV: rows of locus,allele,height_rfu (header optional). Peaks below
/// the threshold are dropped; loci absent from the file get no peaks.
EvidenceProfile read_peaks(std::istream& in, const Kit& kit, double analytic_threshold);
EvidenceProfile load_peaks(const std::filesystem::path& path, const Kit& kit, double analytic_threshold);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace haplodrift
