#include "haplodrift/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "haplodrift/error.hpp"

namespace haplodrift {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool skippable(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Kit parse_kit_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("kit JSON: ") + e.what());
  }
  try {
    std::vector<Locus> loci;
    for (const auto& l : j.at("loci")) {
      loci.push_back(Locus{l.at("name").get<std::string>(), l.at("chromosome_order").get<int>(),
                           l.at("mutation_rate").get<double>(), l.value("multicopy", false)});
    }
    return Kit(j.at("name").get<std::string>(), std::move(loci));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("kit JSON: ") + e.what());
  }
}

Kit load_kit(const std::filesystem::path& path) { return parse_kit_json(read_text_file(path)); }

HaplotypeDatabase read_database(std::istream& in, const Kit& kit, std::string population_label) {
  HaplotypeDatabase db;
  db.population_label = std::move(population_label);
  std::string line;
  std::vector<std::size_t> column_to_locus;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_csv_line(line);
    if (column_to_locus.empty()) {
      require(fields.size() == kit.size(), ErrorCode::KitMismatch,
              "database header has " + std::to_string(fields.size()) + " columns, kit has " +
                  std::to_string(kit.size()));
      for (const auto& name : fields) column_to_locus.push_back(kit.index_of(name));
      continue;
    }
    require(fields.size() == kit.size(), ErrorCode::Parse,
            "database line " + std::to_string(line_no) + ": expected " + std::to_string(kit.size()) + " fields");
    Haplotype h;
    h.profiles.assign(kit.size(), LocusProfile::deleted());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto y = column_to_locus[c];
      h.profiles[y] = parse_locus_profile(fields[c], kit.locus(y));
    }
    db.haplotypes.push_back(std::move(h));
  }
  require(!column_to_locus.empty(), ErrorCode::Parse, "database file has no header row");
  return db;
}

HaplotypeDatabase load_database(const std::filesystem::path& path, const Kit& kit) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  return read_database(in, kit, path.stem().string());
}

EvidenceProfile read_peaks(std::istream& in, const Kit& kit, double analytic_threshold) {
  EvidenceProfile ev;
  ev.analytic_threshold = analytic_threshold;
  ev.loci.resize(kit.size());
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_csv_line(line);
    require(fields.size() == 3, ErrorCode::Parse, "peaks line " + std::to_string(line_no) + ": expected 3 fields");
    if (first) {
      first = false;
      if (fields[0] == "locus") continue;
    }
    const auto y = kit.index_of(fields[0]);
    Locus single_copy = kit.locus(y);
    single_copy.multicopy = false;
    const auto profile = parse_locus_profile(fields[1], single_copy);
    require(profile.kind() == ProfileKind::Single, ErrorCode::Parse,
            "peaks line " + std::to_string(line_no) + ": allele must be a single designation");
    double height = 0;
    try {
      height = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "peaks line " + std::to_string(line_no) + ": bad height");
    }
    if (height < analytic_threshold) continue;
    auto& peaks = ev.loci[y].peaks;
    for (const auto& p : peaks) {
      require(p.allele != profile.low(), ErrorCode::Parse,
              "duplicate allele " + fields[1] + " at locus " + fields[0]);
    }
    peaks.push_back({profile.low(), height});
  }
  for (auto& l : ev.loci) {
    std::sort(l.peaks.begin(), l.peaks.end(), [](const Peak& a, const Peak& b) { return a.allele < b.allele; });
  }
  return ev;
}

EvidenceProfile load_peaks(const std::filesystem::path& path, const Kit& kit, double analytic_threshold) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  return read_peaks(in, kit, analytic_threshold);
}

}  // namespace haplodrift
