#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support/fixtures.hpp"

namespace {

using json = nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = haplodrift::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string kit() { return fixtures::data_path("kits/yfiler.json"); }
std::string demo(const std::string& f) { return fixtures::data_path("demo/" + f); }

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string x;
  while (std::getline(ss, x, ',')) f.push_back(x);
  return f;
}

std::vector<std::string> mixture_args(const std::string& command) {
  return {command, "--kit", kit(), "--db", demo("db.csv"), "--peaks", demo("peaks.csv"), "--typed",
          demo("A.csv") + "," + demo("C.csv"), "--untyped", "1", "--k", "40", "--m", "100"};
}

}  // namespace

TEST(Cli, EquilibriumSumsToOne) {
  const auto r = run({"equilibrium", "--kit", kit(), "--growth", "0.02", "--truncation", "512"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# config: {", 0), 0u);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.front(), "k,f,p_h");
  double total = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(split(rows[i])[2]);
  EXPECT_EQ(rows.size(), 513u);
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Cli, SimulateIsReproducible) {
  const std::vector<std::string> args{"simulate", "--size", "2000", "--gens", "30", "--seed", "5"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run({"simulate", "--size", "2000", "--gens", "30", "--seed", "6"}).out);
}

TEST(Cli, MatchprobReportsConfigAndProbability) {
  std::ifstream f(demo("A.csv"));
  std::string header, h;
  std::getline(f, header);
  std::getline(f, h);
  const auto r = run({"matchprob", "--kit", kit(), "--db", demo("db.csv"), "--haplotype", h});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["config"]["command"], "matchprob");
  const double p = j["probability"];
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  EXPECT_DOUBLE_EQ(p, j["p_u"].get<double>() * j["f_D"].get<double>() * j["f_R"].get<double>());
}

TEST(Cli, MixtureRerunIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "haplodrift_cli_test";
  std::filesystem::create_directories(dir);
  auto args = mixture_args("mixture");
  const auto first = (dir / "a.json").string();
  const auto second = (dir / "b.json").string();
  auto a = args;
  a.insert(a.end(), {"--out", first, "--curve", (dir / "a.csv").string()});
  auto b = args;
  b.insert(b.end(), {"--out", second, "--curve", (dir / "b.csv").string()});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const auto ja = slurp(first);
  EXPECT_EQ(ja, slurp(second));
  const auto ca = slurp(dir / "a.csv");
  EXPECT_NE(ca.find("# config: "), std::string::npos);
  EXPECT_EQ(ca, slurp(dir / "b.csv"));
  const auto report = json::parse(ja);
  EXPECT_EQ(report["config"]["k"], 40);
  EXPECT_TRUE(report.contains("diagnostics"));
  double total = 0;
  for (const auto& m : report["marginals"][0]) total += m["probability"].get<double>();
  EXPECT_LE(total, 1.0 + 1e-12);
}

TEST(Cli, SweepFactorsWithoutArtefactsIsFlat) {
  auto args = mixture_args("sweep");
  args.insert(args.end(), {"--no-deleted", "--no-duplicated", "--param", "factors", "--values", "0,0.2"});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(split(rows[0])[0], "factors");
  const auto a = split(rows[1]);
  const auto b = split(rows[2]);
  for (std::size_t c = 1; c < a.size(); ++c) EXPECT_EQ(a[c], b[c]) << "column " << c;
}

TEST(Cli, LikelihoodRatioScalesWithOmega) {
  const auto lr = [&](const std::string& omega) {
    const auto r = run({"lr", "--kit", kit(), "--db", demo("db.csv"), "--peaks", demo("peaks.csv"), "--hyp1",
                        demo("A.csv") + "," + demo("C.csv") + "," + demo("D.csv"), "--hyp2",
                        "U," + demo("C.csv") + "," + demo("D.csv"), "--k", "40", "--m", "100", "--omega", omega});
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(r.out);
  };
  const auto big = lr("200000000");
  const auto small = lr("150000");
  const double l_big = big["log10_lr"];
  EXPECT_NEAR(big["omega_over_lr"].get<double>(), 2e8 / std::pow(10.0, l_big), 1e-9 * 2e8 / std::pow(10.0, l_big));
  const double delta = l_big - small["log10_lr"].get<double>();
  EXPECT_NEAR(delta / std::log10(2e8 / 1.5e5), 1.0, 0.25);
}

TEST(Cli, ErrorsAreJsonWithNonzeroExit) {
  const auto missing = run({"matchprob", "--kit", kit(), "--db", demo("db.csv"), "--haplotype", "1,2"});
  EXPECT_NE(missing.code, 0);
  const auto e = json::parse(missing.err);
  EXPECT_EQ(e["error"], "parse_error");
  EXPECT_FALSE(e["message"].get<std::string>().empty());

  const auto usage = run({"equilibrium", "--bogus"});
  EXPECT_EQ(usage.code, 2);
  EXPECT_EQ(json::parse(usage.err)["error"], "usage_error");

  const auto bad_sweep = run({"sweep", "--kit", kit(), "--db", demo("db.csv"), "--peaks", demo("peaks.csv"),
                              "--param", "colour", "--values", "1"});
  EXPECT_NE(bad_sweep.code, 0);
  EXPECT_EQ(json::parse(bad_sweep.err)["error"], "invalid_argument");
}
