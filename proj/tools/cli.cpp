#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "haplodrift/branching.hpp"
#include "haplodrift/diagnostics.hpp"
#include "haplodrift/error.hpp"
#include "haplodrift/io.hpp"
#include "haplodrift/match_model.hpp"
#include "haplodrift/mixture.hpp"
#include "haplodrift/parallel.hpp"
#include "haplodrift/simulator.hpp"

namespace haplodrift::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kLog10e = 0.43429448190325182765;

struct ModelArgs {
  std::string kit;
  std::string db;
  double omega = 2e8;
  double growth = 0.0;
  int generations = 3;
  std::size_t truncation = 512;
  std::size_t iters = 200;
  std::string factors;
};

struct MixtureArgs {
  std::string peaks;
  std::vector<std::string> typed;
  std::size_t untyped = 1;
  std::size_t k = 1500;
  std::size_t m = 5000;
  double threshold = 15.0;
  int neighbourhood = 1;
  bool no_deleted = false;
  bool no_duplicated = false;
  bool fit_degradation = false;
  std::size_t top = 20;
  std::uint64_t seed = 1;
};

void add_model_options(CLI::App* app, ModelArgs& a, bool needs_db = true) {
  app->add_option("--kit", a.kit, "Kit JSON")->required()->check(CLI::ExistingFile);
  auto* db = app->add_option("--db", a.db, "Reference database CSV")->check(CLI::ExistingFile);
  if (needs_db) db->required();
  app->add_option("--omega", a.omega, "Population size")->capture_default_str();
  app->add_option("--growth", a.growth, "Growth rate per generation")->capture_default_str();
  app->add_option("--generations", a.generations, "Generations combined (1, 2 or 3)")
      ->check(CLI::IsMember({1, 2, 3}))
      ->capture_default_str();
  app->add_option("--truncation", a.truncation, "Cluster-size truncation K")->capture_default_str();
  app->add_option("--iters", a.iters, "Equilibrium iterations")->capture_default_str();
  app->add_option("--factors", a.factors, "Pattern factors a,b,c,d");
}

void add_mixture_options(CLI::App* app, MixtureArgs& a) {
  app->add_option("--peaks", a.peaks, "Peak table CSV")->required()->check(CLI::ExistingFile);
  app->add_option("--typed", a.typed, "Typed-person CSVs")->delimiter(',')->check(CLI::ExistingFile);
  app->add_option("--untyped", a.untyped, "Number of untyped contributors")->capture_default_str();
  app->add_option("--k", a.k, "Profiles kept per locus")->capture_default_str();
  app->add_option("--m", a.m, "Haplotype combinations kept")->capture_default_str();
  app->add_option("--threshold", a.threshold, "Analytic threshold (RFU)")->capture_default_str();
  app->add_option("--neighbourhood", a.neighbourhood, "Candidate alleles within this many repeats of a peak")
      ->capture_default_str();
  app->add_flag("--no-deleted", a.no_deleted, "Exclude deleted candidate profiles");
  app->add_flag("--no-duplicated", a.no_duplicated, "Exclude duplicated candidate profiles");
  app->add_flag("--fit-degradation", a.fit_degradation, "Fit per-contributor degradation slopes");
  app->add_option("--top", a.top, "Marginal haplotypes reported per untyped person")->capture_default_str();
  app->add_option("--seed", a.seed, "Seed for diagnostic simulation")->capture_default_str();
}

json model_config(const ModelArgs& a) {
  return {{"kit", a.kit},           {"db", a.db},
          {"omega", a.omega},       {"growth", a.growth},
          {"generations", a.generations}, {"truncation", a.truncation},
          {"iters", a.iters},       {"factors", a.factors}};
}

json mixture_config(const MixtureArgs& a) {
  return {{"peaks", a.peaks},
          {"typed", a.typed},
          {"untyped", a.untyped},
          {"k", a.k},
          {"m", a.m},
          {"threshold", a.threshold},
          {"neighbourhood", a.neighbourhood},
          {"no_deleted", a.no_deleted},
          {"no_duplicated", a.no_duplicated},
          {"fit_degradation", a.fit_degradation},
          {"top", a.top},
          {"seed", a.seed}};
}

PatternFactorParams parse_factors(const std::string& text) {
  PatternFactorParams f;
  if (text.empty()) return f;
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad factor value '" + item + "'");
    }
  }
  require(v.size() == 4, ErrorCode::Parse, "--factors needs four values a,b,c,d");
  f = {v[0], v[1], v[2], v[3]};
  f.validate();
  return f;
}

std::uint64_t to_omega(double omega) {
  require(omega >= 1 && omega < 1.8e19 && std::floor(omega) == omega, ErrorCode::InvalidArgument,
          "omega must be a positive integer");
  return static_cast<std::uint64_t>(omega);
}

MatchModelConfig match_config(const ModelArgs& a) {
  MatchModelConfig cfg;
  cfg.growth = a.growth;
  cfg.generations = static_cast<Generations>(a.generations);
  cfg.equilibrium = {a.truncation, a.iters, 1e-14};
  cfg.factors = parse_factors(a.factors);
  cfg.omega = to_omega(a.omega);
  cfg.validate();
  return cfg;
}

std::string config_line(const json& config) { return "# config: " + config.dump(); }

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot write " + path);
  f << text;
  require(static_cast<bool>(f), ErrorCode::Io, "failed writing " + path);
}

void write_json(const std::string& path, const json& report, std::ostream& out) {
  write_text(path, report.dump(2) + "\n", out);
}

std::string number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::vector<Haplotype> load_typed(const std::vector<std::string>& paths, const Kit& kit) {
  std::vector<Haplotype> out;
  for (const auto& p : paths) {
    const auto persons = load_database(p, kit);
    require(!persons.haplotypes.empty(), ErrorCode::Parse, "typed file " + p + " has no haplotype");
    out.insert(out.end(), persons.haplotypes.begin(), persons.haplotypes.end());
  }
  return out;
}

json posterior_summary(const PosteriorResult& post) {
  return {{"mean", post.mean},
          {"median", post.quantile(0.5)},
          {"q95", post.quantile(0.95)},
          {"q99", post.quantile(0.99)},
          {"tail_mass", post.tail_mass}};
}


struct EquilibriumArgs {
  std::string kit;
  std::optional<double> mu;
  double growth = 0.0;
  std::size_t truncation = 512;
  std::size_t iters = 200;
  double tolerance = 1e-14;
  int generations = 3;
  std::string out;
};

int cmd_equilibrium(const EquilibriumArgs& a, std::ostream& out) {
  double mu = 0;
  if (a.mu) {
    mu = *a.mu;
  } else {
    require(!a.kit.empty(), ErrorCode::InvalidArgument, "give --kit or --mu");
    const auto kit = load_kit(a.kit);
    mu = 1.0 - aggregate_nonmutation(standard_deldup(kit), kit);
  }
  const auto p = PopulationParams::from_growth(a.growth, mu);
  const auto prior =
      matching_prior(p, static_cast<Generations>(a.generations), {a.truncation, a.iters, a.tolerance});
  const json config = {{"command", "equilibrium"}, {"kit", a.kit},         {"mu", a.mu ? json(*a.mu) : json()},
                       {"growth", a.growth},       {"truncation", a.truncation}, {"iters", a.iters},
                       {"tolerance", a.tolerance}, {"generations", a.generations}};
  std::ostringstream s;
  s << config_line(config) << "\n";
  s << "# lambda=" << number(p.lambda) << " mu=" << number(p.mu)
    << " converged=" << (prior.single_generation.converged ? "true" : "false")
    << " iterations=" << prior.single_generation.iterations << " residual=" << number(prior.single_generation.residual)
    << " tail=" << number(prior.single_generation.distribution.tail()) << " mean=" << number(prior.distribution.mean)
    << "\n";
  s << "k,f,p_h\n";
  for (std::size_t k = 1; k <= prior.combined.truncation(); ++k) {
    s << k << "," << number(prior.combined.at(k)) << "," << number(prior.distribution.at(k)) << "\n";
  }
  write_text(a.out, s.str(), out);
  return 0;
}


struct SimulateArgs {
  std::uint64_t size = 100000;
  std::size_t gens = 500;
  double growth = 0.0;
  double mu = 0.05;
  std::uint64_t seed = 42;
  std::string mode = "wf";
  std::vector<std::size_t> snapshots;
  std::size_t max_population = 50000000;
  std::string out;
  std::string trajectory;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig cfg;
  cfg.initial_size = a.size;
  cfg.generations = a.gens;
  cfg.lambda = 1.0 + a.growth;
  cfg.mu = a.mu;
  cfg.seed = a.seed;
  cfg.mode = a.mode == "poisson" ? SimMode::PoissonGrowth : SimMode::WrightFisherFixed;
  cfg.snapshot_generations = a.snapshots;
  cfg.max_population = a.max_population;
  const auto s = simulate(cfg);
  const json config = {{"command", "simulate"}, {"size", a.size},         {"gens", a.gens},
                       {"growth", a.growth},    {"mu", a.mu},             {"seed", a.seed},
                       {"mode", a.mode},        {"snapshots", a.snapshots}, {"max_population", a.max_population}};
  std::ostringstream o;
  o << config_line(config) << "\n";
  o << "# final_population=" << s.population_trajectory.back()
    << " extinct_at=" << (s.extinct_at ? std::to_string(*s.extinct_at) : "none") << "\n";
  std::vector<std::string> columns{"final", "three_generations"};
  std::vector<const ClusterHistogram*> hists{&s.final_generation, &s.final_three_generations};
  for (const auto& snap : s.snapshots) {
    columns.push_back("generation_" + std::to_string(snap.generation));
    hists.push_back(&snap.histogram);
  }
  std::size_t kmax = 0;
  for (const auto* h : hists) kmax = std::max(kmax, h->counts.size());
  o << "k";
  for (const auto& c : columns) o << "," << c << "_clusters," << c << "_proportion";
  o << "\n";
  std::vector<std::vector<double>> props;
  for (const auto* h : hists) props.push_back(h->proportions(kmax));
  for (std::size_t k = 1; k <= kmax; ++k) {
    o << k;
    for (std::size_t c = 0; c < hists.size(); ++c) {
      const auto n = k <= hists[c]->counts.size() ? hists[c]->counts[k - 1] : 0;
      o << "," << n << "," << number(props[c][k - 1]);
    }
    o << "\n";
  }
  write_text(a.out, o.str(), out);
  if (!a.trajectory.empty()) {
    std::ostringstream t;
    t << config_line(config) << "\ngeneration,population\n";
    for (std::size_t g = 0; g < s.population_trajectory.size(); ++g) t << g << "," << s.population_trajectory[g] << "\n";
    write_text(a.trajectory, t.str(), out);
  }
  return 0;
}


struct MatchArgs {
  ModelArgs model;
  std::string haplotype;
  std::vector<std::string> typed;
  std::string out;
};

int cmd_matchprob(const MatchArgs& a, std::ostream& out) {
  const auto kit = load_kit(a.model.kit);
  const auto db = load_database(a.model.db, kit);
  const auto typed = load_typed(a.typed, kit);
  const auto h = parse_haplotype(a.haplotype, kit);
  const MatchModel model(kit, match_config(a.model));
  const auto r = model.probability(h, db, typed);
  json config = model_config(a.model);
  config["command"] = "matchprob";
  config["haplotype"] = a.haplotype;
  config["typed"] = a.typed;
  const json report = {{"config", config},
                       {"haplotype", format_haplotype(h)},
                       {"aggregate_mu", r.aggregate_mu},
                       {"counts",
                        {{"identity", r.counts.identity},
                         {"deldup", r.counts.deldup},
                         {"repeat", r.counts.repeat},
                         {"per_locus_repeat", r.counts.per_locus_repeat},
                         {"observed", r.counts.observed}}},
                       {"p_u", r.p_u},
                       {"f_D", r.f_D},
                       {"f_R", r.f_R},
                       {"probability", r.probability},
                       {"expected_matches", r.posterior.mean},
                       {"posterior", posterior_summary(r.posterior)}};
  write_json(a.out, report, out);
  return 0;
}


struct Inputs {
  Kit kit;
  HaplotypeDatabase db;
  EvidenceProfile evidence;
  std::vector<Haplotype> typed;
};

Inputs load_inputs(const ModelArgs& m, const MixtureArgs& x) {
  auto kit = load_kit(m.kit);
  auto db = load_database(m.db, kit);
  auto evidence = load_peaks(x.peaks, kit, x.threshold);
  auto typed = load_typed(x.typed, kit);
  return {std::move(kit), std::move(db), std::move(evidence), std::move(typed)};
}

MixtureOptions mixture_options(const MixtureArgs& x) {
  MixtureOptions o;
  o.k = x.k;
  o.m = x.m;
  o.candidates.neighbourhood = x.neighbourhood;
  o.candidates.allow_deleted = !x.no_deleted;
  o.candidates.allow_duplicated = !x.no_duplicated;
  o.fit_degradation = x.fit_degradation;
  return o;
}

struct MixtureRun {
  MixtureProblem problem;
  MixtureAnalysis analysis;
};

MixtureRun analyze(const Inputs& in, const Hypothesis& hyp, std::span<const Haplotype> pool, const MatchModel& model,
                   const MixtureArgs& x) {
  MixtureProblem problem(in.kit, in.evidence, hyp, PeakModelConfig{}, in.db, mixture_options(x).candidates);
  auto analysis = analyze_mixture(problem, in.db, pool, model, mixture_options(x));
  return {std::move(problem), std::move(analysis)};
}

json params_json(const ContributorParams& p) {
  json j = {{"cell_counts", p.cell_counts}, {"proportions", p.proportions()}};
  if (!p.degradation.empty()) j["degradation"] = p.degradation;
  return j;
}

json marginals_json(const MixtureAnalysis& a, std::size_t top) {
  json all = json::array();
  for (const auto& list : a.marginals) {
    json one = json::array();
    for (std::size_t i = 0; i < std::min(top, list.size()); ++i) {
      one.push_back({{"haplotype", format_haplotype(list[i].haplotype)}, {"probability", list[i].probability}});
    }
    all.push_back(std::move(one));
  }
  return all;
}

json diagnostics_json(const Kit& kit, const EvidenceProfile& ev, const FittedMixture& fitted) {
  const auto trace = prequential_diagnostics(kit, ev, fitted);
  json pit = json::array();
  std::vector<double> values;
  for (const auto& p : trace.pit) {
    pit.push_back({{"locus", kit.locus(p.locus).name}, {"allele", to_string(p.allele)}, {"height", p.height},
                   {"value", p.value}});
    values.push_back(p.value);
  }
  json monitor = json::array();
  for (const auto& m : trace.monitor) {
    monitor.push_back({{"locus", kit.locus(m.locus).name},
                       {"allele", to_string(m.allele)},
                       {"present", m.present},
                       {"p_present", m.p_present},
                       {"score", m.score}});
  }
  return {{"pit", pit},
          {"pit_ks_pvalue", values.empty() ? json() : json(ks_uniform_pvalue(values))},
          {"monitor", monitor},
          {"final_score", trace.final_score}};
}

std::string curve_csv(const json& config, const MixtureAnalysis& a) {
  std::ostringstream s;
  s << config_line(config) << "\nrank,log10_weight\n";
  for (std::size_t i = 0; i < a.ranked_log10_weights.size(); ++i) {
    s << i + 1 << "," << number(a.ranked_log10_weights[i]) << "\n";
  }
  return s.str();
}

struct MixtureCmdArgs {
  ModelArgs model;
  MixtureArgs mixture;
  std::vector<std::string> pool;
  std::string out;
  std::string curve;
  bool diagnostics = true;
};

json mixture_command_config(const char* name, const MixtureCmdArgs& a) {
  json config = model_config(a.model);
  config["command"] = name;
  config.update(mixture_config(a.mixture));
  config["pool"] = a.pool;
  return config;
}

int cmd_mixture(const MixtureCmdArgs& a, std::ostream& out, bool deconvolve_only) {
  const auto in = load_inputs(a.model, a.mixture);
  const auto pool = a.pool.empty() ? in.typed : load_typed(a.pool, in.kit);
  const MatchModel model(in.kit, match_config(a.model));
  const Hypothesis hyp{in.typed, a.mixture.untyped, "H"};
  const auto run = analyze(in, hyp, pool, model, a.mixture);
  const auto config = mixture_command_config(deconvolve_only ? "deconvolve" : "mixture", a);
  json report = {{"config", config}};
  if (!deconvolve_only) {
    report["log10_likelihood_product_rule"] = run.analysis.step1.log_likelihood * kLog10e;
    report["log10_likelihood_haplotype_model"] = run.analysis.step5.log_likelihood * kLog10e;
    report["product_rule_params"] = params_json(run.analysis.step1.params);
    report["params"] = params_json(run.analysis.step5.params);
    report["candidates"] = run.analysis.set.candidates.size();
  }
  report["marginals"] = marginals_json(run.analysis, a.mixture.top);
  if (!deconvolve_only && a.diagnostics) {
    report["diagnostics"] = diagnostics_json(in.kit, in.evidence, fitted_mixture(run.problem, run.analysis));
  }
  write_json(a.out, report, out);
  if (!a.curve.empty()) write_text(a.curve, curve_csv(config, run.analysis), out);
  return 0;
}


struct LrArgs {
  ModelArgs model;
  MixtureArgs mixture;
  std::vector<std::string> hyp1;
  std::vector<std::string> hyp2;
  std::vector<std::string> pool;
  std::string out;
};

Hypothesis parse_hypothesis(const std::vector<std::string>& items, const Kit& kit, std::string label) {
  Hypothesis h;
  h.label = std::move(label);
  std::vector<std::string> files;
  for (const auto& item : items) {
    if (item == "U" || item == "u") {
      ++h.n_untyped;
    } else {
      files.push_back(item);
    }
  }
  h.typed = load_typed(files, kit);
  require(h.contributors() > 0, ErrorCode::InvalidArgument, "hypothesis " + h.label + " has no contributors");
  return h;
}

int cmd_lr(const LrArgs& a, std::ostream& out) {
  const auto in = load_inputs(a.model, a.mixture);
  const auto h1 = parse_hypothesis(a.hyp1, in.kit, "hyp1");
  const auto h2 = parse_hypothesis(a.hyp2, in.kit, "hyp2");
  std::vector<Haplotype> pool;
  if (a.pool.empty()) {
    pool = h1.typed;
    for (const auto& h : h2.typed) {
      if (std::find(pool.begin(), pool.end(), h) == pool.end()) pool.push_back(h);
    }
  } else {
    pool = load_typed(a.pool, in.kit);
  }
  const auto cfg = match_config(a.model);
  const MatchModel model(in.kit, cfg);
  const auto r1 = analyze(in, h1, pool, model, a.mixture);
  const auto r2 = analyze(in, h2, pool, model, a.mixture);
  const double l1 = r1.analysis.step5.log_likelihood * kLog10e;
  const double l2 = r2.analysis.step5.log_likelihood * kLog10e;
  const double log10_lr = l1 - l2;
  json config = model_config(a.model);
  config["command"] = "lr";
  config.update(mixture_config(a.mixture));
  config["hyp1"] = a.hyp1;
  config["hyp2"] = a.hyp2;
  config["pool"] = a.pool;
  const json report = {{"config", config},
                       {"omega", cfg.omega},
                       {"hyp1", {{"log10_likelihood", l1}, {"params", params_json(r1.analysis.step5.params)}}},
                       {"hyp2", {{"log10_likelihood", l2}, {"params", params_json(r2.analysis.step5.params)}}},
                       {"log10_lr", log10_lr},
                       {"omega_over_lr", std::pow(10.0, std::log10(static_cast<double>(cfg.omega)) - log10_lr)}};
  write_json(a.out, report, out);
  return 0;
}


struct SweepArgs {
  MixtureCmdArgs base;
  std::string param;
  std::vector<double> values;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  static const std::vector<std::string> params{"k", "m", "omega", "growth", "factors", "threshold"};
  require(std::find(params.begin(), params.end(), a.param) != params.end(), ErrorCode::InvalidArgument,
          "unknown sweep parameter '" + a.param + "'");
  require(!a.values.empty(), ErrorCode::InvalidArgument, "sweep needs --values");
  const Kit kit = load_kit(a.base.model.kit);
  struct Row {
    double product_rule = 0;
    double haplotype_model = 0;
    std::vector<double> cells;
    double top_marginal = 0;
  };
  std::vector<Row> rows(a.values.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    ModelArgs model = a.base.model;
    MixtureArgs mixture = a.base.mixture;
    const double v = a.values[i];
    if (a.param == "k") mixture.k = static_cast<std::size_t>(v);
    if (a.param == "m") mixture.m = static_cast<std::size_t>(v);
    if (a.param == "omega") model.omega = v;
    if (a.param == "growth") model.growth = v;
    if (a.param == "threshold") mixture.threshold = v;
    auto cfg = match_config(model);
    if (a.param == "factors") {
      cfg.factors = {cfg.factors.a * (1 + v), cfg.factors.b * (1 + v), cfg.factors.c * (1 + v), cfg.factors.d * (1 + v)};
      cfg.factors.validate();
    }
    const auto in = load_inputs(model, mixture);
    const auto pool = a.base.pool.empty() ? in.typed : load_typed(a.base.pool, in.kit);
    const MatchModel mm(in.kit, cfg);
    const auto run = analyze(in, {in.typed, mixture.untyped, "H"}, pool, mm, mixture);
    rows[i].product_rule = run.analysis.step1.log_likelihood * kLog10e;
    rows[i].haplotype_model = run.analysis.step5.log_likelihood * kLog10e;
    rows[i].cells = run.analysis.step5.params.cell_counts;
    if (!run.analysis.marginals.empty() && !run.analysis.marginals[0].empty()) {
      rows[i].top_marginal = run.analysis.marginals[0].front().probability;
    }
  });
  json config = mixture_command_config("sweep", a.base);
  config["param"] = a.param;
  config["values"] = a.values;
  std::ostringstream s;
  s << config_line(config) << "\n" << a.param << ",log10_product_rule,log10_haplotype_model,top_marginal";
  const std::size_t C = rows.front().cells.size();
  for (std::size_t c = 0; c < C; ++c) s << ",cells_" << c + 1;
  s << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s << number(a.values[i]) << "," << number(rows[i].product_rule) << "," << number(rows[i].haplotype_model) << ","
      << number(rows[i].top_marginal);
    for (double c : rows[i].cells) s << "," << number(c);
    s << "\n";
  }
  write_text(a.base.out, s.str(), out);
  (void)kit;
  return 0;
}

int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Y-STR haplotype matching and mixture analysis", "haplodrift"};
  app.require_subcommand(1);

  EquilibriumArgs eq;
  auto* c_eq = app.add_subcommand("equilibrium", "Equilibrium cluster sizes and matching-number prior");
  c_eq->add_option("--kit", eq.kit, "Kit JSON")->check(CLI::ExistingFile);
  c_eq->add_option("--mu", eq.mu, "Aggregate mutation rate (instead of a kit)");
  c_eq->add_option("--growth", eq.growth)->capture_default_str();
  c_eq->add_option("--truncation", eq.truncation)->capture_default_str();
  c_eq->add_option("--iters", eq.iters)->capture_default_str();
  c_eq->add_option("--tolerance", eq.tolerance)->capture_default_str();
  c_eq->add_option("--generations", eq.generations)->check(CLI::IsMember({1, 2, 3}))->capture_default_str();
  c_eq->add_option("--out", eq.out, "Output CSV (default stdout)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Forward population simulation");
  c_sim->add_option("--size", sim.size)->capture_default_str();
  c_sim->add_option("--gens", sim.gens)->capture_default_str();
  c_sim->add_option("--growth", sim.growth)->capture_default_str();
  c_sim->add_option("--mu", sim.mu)->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--mode", sim.mode)->check(CLI::IsMember({"wf", "poisson"}))->capture_default_str();
  c_sim->add_option("--snapshots", sim.snapshots)->delimiter(',');
  c_sim->add_option("--max-population", sim.max_population)->capture_default_str();
  c_sim->add_option("--out", sim.out, "Output CSV (default stdout)");
  c_sim->add_option("--trajectory", sim.trajectory, "Population size per generation CSV");

  MatchArgs match;
  auto* c_match = app.add_subcommand("matchprob", "Probability of an unobserved haplotype");
  add_model_options(c_match, match.model);
  c_match->add_option("--haplotype", match.haplotype, "Haplotype in kit locus order")->required();
  c_match->add_option("--typed", match.typed, "Typed-person CSVs counted as observed")->delimiter(',');
  c_match->add_option("--out", match.out, "Output JSON (default stdout)");

  MixtureCmdArgs mix;
  auto* c_mix = app.add_subcommand("mixture", "Fit a mixture under one hypothesis");
  add_model_options(c_mix, mix.model);
  add_mixture_options(c_mix, mix.mixture);
  c_mix->add_option("--pool", mix.pool, "Typed persons counted as observed (default: --typed)")->delimiter(',');
  c_mix->add_option("--out", mix.out, "Report JSON (default stdout)");
  c_mix->add_option("--curve", mix.curve, "Ranked log10 weight curve CSV");

  MixtureCmdArgs dec;
  auto* c_dec = app.add_subcommand("deconvolve", "Marginal haplotypes of untyped contributors");
  add_model_options(c_dec, dec.model);
  add_mixture_options(c_dec, dec.mixture);
  c_dec->add_option("--pool", dec.pool, "Typed persons counted as observed (default: --typed)")->delimiter(',');
  c_dec->add_option("--out", dec.out, "Report JSON (default stdout)");
  c_dec->add_option("--curve", dec.curve, "Ranked log10 weight curve CSV");

  LrArgs lr;
  auto* c_lr = app.add_subcommand("lr", "Likelihood ratio of two hypotheses");
  add_model_options(c_lr, lr.model);
  c_lr->add_option("--peaks", lr.mixture.peaks, "Peak table CSV")->required()->check(CLI::ExistingFile);
  c_lr->add_option("--hyp1", lr.hyp1, "Contributors: typed CSVs and U for each unknown")->delimiter(',')->required();
  c_lr->add_option("--hyp2", lr.hyp2, "Contributors: typed CSVs and U for each unknown")->delimiter(',')->required();
  c_lr->add_option("--pool", lr.pool, "Typed persons counted as observed (default: all typed)")->delimiter(',');
  c_lr->add_option("--k", lr.mixture.k)->capture_default_str();
  c_lr->add_option("--m", lr.mixture.m)->capture_default_str();
  c_lr->add_option("--threshold", lr.mixture.threshold)->capture_default_str();
  c_lr->add_option("--neighbourhood", lr.mixture.neighbourhood)->capture_default_str();
  c_lr->add_flag("--no-deleted", lr.mixture.no_deleted);
  c_lr->add_flag("--no-duplicated", lr.mixture.no_duplicated);
  c_lr->add_option("--out", lr.out, "Report JSON (default stdout)");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Sensitivity of a mixture fit to one parameter");
  add_model_options(c_sweep, sweep.base.model);
  add_mixture_options(c_sweep, sweep.base.mixture);
  c_sweep->add_option("--pool", sweep.base.pool)->delimiter(',');
  c_sweep->add_option("--param", sweep.param, "k, m, omega, growth, factors (relative change) or threshold")
      ->required();
  c_sweep->add_option("--values", sweep.values, "Grid of values")->delimiter(',')->required();
  c_sweep->add_option("--out", sweep.base.out, "Output CSV (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage_error", e.what());
    return 2;
  }

  try {
    if (c_eq->parsed()) return cmd_equilibrium(eq, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_match->parsed()) return cmd_matchprob(match, out);
    if (c_mix->parsed()) return cmd_mixture(mix, out, false);
    if (c_dec->parsed()) return cmd_mixture(dec, out, true);
    if (c_lr->parsed()) return cmd_lr(lr, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, out);
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what());
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace haplodrift::cli
