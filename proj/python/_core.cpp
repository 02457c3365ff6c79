#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "haplodrift/branching.hpp"
#include "haplodrift/diagnostics.hpp"
#include "haplodrift/error.hpp"
#include "haplodrift/io.hpp"
#include "haplodrift/match_model.hpp"
#include "haplodrift/simulator.hpp"

namespace py = pybind11;
using namespace haplodrift;

namespace {

py::dict equilibrium_py(double growth, double mu, int generations, std::size_t truncation, std::size_t iters) {
  const auto prior = matching_prior(PopulationParams::from_growth(growth, mu), static_cast<Generations>(generations),
                                    {truncation, iters, 1e-14});
  py::dict d;
  d["f"] = prior.combined.probs;
  d["p_h"] = prior.distribution.probs;
  d["mean"] = prior.distribution.mean;
  d["converged"] = prior.single_generation.converged;
  d["iterations"] = prior.single_generation.iterations;
  d["residual"] = prior.single_generation.residual;
  return d;
}

py::dict simulate_py(std::uint64_t size, std::size_t gens, double growth, double mu, std::uint64_t seed,
                     const std::string& mode) {
  SimConfig cfg;
  cfg.initial_size = size;
  cfg.generations = gens;
  cfg.lambda = 1.0 + growth;
  cfg.mu = mu;
  cfg.seed = seed;
  cfg.mode = mode == "poisson" ? SimMode::PoissonGrowth : SimMode::WrightFisherFixed;
  py::dict d;
  py::gil_scoped_release release;
  const auto s = simulate(cfg);
  py::gil_scoped_acquire acquire;
  d["cluster_counts"] = s.final_generation.counts;
  d["three_generation_counts"] = s.final_three_generations.counts;
  d["trajectory"] = s.population_trajectory;
  d["extinct_at"] = s.extinct_at ? py::object(py::int_(*s.extinct_at)) : py::object(py::none());
  return d;
}

py::dict match_probability_py(const std::string& kit_path, const std::string& db_path, const std::string& haplotype,
                              std::uint64_t omega, double growth, int generations) {
  const auto kit = load_kit(kit_path);
  const auto db = load_database(db_path, kit);
  MatchModelConfig cfg;
  cfg.omega = omega;
  cfg.growth = growth;
  cfg.generations = static_cast<Generations>(generations);
  const MatchModel model(kit, cfg);
  const auto r = model.probability(parse_haplotype(haplotype, kit), db, {});
  py::dict d;
  d["probability"] = r.probability;
  d["p_u"] = r.p_u;
  d["f_D"] = r.f_D;
  d["f_R"] = r.f_R;
  d["aggregate_mu"] = r.aggregate_mu;
  d["identity_count"] = r.counts.identity;
  d["expected_matches"] = r.posterior.mean;
  return d;
}

py::tuple run_cli_py(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Y-STR haplotype matching and mixture analysis";
  py::register_exception<Error>(m, "HaplodriftError", PyExc_ValueError);

  py::class_<Kit>(m, "Kit")
      .def_property_readonly("name", &Kit::name)
      .def_property_readonly("loci",
                             [](const Kit& k) {
                               std::vector<std::string> names;
                               for (const auto& l : k.loci()) names.push_back(l.name);
                               return names;
                             })
      .def("__len__", &Kit::size);

  m.def("load_kit", [](const std::string& path) { return load_kit(path); }, py::arg("path"));
  m.def(
      "aggregate_mutation_rate",
      [](const Kit& kit) { return 1.0 - aggregate_nonmutation(standard_deldup(kit), kit); }, py::arg("kit"));
  m.def(
      "normalize_haplotype",
      [](const std::string& text, const Kit& kit) { return format_haplotype(parse_haplotype(text, kit)); },
      py::arg("haplotype"), py::arg("kit"));
  m.def("equilibrium", &equilibrium_py, py::arg("growth") = 0.0, py::arg("mu") = 0.05, py::arg("generations") = 3,
        py::arg("truncation") = 512, py::arg("iters") = 200);
  m.def("simulate", &simulate_py, py::arg("size"), py::arg("gens"), py::arg("growth") = 0.0, py::arg("mu") = 0.05,
        py::arg("seed") = 42, py::arg("mode") = "wf");
  m.def("match_probability", &match_probability_py, py::arg("kit"), py::arg("db"), py::arg("haplotype"),
        py::arg("omega") = 200000000, py::arg("growth") = 0.0, py::arg("generations") = 3);
  m.def(
      "ks_uniform_pvalue", [](const std::vector<double>& v) { return ks_uniform_pvalue(v); }, py::arg("values"));
  m.def("run_cli", &run_cli_py, py::arg("args"));
}
