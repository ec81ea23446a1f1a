#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lobtree/book.hpp"
#include "lobtree/config.hpp"
#include "lobtree/coupling.hpp"
#include "lobtree/errors.hpp"
#include "lobtree/phase.hpp"
#include "lobtree/runner.hpp"

namespace py = pybind11;
using namespace lobtree;

namespace {

// Laws arrive as the same dicts the run configuration accepts.
DisplacementDist to_dist(const py::dict& d) {
  const auto text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
  return DisplacementDist::from_json(nlohmann::json::parse(text));
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::object optional_size(const std::optional<std::size_t>& v) {
  return v ? py::cast(*v) : py::none();
}

}  // namespace

PYBIND11_MODULE(_lobtree, m) {
  m.doc() = "Order book chain, its branching random walk representation and phase studies";
  m.attr("__version__") = software_version();

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);

  m.def(
      "classify", [](double p, const py::dict& dist) { return to_python(to_json(classify(p, to_dist(dist)))); },
      py::arg("p"), py::arg("dist"), "Analytic regime of the price for (p, X).");

  m.def(
      "infimum_mgf",
      [](const py::dict& dist) {
        const auto r = infimum_mgf(to_dist(dist));
        py::dict out;
        out["a"] = r.a;
        out["theta_star"] = r.theta_star;
        out["threshold"] = r.threshold;
        out["mgf_finite_somewhere"] = r.mgf_finite_somewhere;
        return out;
      },
      py::arg("dist"));

  m.def(
      "simulate",
      [](double p, const py::dict& dist, std::size_t horizon, std::uint64_t seed) {
        RandomStream stream(seed, 0);
        const auto t = simulate(p, to_dist(dist), horizon, stream);
        py::dict out;
        out["prices"] = t.prices;
        out["masses"] = t.masses;
        out["tau"] = optional_size(t.tau);
        return out;
      },
      py::arg("p"), py::arg("dist"), py::arg("horizon"), py::arg("seed"));

  m.def(
      "coupled_run",
      [](double p, const py::dict& dist, std::size_t horizon, std::uint64_t seed) {
        const auto d = to_dist(dist);
        CoupledRun run;
        {
          py::gil_scoped_release release;
          run = coupled_run(p, d, horizon, seed);
        }
        py::dict out;
        out["matched"] = run.matched();
        out["first_mismatch"] = optional_size(run.first_mismatch);
        out["prices"] = run.book_traj.prices;
        out["regeneration_steps"] = run.regeneration_steps;
        out["kappas"] = run.kappas;
        out["taus"] = run.taus;
        return out;
      },
      py::arg("p"), py::arg("dist"), py::arg("horizon"), py::arg("seed"));

  m.def(
      "drift_estimate",
      [](double p, const py::dict& dist, std::size_t horizon, std::size_t replicas, std::uint64_t seed,
         unsigned threads) {
        const auto d = to_dist(dist);
        DriftEstimate e;
        {
          py::gil_scoped_release release;
          e = drift_estimate(p, d, horizon, replicas, seed, threads);
        }
        py::dict out;
        out["slope"] = e.slope;
        out["ci95"] = e.ci95;
        out["fraction_positive"] = e.fraction_positive;
        return out;
      },
      py::arg("p"), py::arg("dist"), py::arg("horizon"), py::arg("replicas"), py::arg("seed"),
      py::arg("threads") = 1);

  m.def(
      "survival_estimate",
      [](double p, const py::dict& dist, std::vector<std::size_t> depths, std::size_t replicas,
         std::uint64_t seed, unsigned threads) {
        const auto d = to_dist(dist);
        SurvivalEstimate e;
        {
          py::gil_scoped_release release;
          e = survival_estimate(p, d, depths, replicas, seed, threads);
        }
        py::list rows;
        for (std::size_t i = 0; i < e.depths.size(); ++i) {
          py::dict row;
          row["d"] = e.depths[i];
          row["q"] = e.q[i].center;
          row["lo"] = e.q[i].lo;
          row["hi"] = e.q[i].hi;
          rows.append(row);
        }
        return rows;
      },
      py::arg("p"), py::arg("dist"), py::arg("depths"), py::arg("replicas"), py::arg("seed"),
      py::arg("threads") = 1);

  m.def(
      "execute", [](const std::string& config) { return execute(parse_config(config)); }, py::arg("config"),
      "Runs a JSON run description and returns its CSV or JSON output.");
}
