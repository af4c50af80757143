#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "krgg/campaign_io.hpp"
#include "krgg/config.hpp"
#include "krgg/experiments.hpp"
#include "krgg/flow.hpp"
#include "krgg/winding.hpp"

namespace py = pybind11;
using namespace krgg;

namespace {

py::object parse_json(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

std::vector<Edge> to_edges(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) edges.push_back(Edge{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  return edges;
}

}  // namespace

PYBIND11_MODULE(_krgg, m) {
  m.doc() = "Kuramoto gradient flow on random geometric graphs on the circle";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IndexResidualError>(m, "IndexResidualError", PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("epsilon", &Graph::epsilon)
      .def_property_readonly("angles", [](const Graph& g) {
        const auto a = g.nodes().angles();
        return std::vector<double>(a.begin(), a.end());
      })
      .def("edges", [](const Graph& g) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const Edge& e : g.edges()) out.emplace_back(e.i, e.j);
        return out;
      })
      .def("degree", &Graph::degree)
      .def("is_connected", [](const Graph& g) { return is_connected(g); })
      .def("component_count", [](const Graph& g) { return component_count(g); });

  m.def("rgg", [](std::vector<double> angles, double epsilon) {
    return build_graph(NodeSet::from_angles(std::move(angles)), GraphModel::rgg(epsilon));
  }, py::arg("angles"), py::arg("epsilon"), "Random geometric graph: edges between nodes closer than epsilon.");

  m.def("graph_from_edges", [](std::vector<double> angles, double epsilon,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const auto edges = to_edges(pairs);
    return Graph::from_edges(NodeSet::from_angles(std::move(angles)), GraphModel::rgg(epsilon), edges);
  }, py::arg("angles"), py::arg("epsilon"), py::arg("edges"));

  m.def("sample_angles", [](std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    const NodeSet nodes = sample_nodes(n, SamplingMode::fixed_n, rng);
    const auto a = nodes.angles();
    return std::vector<double>(a.begin(), a.end());
  }, py::arg("n"), py::arg("seed"));

  m.def("energy", [](const Graph& g, std::vector<double> u) { return energy(g, PhaseState(std::move(u))); });
  m.def("gradient", [](const Graph& g, std::vector<double> u) {
    return energy_gradient(g, PhaseState(std::move(u)));
  });
  m.def("kuramoto_rhs", [](const Graph& g, std::vector<double> u) { return flow_rhs(g, PhaseState(std::move(u))); });
  m.def("min_hessian_eigenvalue", [](const Graph& g, std::vector<double> u) {
    const EigenResult r = hessian_min_eigenvalue(g, PhaseState(std::move(u)));
    return py::make_tuple(r.value, r.converged);
  });
  m.def("pi_half_certificate", [](const Graph& g, std::vector<double> u) {
    return pi_half_certificate(g, PhaseState(std::move(u)));
  });

  m.def("winding_index", [](std::vector<double> angles, std::vector<double> u) -> std::optional<int> {
    return winding_index(NodeSet::from_angles(std::move(angles)), PhaseState(std::move(u))).value;
  }, py::arg("angles"), py::arg("phases"), "Winding index, or None on the boundary between classes.");
  m.def("twisted_state", [](std::vector<double> angles, int q) {
    return twisted_ansatz(NodeSet::from_angles(std::move(angles)), q).phases;
  }, py::arg("angles"), py::arg("q"));
  m.def("max_winding", &max_winding);

  m.def("integrate", [](const Graph& g, std::vector<double> u0, double grad_tol, long max_steps, bool eigenvalue) {
    FlowConfig cfg;
    cfg.grad_tol = grad_tol;
    cfg.max_steps = max_steps;
    cfg.compute_eigenvalue = eigenvalue;
    const EquilibriumReport r = integrate(g, PhaseState(std::move(u0)), cfg);
    py::dict out = parse_json(to_json(r).dump());
    out["final_state"] = r.final_state.phases;
    return out;
  }, py::arg("graph"), py::arg("phases"), py::arg("grad_tol") = 1e-10, py::arg("max_steps") = 1'000'000,
     py::arg("eigenvalue") = false, "Run the gradient flow to equilibrium and return its report.");

  m.def("resolve_config", [](const std::string& text) {
    return parse_json(config_to_json(parse_config_text(text)).dump());
  }, py::arg("text"), "Parse a key = value config and return the resolved settings.");
  m.def("run_campaign", [](const std::string& text) {
    const CampaignConfig cfg = parse_config_text(text);
    CampaignResult r;
    {
      py::gil_scoped_release release;
      r = run_campaign(cfg);
    }
    py::list records;
    for (const TrialRecord& rec : r.records) records.append(parse_json(to_json(rec).dump()));
    return py::make_tuple(records, summary_csv(r));
  }, py::arg("text"), "Run a campaign and return its trial records and summary CSV.");
}
