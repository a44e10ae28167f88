#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clustopt/costs.hpp"
#include "clustopt/dynamics.hpp"
#include "clustopt/error.hpp"
#include "clustopt/generators.hpp"
#include "clustopt/graph.hpp"
#include "clustopt/io.hpp"
#include "clustopt/montecarlo.hpp"
#include "clustopt/spectral.hpp"

namespace py = pybind11;
using namespace clustopt;

namespace {

Graph graph_from_tuples(std::size_t n, const std::vector<std::tuple<NodeId, NodeId, double>>& edges) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& [u, v, w] : edges) out.push_back({u, v, w});
  return Graph::from_edges(n, out);
}

CostModel make_cost(const std::string& family, std::size_t n, std::uint64_t seed, std::size_t m) {
  if (family != "mlloss" && family != "quartic") {
    throw Error(Errc::InvalidParams, "unknown cost family '" + family + "'");
  }
  Rng rng(seed);
  return sample_cost({family == "mlloss" ? CostFamily::MlLoss : CostFamily::Quartic, m,
                      ResamplePolicy::Once},
                     n, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scale-free graph generators, clustering metrics and gradient-tracking simulation.";

  py::register_exception<Error>(m, "ClustoptError", PyExc_ValueError);

  py::class_<Graph>(m, "Graph")
      .def(py::init(&graph_from_tuples), py::arg("n"), py::arg("edges"),
           "Build from (u, v, weight) tuples.")
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("degree", &Graph::degree)
      .def("neighbors", [](const Graph& g, NodeId i) {
        auto nb = g.neighbors(i);
        return std::vector<NodeId>(nb.begin(), nb.end());
      })
      .def("edges", [](const Graph& g) {
        std::vector<std::tuple<NodeId, NodeId, double>> out;
        for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v, e.weight);
        return out;
      })
      .def("to_json", &graph_to_json)
      .def_static("from_json", [](const std::string& text) { return graph_from_json(text); })
      .def(py::self == py::self);

  m.def("generate_ba", [](std::size_t n, std::size_t l, std::uint64_t seed, std::size_t seed_size) {
    Rng rng(seed);
    return generate_ba({n, l, seed_size}, rng);
  }, py::arg("n"), py::arg("l"), py::arg("seed") = 0, py::arg("seed_size") = 0);

  m.def("generate_hk", [](std::size_t n, std::size_t l, std::size_t l2, std::uint64_t seed,
                          std::size_t seed_size) {
    Rng rng(seed);
    return generate_hk({n, l, l2, seed_size}, rng);
  }, py::arg("n"), py::arg("l"), py::arg("l2"), py::arg("seed") = 0, py::arg("seed_size") = 0);

  m.def("assign_random_weights", [](const Graph& g, std::uint64_t seed, double low, double high) {
    Rng rng(seed);
    return assign_random_weights(g, rng, low, high);
  }, py::arg("g"), py::arg("seed"), py::arg("low") = 0.5, py::arg("high") = 1.5);

  m.def("is_connected", &is_connected);
  m.def("laplacian", &laplacian);
  m.def("local_clustering", &local_clustering);
  m.def("global_clustering", [](const Graph& g) { return global_clustering(g).global; });
  m.def("local_clustering_all", [](const Graph& g) { return global_clustering(g).local; });
  m.def("average_degree", [](const Graph& g) { return degree_stats(g).average; });
  m.def("predicted_c_ba", &predicted_c_ba, py::arg("n"), py::arg("l"));
  m.def("predicted_c_hk", &predicted_c_hk, py::arg("n"), py::arg("l"), py::arg("l2"), py::arg("d"));

  m.def("lambda2_laplacian", [](const Graph& g) { return lambda2_laplacian(g); });
  m.def("build_jacobian", [](const Graph& g, double alpha, const Eigen::VectorXd& hessian) {
    return build_jacobian(make_jacobian_spec(g, alpha, hessian));
  }, py::arg("g"), py::arg("alpha"), py::arg("hessian"));
  m.def("convergence_rate", [](const Graph& g, double alpha, const Eigen::VectorXd& hessian) {
    JacobianSpec spec = make_jacobian_spec(g, alpha, hessian);
    return convergence_rate(spec, default_zero_tol(spec.laplacian));
  }, py::arg("g"), py::arg("alpha"), py::arg("hessian"));

  m.def("rewire", [](const Graph& g, double target_c, std::size_t max_swaps, std::uint64_t seed,
                     std::size_t check_interval) {
    Rng rng(seed);
    auto [out, report] = rewire_increase_clustering(g, {target_c, max_swaps, check_interval}, rng);
    py::dict d;
    d["swaps_attempted"] = report.swaps_attempted;
    d["swaps_accepted"] = report.swaps_accepted;
    d["initial_c"] = report.initial_c;
    d["final_c"] = report.final_c;
    d["reached_target"] = report.reached_target;
    return py::make_tuple(std::move(out), d);
  }, py::arg("g"), py::arg("target_c"), py::arg("max_swaps"), py::arg("seed") = 0,
     py::arg("check_interval") = 100);

  py::class_<CostModel>(m, "CostModel")
      .def_property_readonly("family", [](const CostModel& c) { return std::string(to_string(c.family())); })
      .def_property_readonly("num_nodes", &CostModel::num_nodes)
      .def("value", &CostModel::value)
      .def("gradient", &CostModel::gradient)
      .def("hessian", &CostModel::hessian)
      .def("optimum", [](const CostModel& c) {
        const auto cert = aggregate_optimum(c);
        return py::make_tuple(cert.x_star, cert.f_star);
      })
      .def("to_json", &cost_model_to_json);
  m.def("sample_cost", &make_cost, py::arg("family"), py::arg("n"), py::arg("seed") = 0,
        py::arg("m") = 20);
  m.def("quartic_cost", [](std::vector<double> a, std::vector<double> b) {
    return CostModel(QuarticModel{std::move(a), std::move(b)});
  });

  m.def("optimize", [](const Graph& g, const CostModel& model, double alpha, std::size_t steps,
                       double h, std::size_t record_stride, std::uint64_t seed) {
    SimConfig cfg;
    cfg.alpha = alpha;
    cfg.steps = steps;
    cfg.h = h;
    cfg.record_stride = record_stride;
    Rng rng(seed);
    const TrialTrace t = run(g, model, cfg, rng);
    py::dict d;
    d["step"] = t.recorded_steps;
    d["gap"] = t.gap;
    d["lyapunov"] = t.lyapunov;
    d["consensus_residual"] = t.consensus_residual;
    d["tracking_residual"] = t.tracking_residual;
    d["diverged"] = t.diverged;
    d["h"] = t.h;
    return d;
  }, py::arg("g"), py::arg("cost"), py::arg("alpha"), py::arg("steps"), py::arg("h") = 0.0,
     py::arg("record_stride") = 1, py::arg("seed") = 0);

  m.def("parse_edge_list", [](const std::string& text, bool largest_component_only,
                              bool use_weights) {
    IngestOptions opts;
    opts.largest_component_only = largest_component_only;
    opts.use_weights = use_weights;
    return parse_edge_list(text, opts);
  }, py::arg("text"), py::arg("largest_component_only") = true, py::arg("use_weights") = false);

  m.def("run_mc", [](const std::string& config_json) {
    return summary_to_json(run_mc(mc_config_from_json(config_json)));
  }, py::arg("config_json"), "Run a campaign from its JSON config; returns summary JSON.");

  m.def("trial_seed", &trial_seed);
}
