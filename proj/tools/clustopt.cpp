// Command-line front end: graph generation, metrics, spectral analysis,
// optimization runs, rewiring, Monte-Carlo campaigns and dataset ingestion.
//
// Exit codes: 0 success, 1 domain error (one line on stderr), 2 usage error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clustopt/costs.hpp"
#include "clustopt/dynamics.hpp"
#include "clustopt/error.hpp"
#include "clustopt/generators.hpp"
#include "clustopt/graph.hpp"
#include "clustopt/io.hpp"
#include "clustopt/montecarlo.hpp"
#include "clustopt/spectral.hpp"

namespace fs = std::filesystem;
using namespace clustopt;

namespace {

CostFamily parse_family(const std::string& name) {
  return name == "mlloss" ? CostFamily::MlLoss : CostFamily::Quartic;
}

Graph with_unit_weights(const Graph& g) {
  auto edges = g.edges();
  for (Edge& e : edges) e.weight = 1.0;
  return Graph::from_edges(g.num_nodes(), edges);
}

struct GenerateArgs {
  std::string model = "ba";
  std::size_t n = 0, l = 1, l2 = 0, seed_size = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.model == "ba" && a.l2 != 0) throw Error(Errc::InvalidParams, "--l2 requires --model hk");
  Rng rng(a.seed);
  Graph g = a.model == "hk" ? generate_hk({a.n, a.l, a.l2, a.seed_size}, rng)
                            : generate_ba({a.n, a.l, a.seed_size}, rng);
  write_graph(g, a.out);
  return 0;
}

struct MetricsArgs {
  std::string in;
  bool csv = false;
};

int cmd_metrics(const MetricsArgs& a) {
  const Graph g = read_graph(a.in);
  const DegreeStats deg = degree_stats(g);
  const double c = global_clustering(g).global;
  const bool connected = is_connected(g);
  std::optional<double> slope;
  try {
    slope = powerlaw_tail_slope(degree_histogram(g), 1);
  } catch (const Error&) {
  }
  if (a.csv) {
    std::cout << "n,edges,d,max_degree,C,connected,tail_slope\n"
              << g.num_nodes() << ',' << g.num_edges() << ',' << format_double(deg.average)
              << ',' << deg.max << ',' << format_double(c) << ',' << (connected ? 1 : 0) << ','
              << (slope ? format_double(*slope) : "") << '\n';
  } else {
    nlohmann::ordered_json doc;
    doc["n"] = g.num_nodes();
    doc["edges"] = g.num_edges();
    doc["d"] = deg.average;
    doc["max_degree"] = deg.max;
    doc["C"] = c;
    doc["connected"] = connected;
    if (slope) {
      doc["tail_slope"] = *slope;
    } else {
      doc["tail_slope"] = nullptr;
    }
    std::cout << doc.dump() << '\n';
  }
  return 0;
}

struct SpectralArgs {
  std::string in;
  double alpha = 0.001;
  std::string cost = "quartic";
  std::uint64_t cost_seed = 0;
  std::string weights;  // empty keeps file weights
  double wlow = 0.5, whigh = 1.5;
  std::uint64_t seed = 0;
};

int cmd_spectral(const SpectralArgs& a) {
  Graph g = read_graph(a.in);
  if (a.weights == "unit") {
    g = with_unit_weights(g);
  } else if (a.weights == "random") {
    Rng rng(a.seed);
    g = assign_random_weights(g, rng, a.wlow, a.whigh);
  }
  if (!is_connected(g)) {
    throw Error(Errc::Disconnected,
                "graph is not connected (algebraic connectivity is zero; ingest the largest "
                "component first)");
  }
  const std::pair<std::string, Graph> item{fs::path(a.in).stem().string(), std::move(g)};
  const auto rows = scatter_report(std::span(&item, 1), a.alpha,
                                   CostSpec{parse_family(a.cost), 20, ResamplePolicy::Once},
                                   a.cost_seed);
  std::cout << scatter_to_csv(rows);
  return 0;
}

struct OptimizeArgs {
  std::string in;
  std::string cost = "quartic";
  double alpha = 1.0;
  double h = 0.0;
  std::size_t steps = 0;
  std::size_t record_stride = 1;
  double gap_tolerance = 0.0;
  double x_low = -5.0, x_high = 5.0;
  std::size_t m = 20;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_optimize(const OptimizeArgs& a) {
  const Graph g = read_graph(a.in);
  Rng rng(a.seed);
  const CostModel model = sample_cost({parse_family(a.cost), a.m, ResamplePolicy::Once},
                                      g.num_nodes(), rng);
  SimConfig cfg;
  cfg.alpha = a.alpha;
  cfg.h = a.h;
  cfg.steps = a.steps;
  cfg.record_stride = a.record_stride;
  cfg.gap_tolerance = a.gap_tolerance;
  cfg.x_init_low = a.x_low;
  cfg.x_init_high = a.x_high;
  const TrialTrace trace = run(g, model, cfg, rng);
  write_trace(trace, a.out);

  nlohmann::ordered_json meta;
  meta["input"] = a.in;
  meta["cost"] = a.cost;
  meta["seed"] = a.seed;
  meta["alpha"] = cfg.alpha;
  meta["h"] = trace.h;
  meta["steps"] = cfg.steps;
  meta["record_stride"] = cfg.record_stride;
  meta["gap_tolerance"] = cfg.gap_tolerance;
  meta["x_init_range"] = {cfg.x_init_low, cfg.x_init_high};
  meta["diverged"] = trace.diverged;
  meta["final_gap"] = trace.gap.back();
  write_text(a.out + ".meta.json", meta.dump(2) + "\n");
  std::cout << nlohmann::ordered_json{{"h", trace.h},
                                      {"final_step", trace.recorded_steps.back()},
                                      {"final_gap", trace.gap.back()},
                                      {"diverged", trace.diverged}}
                   .dump()
            << '\n';
  if (trace.diverged) throw Error(Errc::NumericalDivergence, "optimization diverged");
  return 0;
}

struct RewireArgs {
  std::string in;
  double target_c = 1.0;
  std::size_t max_swaps = 0;
  std::size_t check_interval = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_rewire(const RewireArgs& a) {
  const Graph g = read_graph(a.in);
  Rng rng(a.seed);
  auto [out, report] =
      rewire_increase_clustering(g, {a.target_c, a.max_swaps, a.check_interval}, rng);
  write_graph(out, a.out);
  std::cout << rewire_report_to_json(report) << '\n';
  return 0;
}

struct McArgs {
  std::string config;
  std::string out;
};

int cmd_mc(const McArgs& a) {
  const McConfig cfg =
      mc_config_from_json(read_text(a.config), fs::path(a.config).parent_path());
  const McSummary summary = run_mc(cfg);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
  write_mc_outputs(summary, a.out);
  return 0;
}

struct IngestArgs {
  std::string format = "konect";
  std::string in;
  bool keep_all = false;
  bool use_weights = false;
  std::string out;
};

int cmd_ingest(const IngestArgs& a) {
  IngestOptions opts;
  opts.largest_component_only = !a.keep_all;
  opts.use_weights = a.use_weights;
  write_graph(parse_edge_list(read_text(a.in), opts), a.out);
  return 0;
}

struct ScatterArgs {
  std::vector<std::string> inputs;
  double alpha = 0.001;
  std::string cost = "quartic";
  std::uint64_t cost_seed = 0;
  std::string out;
};

int cmd_scatter(const ScatterArgs& a) {
  std::vector<std::pair<std::string, Graph>> graphs;
  for (const auto& path : a.inputs) {
    graphs.emplace_back(fs::path(path).stem().string(), read_graph(path));
  }
  const auto rows = scatter_report(
      graphs, a.alpha, CostSpec{parse_family(a.cost), 20, ResamplePolicy::Once}, a.cost_seed);
  write_text(a.out, scatter_to_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering versus convergence of decentralized gradient tracking"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a BA or HK scale-free graph");
  generate->add_option("--model", gen.model)->check(CLI::IsMember({"ba", "hk"}))->required();
  generate->add_option("--n", gen.n)->required();
  generate->add_option("--l", gen.l)->required();
  generate->add_option("--l2", gen.l2);
  generate->add_option("--seed-size", gen.seed_size, "Initial clique size (default: L)");
  generate->add_option("--seed", gen.seed);
  generate->add_option("--out", gen.out)->required();

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "Degree and clustering statistics");
  metrics->add_option("--in", met.in)->required();
  auto* json_flag = metrics->add_flag("--json", "JSON output (default)");
  metrics->add_flag("--csv", met.csv, "CSV output")->excludes(json_flag);

  SpectralArgs spe;
  auto* spectral = app.add_subcommand("spectral", "Algebraic connectivity and convergence rate");
  spectral->add_option("--in", spe.in)->required();
  spectral->add_option("--alpha", spe.alpha)->required();
  spectral->add_option("--cost", spe.cost)->check(CLI::IsMember({"quartic", "mlloss"}));
  spectral->add_option("--cost-seed", spe.cost_seed);
  spectral->add_option("--weights", spe.weights)->check(CLI::IsMember({"unit", "random"}));
  spectral->add_option("--wlow", spe.wlow);
  spectral->add_option("--whigh", spe.whigh);
  spectral->add_option("--seed", spe.seed);

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Run gradient tracking and write its trace");
  optimize->set_help_flag("--help", "Print this help message and exit");
  optimize->add_option("--in", opt.in)->required();
  optimize->add_option("--cost", opt.cost)->check(CLI::IsMember({"quartic", "mlloss"}))->required();
  optimize->add_option("--alpha", opt.alpha)->required();
  optimize->add_option("--h", opt.h, "Step size (default: half the stability bound)");
  optimize->add_option("--steps", opt.steps)->required();
  optimize->add_option("--record-stride", opt.record_stride);
  optimize->add_option("--gap-tol", opt.gap_tolerance);
  optimize->add_option("--x-low", opt.x_low);
  optimize->add_option("--x-high", opt.x_high);
  optimize->add_option("--m", opt.m, "mlloss data points per node");
  optimize->add_option("--seed", opt.seed);
  optimize->add_option("--out", opt.out)->required();

  RewireArgs rew;
  auto* rewire = app.add_subcommand("rewire", "Degree-preserving clustering increase");
  rewire->add_option("--in", rew.in)->required();
  rewire->add_option("--target-c", rew.target_c)->required();
  rewire->add_option("--max-swaps", rew.max_swaps)->required();
  rewire->add_option("--check-interval", rew.check_interval);
  rewire->add_option("--seed", rew.seed);
  rewire->add_option("--out", rew.out)->required();

  McArgs mca;
  auto* mc = app.add_subcommand("mc", "Run a Monte-Carlo campaign");
  mc->add_option("--config", mca.config)->required();
  mc->add_option("--out", mca.out)->required();

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "Convert an edge list to graph JSON");
  ingest->add_option("--format", ing.format)->check(CLI::IsMember({"konect"}))->required();
  ingest->add_option("--in", ing.in)->required();
  ingest->add_flag("--keep-all-components", ing.keep_all);
  ingest->add_flag("--use-weights", ing.use_weights);
  ingest->add_option("--out", ing.out)->required();

  ScatterArgs sca;
  auto* scatter = app.add_subcommand("scatter", "Clustering versus spectral table");
  scatter->add_option("--inputs", sca.inputs)->required();
  scatter->add_option("--alpha", sca.alpha)->required();
  scatter->add_option("--cost", sca.cost)->check(CLI::IsMember({"quartic", "mlloss"}));
  scatter->add_option("--cost-seed", sca.cost_seed);
  scatter->add_option("--out", sca.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*metrics) return cmd_metrics(met);
    if (*spectral) return cmd_spectral(spe);
    if (*optimize) return cmd_optimize(opt);
    if (*rewire) return cmd_rewire(rew);
    if (*mc) return cmd_mc(mca);
    if (*ingest) return cmd_ingest(ing);
    if (*scatter) return cmd_scatter(sca);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
