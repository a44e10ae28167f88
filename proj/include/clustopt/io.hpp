#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "clustopt/costs.hpp"
#include "clustopt/dynamics.hpp"
#include "clustopt/generators.hpp"
#include "clustopt/graph.hpp"
#include "clustopt/montecarlo.hpp"
#include "clustopt/spectral.hpp"

namespace clustopt {

struct IngestOptions {
  bool drop_self_loops = true;
  bool merge_duplicate_edges = true;
  bool largest_component_only = true;
  bool use_weights = false;  // false: every link gets weight 1
};

// KONECT-style edge list: `%` comment lines and `u v [weight [timestamp]]`
// records. Node ids are compacted to 0..n-1 in order of first appearance.
// Throws MalformedLine (with the 1-based line number) or EmptyGraph.
Graph parse_edge_list(std::string_view text, const IngestOptions& opts = {});

// {"version":1,"n":N,"edges":[[i,j,w],...]} with i < j in lexicographic
// order. Serialization is canonical, so equal graphs give equal bytes.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

Graph read_graph(const std::filesystem::path& path);
void write_graph(const Graph& g, const std::filesystem::path& path);

// Header step,gap,lyapunov,consensus_residual,tracking_residual.
std::string trace_to_csv(const TrialTrace& trace);
void write_trace(const TrialTrace& trace, const std::filesystem::path& path);

std::string cost_model_to_json(const CostModel& model);
CostModel cost_model_from_json(std::string_view text);

std::string rewire_report_to_json(const RewireReport& report);

// Header name,n,d,C,lambda2,rate; absent values are empty fields.
std::string scatter_to_csv(std::span<const ScatterRow> rows);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

}  // namespace clustopt
