#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace clustopt {

using NodeId = std::uint32_t;
using Rng = std::mt19937_64;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;

  bool operator==(const Edge&) const = default;
};

// Undirected simple graph with strictly positive symmetric link weights.
//
// Storage is compressed adjacency: the neighbors of node i are
// adjacency_[offsets_[i] .. offsets_[i+1]) sorted ascending, with the link
// weight at the same position in weights_. Instances are immutable; every
// transformation returns a new graph.
class Graph {
 public:
  Graph() = default;

  // Validating constructor. Each unordered pair may appear once, in either
  // orientation. Throws DuplicateEdge, SelfLoop, NonPositiveWeight or
  // IndexOutOfRange.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const;
  std::span<const double> neighbor_weights(NodeId i) const;
  std::size_t degree(NodeId i) const;
  double weighted_degree(NodeId i) const;

  bool has_edge(NodeId i, NodeId j) const;
  std::optional<double> weight(NodeId i, NodeId j) const;

  // Canonical edge list: u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  bool operator==(const Graph&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<double> weights_;
};

struct DegreeStats {
  std::vector<std::size_t> degrees;
  double average = 0.0;
  std::size_t max = 0;
};

struct ClusteringReport {
  std::vector<double> local;
  double global = 0.0;
  std::vector<std::size_t> triangles_per_node;
};

Eigen::MatrixXd laplacian(const Graph& g);
Eigen::SparseMatrix<double> sparse_laplacian(const Graph& g);

bool is_connected(const Graph& g);

// Component id per node, numbered by smallest member.
std::vector<std::size_t> connected_components(const Graph& g);

// Subgraph on `nodes` relabelled to 0..nodes.size()-1 in the given order.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

// One uniform draw from [low, high] per unordered pair. Requires 0 < low <= high.
Graph assign_random_weights(const Graph& g, Rng& rng, double low, double high);

DegreeStats degree_stats(const Graph& g);

std::size_t triangles_at(const Graph& g, NodeId i);
std::size_t triangle_count(const Graph& g);
double local_clustering(const Graph& g, NodeId i);
ClusteringReport global_clustering(const Graph& g);

// Analytic clustering approximations for large preferential-attachment
// graphs, natural logarithm.
double predicted_c_ba(std::size_t n, std::size_t links);
double predicted_c_hk(std::size_t n, std::size_t links, std::size_t triad_links,
                      double average_degree);

std::map<std::size_t, std::size_t> degree_histogram(const Graph& g);

// Least-squares slope of log(count) against log(degree) over degrees >=
// min_degree. Throws InsufficientData with fewer than 3 distinct degrees.
double powerlaw_tail_slope(const std::map<std::size_t, std::size_t>& histogram,
                           std::size_t min_degree);

}  // namespace clustopt
