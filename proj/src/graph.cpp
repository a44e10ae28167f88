#include "clustopt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "clustopt/error.hpp"

namespace clustopt {

namespace {

std::size_t sorted_intersection_size(std::span<const NodeId> a,
                                     std::span<const NodeId> b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

void check_node(const Graph& g, NodeId i) {
  if (i >= g.num_nodes()) {
    throw Error(Errc::IndexOutOfRange,
                "node " + std::to_string(i) + " out of range for n=" +
                    std::to_string(g.num_nodes()));
  }
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw Error(Errc::IndexOutOfRange,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                      ") out of range for n=" + std::to_string(n));
    }
    if (e.u == e.v) {
      throw Error(Errc::SelfLoop, "self-loop at node " + std::to_string(e.u));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(Errc::NonPositiveWeight,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                      ") has non-positive weight");
    }
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  std::sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t k = 1; k < canon.size(); ++k) {
    if (canon[k].u == canon[k - 1].u && canon[k].v == canon[k - 1].v) {
      throw Error(Errc::DuplicateEdge,
                  "duplicate edge (" + std::to_string(canon[k].u) + "," +
                      std::to_string(canon[k].v) + ")");
    }
  }

  Graph g;
  g.n_ = n;
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : canon) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.adjacency_.resize(2 * canon.size());
  g.weights_.resize(2 * canon.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Lexicographic edge order fills each row in ascending neighbor order: for
  // row v the entries u < v arrive first (sorted by u), then those with u = v.
  for (const Edge& e : canon) {
    g.adjacency_[cursor[e.v]] = e.u;
    g.weights_[cursor[e.v]++] = e.weight;
  }
  for (const Edge& e : canon) {
    g.adjacency_[cursor[e.u]] = e.v;
    g.weights_[cursor[e.u]++] = e.weight;
  }
  return g;
}

std::span<const NodeId> Graph::neighbors(NodeId i) const {
  check_node(*this, i);
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::span<const double> Graph::neighbor_weights(NodeId i) const {
  check_node(*this, i);
  return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::size_t Graph::degree(NodeId i) const {
  check_node(*this, i);
  return offsets_[i + 1] - offsets_[i];
}

double Graph::weighted_degree(NodeId i) const {
  double s = 0.0;
  for (double w : neighbor_weights(i)) s += w;
  return s;
}

bool Graph::has_edge(NodeId i, NodeId j) const { return weight(i, j).has_value(); }

std::optional<double> Graph::weight(NodeId i, NodeId j) const {
  auto nb = neighbors(i);
  check_node(*this, j);
  auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return std::nullopt;
  return weights_[offsets_[i] + static_cast<std::size_t>(it - nb.begin())];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (adjacency_[k] > i) out.push_back({i, adjacency_[k], weights_[k]});
    }
  }
  return out;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    lap(e.u, e.v) = -e.weight;
    lap(e.v, e.u) = -e.weight;
    lap(e.u, e.u) += e.weight;
    lap(e.v, e.v) += e.weight;
  }
  return lap;
}

Eigen::SparseMatrix<double> sparse_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * g.num_edges());
  for (const Edge& e : g.edges()) {
    triplets.emplace_back(e.u, e.v, -e.weight);
    triplets.emplace_back(e.v, e.u, -e.weight);
    triplets.emplace_back(e.u, e.u, e.weight);
    triplets.emplace_back(e.v, e.v, e.weight);
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

std::vector<std::size_t> connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(n, kUnset);
  std::queue<NodeId> frontier;
  for (NodeId root = 0; root < n; ++root) {
    if (comp[root] != kUnset) continue;
    comp[root] = root;
    frontier.push(root);
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == kUnset) {
          comp[v] = root;
          frontier.push(v);
        }
      }
    }
  }
  return comp;
}

bool is_connected(const Graph& g) {
  auto comp = connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](std::size_t c) { return c == 0; });
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  constexpr auto kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> relabel(g.num_nodes(), kAbsent);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    check_node(g, nodes[k]);
    relabel[nodes[k]] = static_cast<NodeId>(k);
  }
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (relabel[e.u] != kAbsent && relabel[e.v] != kAbsent) {
      kept.push_back({relabel[e.u], relabel[e.v], e.weight});
    }
  }
  return Graph::from_edges(nodes.size(), kept);
}

Graph assign_random_weights(const Graph& g, Rng& rng, double low, double high) {
  if (!(low > 0.0) || !(low <= high) || !std::isfinite(high)) {
    throw Error(Errc::InvalidRange, "weight range must satisfy 0 < low <= high");
  }
  std::uniform_real_distribution<double> dist(low, high);
  auto edges = g.edges();
  for (Edge& e : edges) {
    // uniform_real_distribution samples [low, high); low == high collapses
    // to the single admissible value.
    e.weight = low == high ? low : dist(rng);
  }
  return Graph::from_edges(g.num_nodes(), edges);
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  s.degrees.resize(g.num_nodes());
  std::size_t total = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    s.degrees[i] = g.degree(i);
    total += s.degrees[i];
    s.max = std::max(s.max, s.degrees[i]);
  }
  s.average = g.num_nodes() == 0 ? 0.0
                                 : static_cast<double>(total) /
                                       static_cast<double>(g.num_nodes());
  return s;
}

std::size_t triangles_at(const Graph& g, NodeId i) {
  auto nb = g.neighbors(i);
  std::size_t twice = 0;
  for (NodeId j : nb) twice += sorted_intersection_size(nb, g.neighbors(j));
  return twice / 2;
}

std::size_t triangle_count(const Graph& g) {
  std::size_t total = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) total += triangles_at(g, i);
  return total / 3;
}

double local_clustering(const Graph& g, NodeId i) {
  const std::size_t d = g.degree(i);
  if (d < 2) return 0.0;
  return 2.0 * static_cast<double>(triangles_at(g, i)) /
         (static_cast<double>(d) * static_cast<double>(d - 1));
}

ClusteringReport global_clustering(const Graph& g) {
  ClusteringReport r;
  const std::size_t n = g.num_nodes();
  r.local.resize(n);
  r.triangles_per_node.resize(n);
  double sum = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    r.triangles_per_node[i] = triangles_at(g, i);
    const std::size_t d = g.degree(i);
    r.local[i] = d < 2 ? 0.0
                       : 2.0 * static_cast<double>(r.triangles_per_node[i]) /
                             (static_cast<double>(d) * static_cast<double>(d - 1));
    sum += r.local[i];
  }
  r.global = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return r;
}

double predicted_c_ba(std::size_t n, std::size_t links) {
  if (n < 2 || links < 1) {
    throw Error(Errc::PreconditionViolated, "predicted_c_ba requires n > 1 and L >= 1");
  }
  const double log_n = std::log(static_cast<double>(n));
  return (static_cast<double>(links) - 1.0) / 8.0 * log_n * log_n /
         static_cast<double>(n);
}

double predicted_c_hk(std::size_t n, std::size_t links, std::size_t triad_links,
                      double average_degree) {
  if (!(average_degree > 0.0) ||
      !(static_cast<double>(triad_links) < average_degree / 2.0)) {
    throw Error(Errc::PreconditionViolated, "predicted_c_hk requires 0 <= L2 < d/2");
  }
  return 2.0 * static_cast<double>(triad_links) / average_degree +
         predicted_c_ba(n, links);
}

std::map<std::size_t, std::size_t> degree_histogram(const Graph& g) {
  if (g.num_nodes() == 0) throw Error(Errc::EmptyGraph, "degree histogram of empty graph");
  std::map<std::size_t, std::size_t> hist;
  for (NodeId i = 0; i < g.num_nodes(); ++i) ++hist[g.degree(i)];
  return hist;
}

double powerlaw_tail_slope(const std::map<std::size_t, std::size_t>& histogram,
                           std::size_t min_degree) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto [degree, count] : histogram) {
    if (degree == 0 || degree < min_degree || count == 0) continue;
    xs.push_back(std::log(static_cast<double>(degree)));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  if (xs.size() < 3) {
    throw Error(Errc::InsufficientData, "fewer than 3 distinct tail degrees");
  }
  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace clustopt
