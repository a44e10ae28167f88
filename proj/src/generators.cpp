#include "clustopt/generators.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "clustopt/error.hpp"

namespace clustopt {

namespace {

std::size_t pick(Rng& rng, std::size_t size) {
  return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
}

// Shared growth loop for the BA and HK generators.
Graph grow(std::size_t n, std::size_t links, std::size_t triad_links,
           std::size_t seed_size, Rng& rng) {
  if (seed_size == 0) seed_size = links;
  if (links < 1 || seed_size < links || n < seed_size) {
    throw Error(Errc::InvalidParams,
                "generator requires 1 <= L <= seed_size <= n (L=" +
                    std::to_string(links) + ", seed_size=" +
                    std::to_string(seed_size) + ", n=" + std::to_string(n) + ")");
  }
  if (triad_links >= links) {
    throw Error(Errc::InvalidParams, "generator requires L2 < L");
  }

  std::vector<std::vector<NodeId>> adj(n);
  // Node v appears deg(v) times, so a uniform index is a degree-weighted draw.
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * (seed_size * (seed_size - 1) / 2 + (n - seed_size) * links));
  std::vector<Edge> edges;
  edges.reserve(endpoints.capacity() / 2);

  auto connect = [&](NodeId u, NodeId v) {
    adj[u].push_back(v);
    adj[v].push_back(u);
    edges.push_back({std::min(u, v), std::max(u, v), 1.0});
  };

  for (NodeId i = 0; i < seed_size; ++i) {
    for (NodeId j = i + 1; j < seed_size; ++j) {
      connect(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }

  const std::size_t preferential = links - triad_links;
  // linked[u] == v + 1 marks u as already attached to the node v being added.
  std::vector<std::size_t> linked(n, 0);
  std::vector<NodeId> targets;
  std::vector<NodeId> eligible;

  for (auto v = static_cast<NodeId>(seed_size); v < n; ++v) {
    const std::size_t frozen = endpoints.size();
    targets.clear();

    auto attach = [&](NodeId u) {
      connect(v, u);
      linked[u] = v + 1;
      targets.push_back(u);
    };
    auto draw_preferential = [&]() -> NodeId {
      for (;;) {
        NodeId u = frozen == 0 ? static_cast<NodeId>(pick(rng, v))
                               : endpoints[pick(rng, frozen)];
        if (linked[u] != v + 1) return u;
      }
    };

    for (std::size_t k = 0; k < preferential; ++k) {
      const NodeId anchor = draw_preferential();
      attach(anchor);
      // Round-robin share of the triad links: the first (triad_links mod
      // preferential) anchors take one extra.
      const std::size_t triads =
          triad_links / preferential + (k < triad_links % preferential ? 1 : 0);
      for (std::size_t t = 0; t < triads; ++t) {
        eligible.clear();
        for (NodeId w : adj[anchor]) {
          if (w != v && linked[w] != v + 1) eligible.push_back(w);
        }
        attach(eligible.empty() ? draw_preferential() : eligible[pick(rng, eligible.size())]);
      }
    }

    for (NodeId u : targets) {
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Mutable topology with incrementally maintained triangle counts.
class SwapState {
 public:
  explicit SwapState(const Graph& g) : adj_(g.num_nodes()), triangles_(g.num_nodes(), 0) {
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      auto nb = g.neighbors(i);
      adj_[i].assign(nb.begin(), nb.end());
    }
    edges_ = g.edges();
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      index_[edge_key(edges_[k].u, edges_[k].v)] = k;
    }
    auto report = global_clustering(g);
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      triangles_[i] = static_cast<std::int64_t>(report.triangles_per_node[i]);
    }
    local_ = report.local;
    for (double c : local_) local_sum_ += c;
  }

  std::size_t num_nodes() const { return adj_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[u]; }
  double clustering() const {
    return adj_.empty() ? 0.0 : local_sum_ / static_cast<double>(adj_.size());
  }

  bool adjacent(NodeId u, NodeId v) const {
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

  std::size_t edge_index(NodeId u, NodeId v) const { return index_.at(edge_key(u, v)); }

  // Replaces edges (a,b) and (c,d) by (a,c) and (b,d). Returns the change in
  // global triangle count. Caller guarantees a simple result.
  std::int64_t swap(NodeId a, NodeId b, NodeId c, NodeId d) {
    const std::size_t first = edge_index(a, b);
    const std::size_t second = edge_index(c, d);
    std::int64_t delta = 0;
    delta -= toggle(a, b, false);
    delta -= toggle(c, d, false);
    delta += toggle(a, c, true);
    delta += toggle(b, d, true);
    index_.erase(edge_key(a, b));
    index_.erase(edge_key(c, d));
    edges_[first] = {std::min(a, c), std::max(a, c), edges_[first].weight};
    edges_[second] = {std::min(b, d), std::max(b, d), edges_[second].weight};
    index_[edge_key(a, c)] = first;
    index_[edge_key(b, d)] = second;
    return delta;
  }

  // Recomputes the cached local clustering of nodes touched since the last
  // call. Only valid when every degree is back to its original value.
  void refresh_touched() {
    for (NodeId x : touched_) {
      const std::size_t deg = adj_[x].size();
      const double c = deg < 2 ? 0.0
                               : 2.0 * static_cast<double>(triangles_[x]) /
                                     (static_cast<double>(deg) * static_cast<double>(deg - 1));
      local_sum_ += c - local_[x];
      local_[x] = c;
    }
    touched_.clear();
  }

  void forget_touched() { touched_.clear(); }

  bool connected() const {
    if (adj_.empty()) return true;
    std::vector<char> seen(adj_.size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : adj_[u]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == adj_.size();
  }

  Graph to_graph() const { return Graph::from_edges(adj_.size(), edges_); }

 private:
  // Adds or removes (u,v); returns the number of triangles through that edge.
  std::int64_t toggle(NodeId u, NodeId v, bool add) {
    common_.clear();
    std::set_intersection(adj_[u].begin(), adj_[u].end(), adj_[v].begin(), adj_[v].end(),
                          std::back_inserter(common_));
    const auto count = static_cast<std::int64_t>(common_.size());
    const std::int64_t sign = add ? 1 : -1;
    for (NodeId w : common_) {
      triangles_[w] += sign;
      touched_.push_back(w);
    }
    triangles_[u] += sign * count;
    triangles_[v] += sign * count;
    touched_.push_back(u);
    touched_.push_back(v);
    if (add) {
      adj_[u].insert(std::lower_bound(adj_[u].begin(), adj_[u].end(), v), v);
      adj_[v].insert(std::lower_bound(adj_[v].begin(), adj_[v].end(), u), u);
    } else {
      adj_[u].erase(std::lower_bound(adj_[u].begin(), adj_[u].end(), v));
      adj_[v].erase(std::lower_bound(adj_[v].begin(), adj_[v].end(), u));
    }
    return count;
  }

  std::vector<std::vector<NodeId>> adj_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<std::int64_t> triangles_;
  std::vector<double> local_;
  double local_sum_ = 0.0;
  std::vector<NodeId> touched_;
  std::vector<NodeId> common_;
};

struct Proposal {
  NodeId a, b, c, d;  // remove (a,b),(c,d); add (a,c),(b,d)
};

bool admissible(const SwapState& s, const Proposal& p) {
  if (p.a == p.b || p.a == p.c || p.a == p.d || p.b == p.c || p.b == p.d || p.c == p.d) {
    return false;
  }
  return !s.adjacent(p.a, p.c) && !s.adjacent(p.b, p.d);
}

// Uniform pair of edges with a random orientation.
Proposal propose_uniform(const SwapState& s, Rng& rng) {
  const auto& edges = s.edges();
  const Edge& e1 = edges[pick(rng, edges.size())];
  const Edge& e2 = edges[pick(rng, edges.size())];
  NodeId a = e1.u, b = e1.v, c = e2.u, d = e2.v;
  if (pick(rng, 2) == 1) std::swap(a, b);
  if (pick(rng, 2) == 1) std::swap(c, d);
  return {a, b, c, d};
}

// Second edge starts two hops from `a`, so the new (a,c) link closes at
// least one triangle.
Proposal propose_closing(const SwapState& s, Rng& rng) {
  const auto& edges = s.edges();
  const Edge& e1 = edges[pick(rng, edges.size())];
  NodeId a = e1.u, b = e1.v;
  if (pick(rng, 2) == 1) std::swap(a, b);
  const auto& na = s.neighbors(a);
  const NodeId w = na[pick(rng, na.size())];
  const auto& nw = s.neighbors(w);
  const NodeId c = nw[pick(rng, nw.size())];
  const auto& nc = s.neighbors(c);
  const NodeId d = nc[pick(rng, nc.size())];
  return {a, b, c, d};
}

// Tries p; keeps it only on a strict triangle gain.
bool try_swap(SwapState& s, const Proposal& p) {
  if (!admissible(s, p)) return false;
  if (s.swap(p.a, p.b, p.c, p.d) > 0) {
    s.refresh_touched();
    return true;
  }
  // (a,c),(b,d) -> (a,b),(c,d) is the swap (a,c,b,d) in this parametrization.
  s.swap(p.a, p.c, p.b, p.d);
  s.forget_touched();
  return false;
}

bool exhaustive_search(SwapState& s) {
  const std::size_t m = s.edges().size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const Edge e1 = s.edges()[i];
      const Edge e2 = s.edges()[j];
      for (int orient = 0; orient < 2; ++orient) {
        Proposal p = orient == 0 ? Proposal{e1.u, e1.v, e2.u, e2.v}
                                 : Proposal{e1.u, e1.v, e2.v, e2.u};
        if (try_swap(s, p)) return true;
      }
    }
  }
  return false;
}

constexpr std::size_t kExhaustiveEdgeLimit = 400;

}  // namespace

Graph generate_ba(const BaParams& p, Rng& rng) {
  return grow(p.n, p.links, 0, p.seed_size, rng);
}

Graph generate_hk(const HkParams& p, Rng& rng) {
  return grow(p.n, p.links, p.triad_links, p.seed_size, rng);
}

std::pair<Graph, RewireReport> rewire_increase_clustering(const Graph& g,
                                                          const RewireParams& p,
                                                          Rng& rng) {
  if (!is_connected(g)) {
    throw Error(Errc::Disconnected, "rewiring requires a connected graph");
  }
  if (p.connectivity_check_interval == 0) {
    throw Error(Errc::InvalidParams, "connectivity_check_interval must be positive");
  }

  SwapState state(g);
  RewireReport report;
  report.initial_c = state.clustering();
  report.final_c = report.initial_c;
  report.reached_target = report.initial_c >= p.target_clustering;
  if (report.reached_target || p.max_swaps == 0 || g.num_edges() < 2) {
    report.exhausted = !report.reached_target && g.num_edges() < 2;
    return {g, report};
  }

  const std::size_t m = g.num_edges();
  const std::size_t stall_limit = m <= kExhaustiveEdgeLimit ? 1000 : 50 * m;

  SwapState snapshot = state;
  std::size_t snapshot_accepted = 0;
  std::size_t since_check = 0;
  std::size_t stall = 0;

  // Returns false when the state had to be rolled back.
  auto verify_connected = [&]() {
    since_check = 0;
    if (state.connected()) {
      snapshot = state;
      snapshot_accepted = report.swaps_accepted;
      return true;
    }
    state = snapshot;
    report.swaps_accepted = snapshot_accepted;
    return false;
  };

  while (report.swaps_attempted < p.max_swaps) {
    ++report.swaps_attempted;
    const Proposal proposal =
        pick(rng, 2) == 0 ? propose_uniform(state, rng) : propose_closing(state, rng);
    bool accepted = try_swap(state, proposal);
    if (!accepted && ++stall >= stall_limit) {
      if (m > kExhaustiveEdgeLimit || !exhaustive_search(state)) {
        report.exhausted = true;
        break;
      }
      accepted = true;
    }
    if (!accepted) continue;

    stall = 0;
    ++report.swaps_accepted;
    ++since_check;
    if (since_check >= p.connectivity_check_interval) verify_connected();
    if (state.clustering() >= p.target_clustering && verify_connected()) break;
  }
  if (since_check > 0) verify_connected();

  Graph out = state.to_graph();
  report.final_c = global_clustering(out).global;
  report.reached_target = report.final_c >= p.target_clustering;
  return {std::move(out), report};
}

}  // namespace clustopt
