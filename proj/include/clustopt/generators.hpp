#pragma once

#include <cstddef>

#include "clustopt/graph.hpp"

namespace clustopt {

struct BaParams {
  std::size_t n = 0;
  std::size_t links = 1;      // preferential links per new node
  std::size_t seed_size = 0;  // initial clique; 0 selects seed_size = links
};

struct HkParams {
  std::size_t n = 0;
  std::size_t links = 1;
  std::size_t triad_links = 0;  // of `links`, how many close a triangle
  std::size_t seed_size = 0;
};

struct RewireParams {
  double target_clustering = 1.0;
  std::size_t max_swaps = 100000;  // proposal budget
  std::size_t connectivity_check_interval = 100;
};

struct RewireReport {
  std::size_t swaps_attempted = 0;
  std::size_t swaps_accepted = 0;
  double initial_c = 0.0;
  double final_c = 0.0;
  bool reached_target = false;
  // Set when no further improving swap could be found.
  bool exhausted = false;
};

// Barabasi-Albert growth from a clique on seed_size nodes; every new node
// adds exactly `links` edges to distinct existing nodes drawn proportionally
// to degree. Unit weights.
Graph generate_ba(const BaParams& p, Rng& rng);

// Holme-Kim style growth with a deterministic number of triad-formation links
// per new node. triad_links == 0 consumes the rng exactly like generate_ba.
Graph generate_hk(const HkParams& p, Rng& rng);

// Degree-preserving double-edge swaps accepted only when the global triangle
// count strictly increases. A swapped-in edge inherits the weight of the edge
// it replaces, so the weight multiset is unchanged.
std::pair<Graph, RewireReport> rewire_increase_clustering(const Graph& g,
                                                          const RewireParams& p,
                                                          Rng& rng);

}  // namespace clustopt
