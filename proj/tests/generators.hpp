#pragma once

#include <random>
#include <vector>

#include "qhit/graph.hpp"

namespace qhit::fixtures {

/// Every family instance with at most `max_nodes` nodes (paths thinned out).
inline std::vector<Graph> small_graphs(std::size_t max_nodes) {
  std::vector<Graph> out;
  for (int n = 1; 2 * n * n + 4 * n <= int(max_nodes); ++n) out.push_back(hexagonal_graph(n));
  for (int d = 1; 2 * ((1 << (d + 1)) - 1) <= int(max_nodes); ++d) {
    out.push_back(glued_tree(d, Gluing::Identity, 0));
    out.push_back(glued_tree(d, Gluing::RandomCycle, 7));
  }
  for (int d = 1; (std::size_t(1) << d) <= max_nodes; ++d) out.push_back(hypercube_graph(d));
  for (int m : {2, 3, 4, 5, 8, 13, 21, 30})
    if (std::size_t(m) <= max_nodes) out.push_back(path_graph(m));
  return out;
}

/// A random family member with at most `max_nodes` nodes.
inline Graph random_graph(std::mt19937_64& rng, std::size_t max_nodes) {
  const auto pool = small_graphs(max_nodes);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

}  // namespace qhit::fixtures
