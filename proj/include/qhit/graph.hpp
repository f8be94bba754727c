#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qhit/error.hpp"

namespace qhit {

using NodeId = std::size_t;

/// Integer position on the doubled honeycomb lattice. Physical position is
/// (x * s / 2, y * sqrt(3) * s / 2) for edge length s.
struct Coord {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// Undirected edge, stored with a < b.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Family { Hexagonal, GluedTree, Hypercube, Path };

enum class Gluing { Identity, RandomCycle };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Hexagonal: return "hexagonal";
    case Family::GluedTree: return "glued-tree";
    case Family::Hypercube: return "hypercube";
    case Family::Path: return "path";
  }
  return "unknown";
}

/// Immutable simple graph with designated entry and exit nodes.
class Graph {
 public:
  Graph(Family family, std::vector<Coord> coords, std::vector<Edge> edges, NodeId entry, NodeId exit)
      : family_(family), coords_(std::move(coords)), edges_(std::move(edges)), entry_(entry), exit_(exit) {
    const std::size_t n = coords_.size();
    require(n >= 1, ErrorKind::InvalidParameter, "graph must have at least one node");
    require(entry_ < n && exit_ < n, ErrorKind::InvalidParameter, "entry/exit out of range");
    require(n < 2 || entry_ != exit_, ErrorKind::InvalidParameter, "entry and exit must differ");
    for (auto& e : edges_) {
      require(e.a != e.b, ErrorKind::InvalidParameter, "self-loop");
      require(e.a < n && e.b < n, ErrorKind::InvalidParameter, "edge references unknown node");
      if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges_.begin(), edges_.end());
    require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(), ErrorKind::InvalidParameter,
            "duplicate edge");
    adjacency_.resize(n);
    for (const auto& e : edges_) {
      adjacency_[e.a].push_back(e.b);
      adjacency_[e.b].push_back(e.a);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  }

  Family family() const noexcept { return family_; }
  std::size_t size() const noexcept { return coords_.size(); }
  const std::vector<Coord>& coords() const noexcept { return coords_; }
  const Coord& coord(NodeId i) const { return coords_.at(i); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  NodeId entry() const noexcept { return entry_; }
  NodeId exit() const noexcept { return exit_; }
  const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_.at(i); }
  std::size_t degree(NodeId i) const { return adjacency_.at(i).size(); }

  std::size_t max_degree() const {
    std::size_t m = 0;
    for (const auto& nb : adjacency_) m = std::max(m, nb.size());
    return m;
  }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& nb = adjacency_.at(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  /// BFS 2-colouring; empty when the graph is not bipartite.
  std::vector<int> two_coloring() const {
    std::vector<int> color(size(), -1);
    for (NodeId s = 0; s < size(); ++s) {
      if (color[s] >= 0) continue;
      color[s] = 0;
      std::queue<NodeId> q;
      q.push(s);
      while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adjacency_[u]) {
          if (color[v] < 0) {
            color[v] = 1 - color[u];
            q.push(v);
          } else if (color[v] == color[u]) {
            return {};
          }
        }
      }
    }
    return color;
  }

  bool is_bipartite() const { return !two_coloring().empty(); }

  bool is_connected() const {
    std::vector<char> seen(size(), 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId v : adjacency_[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          q.push(v);
        }
      }
    }
    return count == size();
  }

 private:
  Family family_;
  std::vector<Coord> coords_;
  std::vector<Edge> edges_;
  NodeId entry_;
  NodeId exit_;
  std::vector<std::vector<NodeId>> adjacency_;
};

namespace detail {

// Relabels coordinate-keyed edges to ids ordered by (x, y).
inline Graph from_coordinate_edges(Family family, const std::vector<std::pair<Coord, Coord>>& coord_edges,
                                   std::vector<Coord> extra_nodes = {}) {
  std::vector<Coord> nodes = std::move(extra_nodes);
  for (const auto& [a, b] : coord_edges) {
    nodes.push_back(a);
    nodes.push_back(b);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto id_of = [&](const Coord& c) {
    return static_cast<NodeId>(std::lower_bound(nodes.begin(), nodes.end(), c) - nodes.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(coord_edges.size());
  for (const auto& [a, b] : coord_edges) {
    NodeId ia = id_of(a), ib = id_of(b);
    edges.push_back({std::min(ia, ib), std::max(ia, ib)});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  // Min x and max x are unique for every family built this way.
  return Graph(family, nodes, std::move(edges), 0, nodes.size() - 1);
}

// Uniform integer in [0, bound) from the raw mt19937_64 stream; portable across
// standard libraries, unlike std::uniform_int_distribution.
inline std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded_draw(gen, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detail

/// Diamond polyhex with hexagon column heights 1, 2, ..., n, ..., 2, 1.
/// Has 2n^2 + 4n nodes and 3n^2 + 4n - 1 edges.
inline Graph hexagonal_graph(int n) {
  require(n >= 1, ErrorKind::InvalidParameter, "hexagonal layer depth must be >= 1");
  std::vector<std::pair<Coord, Coord>> coord_edges;
  for (int c = 0; c <= 2 * n - 2; ++c) {
    const int h = n - std::abs(c - (n - 1));
    for (int j = 0; j < h; ++j) {
      const int cx = 3 * c;
      const int cy = 2 * j - (h - 1);
      const Coord ring[6] = {{cx + 2, cy},     {cx + 1, cy + 1}, {cx - 1, cy + 1},
                             {cx - 2, cy},     {cx - 1, cy - 1}, {cx + 1, cy - 1}};
      for (int k = 0; k < 6; ++k) {
        Coord a = ring[k], b = ring[(k + 1) % 6];
        if (b < a) std::swap(a, b);
        coord_edges.emplace_back(a, b);
      }
    }
  }
  std::sort(coord_edges.begin(), coord_edges.end());
  coord_edges.erase(std::unique(coord_edges.begin(), coord_edges.end()), coord_edges.end());
  return detail::from_coordinate_edges(Family::Hexagonal, coord_edges);
}

/// Two complete binary trees of the given depth joined at their leaves.
/// Entry is the left root, exit the right root.
inline Graph glued_tree(int depth, Gluing gluing, std::uint64_t seed) {
  require(depth >= 1, ErrorKind::InvalidParameter, "glued-tree depth must be >= 1");
  require(depth <= 24, ErrorKind::InvalidParameter, "glued-tree depth too large");
  const int right_x = 2 * depth + 1;
  std::vector<std::pair<Coord, Coord>> coord_edges;
  for (int level = 0; level < depth; ++level) {
    for (int i = 0; i < (1 << level); ++i) {
      for (int child : {2 * i, 2 * i + 1}) {
        coord_edges.push_back({{level, i}, {level + 1, child}});
        coord_edges.push_back({{right_x - level - 1, child}, {right_x - level, i}});
      }
    }
  }
  const int leaves = 1 << depth;
  if (gluing == Gluing::Identity) {
    for (int i = 0; i < leaves; ++i) coord_edges.push_back({{depth, i}, {depth + 1, i}});
  } else {
    std::mt19937_64 gen(seed);
    std::vector<int> left(leaves), right(leaves);
    std::iota(left.begin(), left.end(), 0);
    std::iota(right.begin(), right.end(), 0);
    detail::portable_shuffle(left, gen);
    detail::portable_shuffle(right, gen);
    // Cycle L0 - R0 - L1 - R1 - ... - R(k-1) - L0.
    for (int i = 0; i < leaves; ++i) {
      coord_edges.push_back({{depth, left[i]}, {depth + 1, right[i]}});
      coord_edges.push_back({{depth, left[(i + 1) % leaves]}, {depth + 1, right[i]}});
    }
  }
  return detail::from_coordinate_edges(Family::GluedTree, coord_edges);
}

/// Node ids are the bitstrings themselves; coordinates are a layered drawing
/// (Hamming weight, rank within weight) for display only.
inline Graph hypercube_graph(int dimension) {
  require(dimension >= 1, ErrorKind::InvalidParameter, "hypercube dimension must be >= 1");
  require(dimension <= 20, ErrorKind::InvalidParameter, "hypercube dimension too large");
  const std::size_t n = std::size_t{1} << dimension;
  std::vector<Coord> coords(n);
  std::vector<int> rank(dimension + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const int w = std::popcount(v);
    coords[v] = {w, rank[w]++};
  }
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    for (int b = 0; b < dimension; ++b) {
      const std::size_t u = v ^ (std::size_t{1} << b);
      if (v < u) edges.push_back({v, u});
    }
  }
  return Graph(Family::Hypercube, std::move(coords), std::move(edges), 0, n - 1);
}

/// Line of m nodes. The walker launches from the centre node (m - 1) / 2.
inline Graph path_graph(int m) {
  require(m >= 2, ErrorKind::InvalidParameter, "path length must be >= 2");
  std::vector<Coord> coords(m);
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) coords[i] = {i, 0};
  for (int i = 0; i + 1 < m; ++i) edges.push_back({NodeId(i), NodeId(i + 1)});
  return Graph(Family::Path, std::move(coords), std::move(edges), NodeId((m - 1) / 2), NodeId(m - 1));
}

/// Parsed form of a `family:key=value,...` graph selector.
struct GraphSelector {
  Family family = Family::Hexagonal;
  int size = 1;  // n, d or m depending on family
  Gluing gluing = Gluing::RandomCycle;
  std::uint64_t seed = 0;
  bool has_seed = false;

  std::string to_string() const {
    switch (family) {
      case Family::Hexagonal: return "hexagonal:n=" + std::to_string(size);
      case Family::Hypercube: return "hypercube:d=" + std::to_string(size);
      case Family::Path: return "path:m=" + std::to_string(size);
      case Family::GluedTree: {
        std::string s = "glued-tree:d=" + std::to_string(size);
        s += gluing == Gluing::Identity ? ",glue=identity" : ",glue=random";
        if (has_seed) s += ",seed=" + std::to_string(seed);
        return s;
      }
    }
    return {};
  }
};

namespace detail {

inline long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == text.size() && !text.empty(), ErrorKind::InvalidParameter,
          "selector key '" + key + "' expects an integer, got '" + text + "'");
  return v;
}

}  // namespace detail

inline GraphSelector parse_selector(const std::string& text) {
  GraphSelector sel;
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      auto eq = item.find('=');
      require(eq != std::string::npos && eq > 0, ErrorKind::InvalidParameter,
              "malformed selector item '" + item + "'");
      require(kv.emplace(item.substr(0, eq), item.substr(eq + 1)).second, ErrorKind::InvalidParameter,
              "repeated selector key in '" + text + "'");
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  auto take = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    require(it != kv.end(), ErrorKind::InvalidParameter, "selector '" + text + "' is missing '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_size = [&](const std::string& key) {
    long long v = detail::parse_integer(key, take(key));
    require(v >= 0 && v <= 1'000'000, ErrorKind::InvalidParameter, "selector value out of range");
    return static_cast<int>(v);
  };
  if (family == "hexagonal") {
    sel.family = Family::Hexagonal;
    sel.size = take_size("n");
  } else if (family == "hypercube") {
    sel.family = Family::Hypercube;
    sel.size = take_size("d");
  } else if (family == "path") {
    sel.family = Family::Path;
    sel.size = take_size("m");
  } else if (family == "glued-tree") {
    sel.family = Family::GluedTree;
    sel.size = take_size("d");
    if (kv.count("glue")) {
      const std::string g = take("glue");
      if (g == "identity") {
        sel.gluing = Gluing::Identity;
      } else if (g == "random" || g == "random-cycle") {
        sel.gluing = Gluing::RandomCycle;
      } else {
        fail(ErrorKind::InvalidParameter, "unknown gluing mode '" + g + "'");
      }
    }
    if (kv.count("seed")) {
      long long s = detail::parse_integer("seed", take("seed"));
      require(s >= 0, ErrorKind::InvalidParameter, "seed must be non-negative");
      sel.seed = static_cast<std::uint64_t>(s);
      sel.has_seed = true;
    }
  } else {
    fail(ErrorKind::InvalidParameter, "unknown graph family '" + family + "'");
  }
  require(kv.empty(), ErrorKind::InvalidParameter,
          "unexpected selector key '" + (kv.empty() ? std::string() : kv.begin()->first) + "'");
  return sel;
}

/// Builds the selected graph; `default_seed` applies when the selector has none.
inline Graph build_graph(const GraphSelector& sel, std::uint64_t default_seed = 0) {
  switch (sel.family) {
    case Family::Hexagonal: return hexagonal_graph(sel.size);
    case Family::Hypercube: return hypercube_graph(sel.size);
    case Family::Path: return path_graph(sel.size);
    case Family::GluedTree: return glued_tree(sel.size, sel.gluing, sel.has_seed ? sel.seed : default_seed);
  }
  fail(ErrorKind::InvalidParameter, "unknown family");
}

inline void write_nodes_csv(std::ostream& os, const Graph& g) {
  os << "id,X,Y,is_entry,is_exit\n";
  for (NodeId i = 0; i < g.size(); ++i) {
    os << i << ',' << g.coord(i).x << ',' << g.coord(i).y << ',' << (i == g.entry() ? 1 : 0) << ','
       << (i == g.exit() ? 1 : 0) << '\n';
  }
}

inline void write_edges_csv(std::ostream& os, const Graph& g) {
  os << "node_a,node_b\n";
  for (const auto& e : g.edges()) os << e.a << ',' << e.b << '\n';
}

}  // namespace qhit
