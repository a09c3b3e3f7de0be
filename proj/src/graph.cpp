#include "subgcn/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace subgcn {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

template <typename T>
void fnv_mix(std::uint64_t& h, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    h ^= static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i));
    h *= kFnvPrime;
  }
}

// Per-thread node -> local index map, reset after every use so repeated
// sampling does not pay O(|V|) initialization.
std::vector<std::int64_t>& local_index_scratch(std::size_t n) {
  thread_local std::vector<std::int64_t> scratch;
  if (scratch.size() < n) scratch.resize(n, -1);
  return scratch;
}

std::vector<std::uint8_t>& edge_flag_scratch(std::size_t n) {
  thread_local std::vector<std::uint8_t> scratch;
  if (scratch.size() < n) scratch.resize(n, 0);
  return scratch;
}

void collect_nodes(const Graph& g, std::span<const NodeId> node_ids, Subgraph& s) {
  if (node_ids.empty()) throw std::invalid_argument("subgraph requires a non-empty node set");
  std::vector<NodeId> sorted(node_ids.begin(), node_ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= g.num_nodes()) {
    throw std::out_of_range("node id " + std::to_string(sorted.back()) + " out of range");
  }
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    s.nodes.push_back(sorted[i]);
    s.multiplicity.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
}

// Builds the local CSR keeping parent arcs for which keep(arc, target) holds
// and whose target is in the node set.
template <typename Keep>
void fill_local_csr(const Graph& g, Subgraph& s, Keep keep) {
  auto& local = local_index_scratch(g.num_nodes());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) local[s.nodes[i]] = static_cast<std::int64_t>(i);

  const auto cols = g.col_indices();
  s.row_offsets.reserve(s.nodes.size() + 1);
  s.row_offsets.push_back(0);
  for (NodeId v : s.nodes) {
    for (ArcId a = g.arc_begin(v); a < g.arc_end(v); ++a) {
      const std::int64_t j = local[cols[a]];
      if (j >= 0 && keep(a)) {
        s.col_indices.push_back(static_cast<NodeId>(j));
        s.arc_origin.push_back(a);
      }
    }
    s.row_offsets.push_back(s.col_indices.size());
  }

  for (NodeId v : s.nodes) local[v] = -1;
}

}  // namespace

Graph Graph::build(std::span<const Edge> edges, NodeId num_nodes, bool self_loops) {
  if (num_nodes == 0) throw std::invalid_argument("graph must have at least one node");

  std::vector<Edge> canon;
  canon.reserve(edges.size() + (self_loops ? num_nodes : 0));
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw std::out_of_range("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                              ") references a node outside [0, " + std::to_string(num_nodes) + ")");
    }
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  if (self_loops) {
    for (NodeId v = 0; v < num_nodes; ++v) canon.push_back({v, v});
  }
  std::sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.self_loops_ = self_loops;
  g.edges_ = std::move(canon);

  g.row_offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  for (const Edge& e : g.edges_) {
    g.row_offsets_[e.u + 1]++;
    if (e.u != e.v) g.row_offsets_[e.v + 1]++;
  }
  for (std::size_t i = 1; i < g.row_offsets_.size(); ++i) g.row_offsets_[i] += g.row_offsets_[i - 1];

  // Visiting edges in lexicographic order fills every row in ascending
  // column order: reverse arcs (u < x), then the loop, then forward arcs.
  const std::size_t arcs = g.row_offsets_.back();
  g.col_indices_.resize(arcs);
  g.arc_edge_.resize(arcs);
  std::vector<ArcId> cursor(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const Edge& e = g.edges_[id];
    ArcId a = cursor[e.u]++;
    g.col_indices_[a] = e.v;
    g.arc_edge_[a] = id;
    if (e.u != e.v) {
      a = cursor[e.v]++;
      g.col_indices_[a] = e.u;
      g.arc_edge_[a] = id;
    }
  }

  g.norm_values_.resize(arcs);
  for (NodeId v = 0; v < num_nodes; ++v) {
    const double value = 1.0 / static_cast<double>(g.degree(v));
    for (ArcId a = g.arc_begin(v); a < g.arc_end(v); ++a) g.norm_values_[a] = value;
  }
  return g;
}

std::optional<ArcId> Graph::arc(NodeId u, NodeId v) const {
  const auto row = neighbors(u);
  const auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return std::nullopt;
  return row_offsets_[u] + static_cast<ArcId>(it - row.begin());
}

NodeId Graph::arc_source(ArcId a) const {
  const auto it = std::upper_bound(row_offsets_.begin(), row_offsets_.end(), a);
  return static_cast<NodeId>(it - row_offsets_.begin() - 1);
}

std::uint64_t Graph::hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, num_nodes_);
  for (ArcId o : row_offsets_) fnv_mix(h, o);
  for (NodeId c : col_indices_) fnv_mix(h, c);
  return h;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> node_ids) {
  Subgraph s;
  collect_nodes(g, node_ids, s);
  fill_local_csr(g, s, [](ArcId) { return true; });
  return s;
}

Subgraph edge_subgraph(const Graph& g, std::span<const NodeId> node_ids,
                       std::span<const EdgeId> selected_edges) {
  Subgraph s;
  collect_nodes(g, node_ids, s);

  const auto edges = g.edges();
  for (EdgeId e : selected_edges) {
    if (e >= edges.size()) throw std::out_of_range("edge id out of range");
    if (!std::binary_search(s.nodes.begin(), s.nodes.end(), edges[e].u) ||
        !std::binary_search(s.nodes.begin(), s.nodes.end(), edges[e].v)) {
      throw std::invalid_argument("selected edge has an endpoint outside the node set");
    }
  }

  auto& flag = edge_flag_scratch(edges.size());
  for (EdgeId e : selected_edges) flag[e] = 1;
  const auto arc_edge = g.arc_edge();
  fill_local_csr(g, s, [&](ArcId a) {
    const Edge& e = edges[arc_edge[a]];
    return e.u == e.v || flag[arc_edge[a]] != 0;
  });
  for (EdgeId e : selected_edges) flag[e] = 0;
  return s;
}

Subgraph full_subgraph(const Graph& g) {
  Subgraph s;
  s.nodes.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) s.nodes[v] = v;
  s.multiplicity.assign(g.num_nodes(), 1);
  s.row_offsets.assign(g.row_offsets().begin(), g.row_offsets().end());
  s.col_indices.assign(g.col_indices().begin(), g.col_indices().end());
  s.arc_origin.resize(g.num_arcs());
  for (ArcId a = 0; a < g.num_arcs(); ++a) s.arc_origin[a] = a;
  return s;
}

}  // namespace subgcn
