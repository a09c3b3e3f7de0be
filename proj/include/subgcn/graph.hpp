#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace subgcn {

using NodeId = std::uint32_t;
using ArcId = std::uint64_t;
using EdgeId = std::uint64_t;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/*
  Immutable CSR adjacency of an undirected graph.

  Every undirected edge {u, v} with u != v is stored as the two arcs (u, v)
  and (v, u); a self-loop is stored as a single arc. Columns within a row are
  strictly increasing. norm_values holds the random-walk normalization
  D^-1 A, i.e. 1/deg(v) on every arc of row v.

  Undirected edges are numbered in ascending lexicographic (u <= v) order;
  arc_edge() maps each arc back to its edge.
*/
class Graph {
 public:
  Graph() = default;

  /// Deduplicates and symmetrizes `edges`. With `self_loops`, an arc (v, v)
  /// is added for every node before normalization.
  static Graph build(std::span<const Edge> edges, NodeId num_nodes, bool self_loops = false);

  NodeId num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_arcs() const { return col_indices_.size(); }
  bool has_self_loops() const { return self_loops_; }

  std::span<const ArcId> row_offsets() const { return row_offsets_; }
  std::span<const NodeId> col_indices() const { return col_indices_; }
  std::span<const double> norm_values() const { return norm_values_; }
  std::span<const EdgeId> arc_edge() const { return arc_edge_; }
  std::span<const Edge> edges() const { return edges_; }

  std::uint32_t degree(NodeId v) const {
    return static_cast<std::uint32_t>(row_offsets_[v + 1] - row_offsets_[v]);
  }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {col_indices_.data() + row_offsets_[v], degree(v)};
  }
  ArcId arc_begin(NodeId v) const { return row_offsets_[v]; }
  ArcId arc_end(NodeId v) const { return row_offsets_[v + 1]; }

  /// Index of arc (u, v), found by binary search in row u.
  std::optional<ArcId> arc(NodeId u, NodeId v) const;

  /// Source node of an arc (binary search over row_offsets).
  NodeId arc_source(ArcId a) const;

  /// 64-bit FNV-1a over the CSR arrays.
  std::uint64_t hash() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  NodeId num_nodes_ = 0;
  bool self_loops_ = false;
  std::vector<ArcId> row_offsets_;
  std::vector<NodeId> col_indices_;
  std::vector<double> norm_values_;
  std::vector<EdgeId> arc_edge_;
  std::vector<Edge> edges_;
};

/*
  A node-induced (or edge-selected) sample of a parent Graph.

  nodes are the sorted, unique parent IDs; the local CSR uses positions in
  `nodes` as IDs. arc_origin[k] is the parent arc of local arc k.
  multiplicity[i] counts how often the sampler emitted nodes[i].
*/
struct Subgraph {
  std::vector<NodeId> nodes;
  std::vector<ArcId> row_offsets;
  std::vector<NodeId> col_indices;
  std::vector<ArcId> arc_origin;
  std::vector<std::uint32_t> multiplicity;
  // Set when a walk or frontier hit an isolated node and stopped early.
  bool truncated = false;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_arcs() const { return col_indices.size(); }

  friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

/// Subgraph induced on the distinct IDs of `node_ids` (a multiset).
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> node_ids);

/// Subgraph over the distinct IDs of `node_ids` that keeps only the arcs of
/// the listed undirected edges (plus the self-loops of its nodes). Every
/// selected edge must have both endpoints in `node_ids`.
Subgraph edge_subgraph(const Graph& g, std::span<const NodeId> node_ids,
                       std::span<const EdgeId> selected_edges);

/// The whole graph as a Subgraph with identity node mapping.
Subgraph full_subgraph(const Graph& g);

}  // namespace subgcn
