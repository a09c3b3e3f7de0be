#include "subgcn/samplers.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace subgcn {

namespace {

Subgraph draw_node(const Graph& g, std::uint32_t n, Rng& rng, const AliasTable& table) {
  std::vector<NodeId> picked(n);
  for (auto& v : picked) v = static_cast<NodeId>(table.sample(rng));
  return induced_subgraph(g, picked);
}

Subgraph endpoints_subgraph(const Graph& g, std::span<const EdgeId> drawn, bool induce) {
  const auto edges = g.edges();
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * drawn.size());
  for (EdgeId e : drawn) {
    endpoints.push_back(edges[e].u);
    endpoints.push_back(edges[e].v);
  }
  if (induce) return induced_subgraph(g, endpoints);
  return edge_subgraph(g, endpoints, drawn);
}

Subgraph draw_edge_approx(const Graph& g, std::uint32_t m, Rng& rng, bool induce,
                          const AliasTable& table) {
  std::vector<EdgeId> drawn(m);
  for (auto& e : drawn) e = table.sample(rng);
  return endpoints_subgraph(g, drawn, induce);
}

IndependentEdgeSample draw_edge_independent(const Graph& g, Rng& rng, bool induce,
                                            const std::vector<double>& probs) {
  IndependentEdgeSample out;
  out.mask.assign(g.num_edges(), 0);
  std::vector<EdgeId> selected;
  for (EdgeId e = 0; e < probs.size(); ++e) {
    if (probs[e] > 0.0 && rng.bernoulli(probs[e])) {
      out.mask[e] = 1;
      selected.push_back(e);
    }
  }
  if (selected.empty()) {
    // Every trial failed: the sample is legitimately empty.
    out.subgraph.row_offsets.push_back(0);
    return out;
  }
  out.subgraph = endpoints_subgraph(g, selected, induce);
  return out;
}

Subgraph draw_rw(const Graph& g, std::uint32_t roots, std::uint32_t walk_length, Rng& rng) {
  std::vector<NodeId> visited;
  visited.reserve(static_cast<std::size_t>(roots) * (walk_length + 1));
  bool truncated = false;
  for (std::uint32_t i = 0; i < roots; ++i) {
    NodeId u = static_cast<NodeId>(rng.below(g.num_nodes()));
    visited.push_back(u);
    for (std::uint32_t step = 0; step < walk_length; ++step) {
      const auto nbrs = g.neighbors(u);
      if (nbrs.empty()) {
        truncated = true;
        break;
      }
      u = nbrs[rng.below(nbrs.size())];
      visited.push_back(u);
    }
  }
  Subgraph s = induced_subgraph(g, visited);
  s.truncated = truncated;
  return s;
}

Subgraph draw_mrw(const Graph& g, std::uint32_t n, std::uint32_t roots, Rng& rng) {
  std::vector<NodeId> frontier(roots);
  for (auto& v : frontier) v = static_cast<NodeId>(rng.below(g.num_nodes()));
  std::vector<NodeId> visited(frontier.begin(), frontier.end());

  std::uint64_t frontier_degree = 0;
  for (NodeId v : frontier) frontier_degree += g.degree(v);

  bool truncated = false;
  for (std::uint32_t i = roots; i < n; ++i) {
    if (frontier_degree == 0) {
      truncated = true;
      break;
    }
    // Slot chosen with probability deg(u) / sum of frontier degrees.
    std::uint64_t target = rng.below(frontier_degree);
    std::size_t slot = 0;
    while (target >= g.degree(frontier[slot])) {
      target -= g.degree(frontier[slot]);
      ++slot;
    }
    const NodeId u = frontier[slot];
    const auto nbrs = g.neighbors(u);
    const NodeId next = nbrs[rng.below(nbrs.size())];
    frontier_degree = frontier_degree - g.degree(u) + g.degree(next);
    frontier[slot] = next;
    visited.push_back(next);
  }
  Subgraph s = induced_subgraph(g, visited);
  s.truncated = truncated;
  return s;
}

void require_positive(std::uint32_t value, const char* what) {
  if (value == 0) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Node: return "node";
    case SamplerKind::Edge: return "edge";
    case SamplerKind::EdgeIndependent: return "edge-indep";
    case SamplerKind::RandomWalk: return "rw";
    case SamplerKind::MultiRandomWalk: return "mrw";
    case SamplerKind::Full: return "full";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto kind : {SamplerKind::Node, SamplerKind::Edge, SamplerKind::EdgeIndependent,
                    SamplerKind::RandomWalk, SamplerKind::MultiRandomWalk, SamplerKind::Full}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown sampler '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
  switch (kind) {
    case SamplerKind::Node:
      require_positive(node_budget, "node budget n");
      break;
    case SamplerKind::Edge:
    case SamplerKind::EdgeIndependent:
      require_positive(edge_budget, "edge budget m");
      break;
    case SamplerKind::RandomWalk:
      require_positive(roots, "root count r");
      require_positive(walk_length, "walk length h");
      break;
    case SamplerKind::MultiRandomWalk:
      require_positive(roots, "root count r");
      if (roots >= node_budget) throw std::invalid_argument("MRW requires r < n");
      break;
    case SamplerKind::Full:
      break;
  }
}

NodeWeights node_weights(const Graph& g) {
  NodeWeights w;
  w.weights.assign(g.num_nodes(), 0.0);
  const auto cols = g.col_indices();
  const auto values = g.norm_values();
  // Column u of D^-1 A collects 1/deg(v) from every arc (v, u).
  for (ArcId a = 0; a < g.num_arcs(); ++a) w.weights[cols[a]] += values[a] * values[a];
  w.cumulative.resize(w.weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) {
    running += w.weights[i];
    w.cumulative[i] = running;
  }
  w.total = running;
  if (w.total <= 0.0) throw std::invalid_argument("node distribution is empty: every node is isolated");
  return w;
}

EdgeWeights edge_weights(const Graph& g) {
  EdgeWeights w;
  const auto edges = g.edges();
  w.weights.resize(edges.size());
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    w.weights[e] = edge.u == edge.v ? 0.0
                                    : 1.0 / static_cast<double>(g.degree(edge.u)) +
                                          1.0 / static_cast<double>(g.degree(edge.v));
  }
  w.cumulative.resize(w.weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) {
    running += w.weights[i];
    w.cumulative[i] = running;
  }
  w.total = running;
  if (w.total <= 0.0) throw std::invalid_argument("edge distribution is empty: graph has no edges");
  return w;
}

std::vector<double> independent_edge_probs(const EdgeWeights& w, double edge_budget) {
  std::vector<double> p(w.weights.size());
  for (std::size_t e = 0; e < p.size(); ++e) {
    p[e] = std::min(1.0, edge_budget * w.weights[e] / w.total);
  }
  return p;
}

Subgraph sample_node(const Graph& g, std::uint32_t n, Rng& rng) {
  require_positive(n, "node budget n");
  const NodeWeights w = node_weights(g);
  return draw_node(g, n, rng, AliasTable(w.weights));
}

Subgraph sample_edge_approx(const Graph& g, std::uint32_t m, Rng& rng, bool induce) {
  require_positive(m, "edge budget m");
  const EdgeWeights w = edge_weights(g);
  return draw_edge_approx(g, m, rng, induce, AliasTable(w.weights));
}

IndependentEdgeSample sample_edge_independent(const Graph& g, std::uint32_t m, Rng& rng,
                                              bool induce) {
  require_positive(m, "edge budget m");
  return draw_edge_independent(g, rng, induce, independent_edge_probs(edge_weights(g), m));
}

Subgraph sample_rw(const Graph& g, std::uint32_t roots, std::uint32_t walk_length, Rng& rng) {
  require_positive(roots, "root count r");
  require_positive(walk_length, "walk length h");
  return draw_rw(g, roots, walk_length, rng);
}

Subgraph sample_mrw(const Graph& g, std::uint32_t n, std::uint32_t roots, Rng& rng) {
  require_positive(roots, "root count r");
  if (roots >= n) throw std::invalid_argument("MRW requires r < n");
  return draw_mrw(g, n, roots, rng);
}

Sampler::Sampler(const Graph& g, SamplerConfig config) : graph_(&g), config_(config) {
  config_.validate();
  switch (config_.kind) {
    case SamplerKind::Node:
      node_table_ = AliasTable(node_weights(g).weights);
      break;
    case SamplerKind::Edge:
      edge_table_ = AliasTable(edge_weights(g).weights);
      break;
    case SamplerKind::EdgeIndependent:
      edge_probs_ = independent_edge_probs(edge_weights(g), config_.edge_budget);
      break;
    default:
      break;
  }
}

Subgraph Sampler::sample(std::uint64_t instance) const {
  Rng rng = Rng::stream(config_.seed, instance);
  return sample(rng);
}

Subgraph Sampler::sample(Rng& rng) const {
  const Graph& g = *graph_;
  switch (config_.kind) {
    case SamplerKind::Node: return draw_node(g, config_.node_budget, rng, node_table_);
    case SamplerKind::Edge:
      return draw_edge_approx(g, config_.edge_budget, rng, config_.induce, edge_table_);
    case SamplerKind::EdgeIndependent:
      return draw_edge_independent(g, rng, config_.induce, edge_probs_).subgraph;
    case SamplerKind::RandomWalk: return draw_rw(g, config_.roots, config_.walk_length, rng);
    case SamplerKind::MultiRandomWalk: return draw_mrw(g, config_.node_budget, config_.roots, rng);
    case SamplerKind::Full: return full_subgraph(g);
  }
  throw std::logic_error("unhandled sampler kind");
}

IndependentEdgeSample Sampler::sample_independent(Rng& rng) const {
  if (config_.kind != SamplerKind::EdgeIndependent) {
    throw std::logic_error("sample_independent requires the independent edge sampler");
  }
  return draw_edge_independent(*graph_, rng, config_.induce, edge_probs_);
}

}  // namespace subgcn
