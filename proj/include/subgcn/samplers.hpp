#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subgcn/alias_table.hpp"
#include "subgcn/graph.hpp"
#include "subgcn/rng.hpp"

namespace subgcn {

enum class SamplerKind : std::uint8_t {
  Node = 0,
  Edge = 1,             // m edges with replacement (approximate edge sampler)
  EdgeIndependent = 2,  // one Bernoulli trial per edge
  RandomWalk = 3,
  MultiRandomWalk = 4,
  Full = 5,             // whole graph every time; full-batch baseline
};

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::Edge;
  std::uint32_t node_budget = 0;  // n: Node, MultiRandomWalk
  std::uint32_t edge_budget = 0;  // m: Edge, EdgeIndependent
  std::uint32_t roots = 0;        // r: RandomWalk, MultiRandomWalk
  std::uint32_t walk_length = 0;  // h: RandomWalk
  std::uint64_t seed = 0;
  // Edge samplers only: induce on the endpoint set (default) or keep just
  // the drawn edges.
  bool induce = true;

  /// Throws std::invalid_argument when the budgets do not fit `kind`.
  void validate() const;

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

/// Node distribution P(u) proportional to ||column u of D^-1 A||^2.
struct NodeWeights {
  std::vector<double> weights;
  std::vector<double> cumulative;
  double total = 0.0;

  double probability(NodeId v) const { return weights[v] / total; }
};

/// Edge distribution P(e) proportional to 1/deg(u) + 1/deg(v). Self-loops
/// carry weight 0: they are never drawn and ride along with their node.
struct EdgeWeights {
  std::vector<double> weights;
  std::vector<double> cumulative;
  double total = 0.0;

  double probability(EdgeId e) const { return weights[e] / total; }
};

NodeWeights node_weights(const Graph& g);
EdgeWeights edge_weights(const Graph& g);

/// Inclusion probabilities of the independent edge sampler:
/// p_e = min(1, m * w_e / sum(w)).
std::vector<double> independent_edge_probs(const EdgeWeights& w, double edge_budget);

Subgraph sample_node(const Graph& g, std::uint32_t n, Rng& rng);
Subgraph sample_edge_approx(const Graph& g, std::uint32_t m, Rng& rng, bool induce = true);

struct IndependentEdgeSample {
  Subgraph subgraph;
  std::vector<std::uint8_t> mask;  // per undirected edge: 1 if selected
};
IndependentEdgeSample sample_edge_independent(const Graph& g, std::uint32_t m, Rng& rng,
                                              bool induce = true);

Subgraph sample_rw(const Graph& g, std::uint32_t roots, std::uint32_t walk_length, Rng& rng);
Subgraph sample_mrw(const Graph& g, std::uint32_t n, std::uint32_t roots, Rng& rng);

/*
  A sampler bound to one graph and configuration. Distribution tables are
  built once; sample(i) draws instance i from the stream (seed, i), so the
  same index always yields the same subgraph no matter which thread asks.
  Safe for concurrent use.
*/
class Sampler {
 public:
  Sampler(const Graph& g, SamplerConfig config);

  const Graph& graph() const { return *graph_; }
  const SamplerConfig& config() const { return config_; }

  Subgraph sample(std::uint64_t instance) const;
  Subgraph sample(Rng& rng) const;
  /// Independent edge sampler only; exposes the inclusion mask.
  IndependentEdgeSample sample_independent(Rng& rng) const;

 private:
  const Graph* graph_;
  SamplerConfig config_;
  AliasTable node_table_;
  AliasTable edge_table_;
  std::vector<double> edge_probs_;
};

}  // namespace subgcn
