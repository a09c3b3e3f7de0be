#pragma once

#include <cstdint>
#include <vector>

#include "subgcn/graph.hpp"
#include "subgcn/samplers.hpp"

namespace subgcn {

enum class CoeffSource : std::uint8_t { Empirical = 0, Analytic = 1 };

/*
  Aggregator normalization alpha (per parent arc) and loss normalization
  lambda (per node).

  For the arc stored in row v with column u, alpha is alpha_{u,v}: the
  probability of edge {u,v} given that v is sampled. The subgraph
  propagation value of that arc is norm_value / alpha.

  Empirical: alpha = C_uv / C_v and lambda = C_v / N, from counting N
  sampled subgraphs. Arcs never seen fall back to (C_uv + 1) / (C_v + 1).
  Analytic: alpha = p_uv / p_v and lambda = |V| * p_v. The two lambda
  definitions differ by the constant |V|.
*/
struct NormCoeffs {
  std::vector<double> alpha;
  std::vector<double> lambda;
  std::vector<std::uint64_t> node_counts;  // C_v
  std::vector<std::uint64_t> edge_counts;  // C_uv, one per undirected edge
  std::uint64_t num_subgraphs = 0;         // N
  CoeffSource source = CoeffSource::Empirical;

  friend bool operator==(const NormCoeffs&, const NormCoeffs&) = default;
};

/// Accumulates node and edge appearance counts over sampled subgraphs.
class CoeffCounter {
 public:
  explicit CoeffCounter(const Graph& g);

  void add(const Subgraph& s);
  void merge(const CoeffCounter& other);
  std::uint64_t subgraphs() const { return subgraphs_; }
  NormCoeffs finalize() const;

 private:
  const Graph* graph_;
  std::vector<std::uint64_t> node_counts_;
  std::vector<std::uint64_t> edge_counts_;
  std::uint64_t subgraphs_ = 0;
};

struct CoeffEstimate {
  NormCoeffs coeffs;
  std::vector<Subgraph> cache;  // the N subgraphs, reusable as minibatches
};

/// Runs the sampler N times (instances 0..N-1 of cfg.seed) and counts.
CoeffEstimate estimate_coeffs(const Graph& g, const SamplerConfig& cfg, std::uint64_t num_subgraphs,
                              std::size_t threads = 0);

/// Samples until the drawn subgraphs hold coverage * |V| nodes in total,
/// i.e. N = coverage * |V| / mean |V_s|. The full-graph sampler stops at N = 1.
CoeffEstimate estimate_coeffs_by_coverage(const Graph& g, const SamplerConfig& cfg,
                                          double coverage = 50.0, std::size_t threads = 0);

/// Closed-form coefficients of the independent edge sampler without the
/// induction step: p_e = min(1, m w_e / sum w), p_v = 1 - prod(1 - p_e).
NormCoeffs analytic_coeffs_edge(const Graph& g, double edge_budget);

/// norm_value(arc) / alpha(arc): the propagation weight used in subgraphs.
double normalized_arc_value(const Graph& g, const NormCoeffs& coeffs, ArcId arc);

}  // namespace subgcn
