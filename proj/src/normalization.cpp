#include "subgcn/normalization.hpp"

#include <stdexcept>

#include "subgcn/producer.hpp"

namespace subgcn {

CoeffCounter::CoeffCounter(const Graph& g)
    : graph_(&g), node_counts_(g.num_nodes(), 0), edge_counts_(g.num_edges(), 0) {}

void CoeffCounter::add(const Subgraph& s) {
  ++subgraphs_;
  for (NodeId v : s.nodes) ++node_counts_[v];
  // Both arcs of an edge appear in an induced subgraph; count the edge once
  // from the arc whose source is the smaller endpoint (loops have one arc).
  const auto arc_edge = graph_->arc_edge();
  const auto edges = graph_->edges();
  for (std::size_t i = 0; i < s.num_nodes(); ++i) {
    const NodeId v = s.nodes[i];
    for (ArcId k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k) {
      const EdgeId e = arc_edge[s.arc_origin[k]];
      if (edges[e].u == v) ++edge_counts_[e];
    }
  }
}

void CoeffCounter::merge(const CoeffCounter& other) {
  if (other.graph_ != graph_) throw std::invalid_argument("cannot merge counters of different graphs");
  for (std::size_t i = 0; i < node_counts_.size(); ++i) node_counts_[i] += other.node_counts_[i];
  for (std::size_t i = 0; i < edge_counts_.size(); ++i) edge_counts_[i] += other.edge_counts_[i];
  subgraphs_ += other.subgraphs_;
}

NormCoeffs CoeffCounter::finalize() const {
  if (subgraphs_ == 0) throw std::logic_error("no subgraphs counted");
  const Graph& g = *graph_;
  NormCoeffs c;
  c.source = CoeffSource::Empirical;
  c.num_subgraphs = subgraphs_;
  c.node_counts = node_counts_;
  c.edge_counts = edge_counts_;

  c.lambda.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    c.lambda[v] = static_cast<double>(node_counts_[v]) / static_cast<double>(subgraphs_);
  }

  const auto arc_edge = g.arc_edge();
  c.alpha.resize(g.num_arcs());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto cv = static_cast<double>(node_counts_[v]);
    for (ArcId a = g.arc_begin(v); a < g.arc_end(v); ++a) {
      const auto cuv = static_cast<double>(edge_counts_[arc_edge[a]]);
      c.alpha[a] = cuv > 0.0 ? cuv / cv : (cuv + 1.0) / (cv + 1.0);
    }
  }
  return c;
}

CoeffEstimate estimate_coeffs(const Graph& g, const SamplerConfig& cfg, std::uint64_t num_subgraphs,
                              std::size_t threads) {
  if (num_subgraphs == 0) throw std::invalid_argument("N must be at least 1");
  const Sampler sampler(g, cfg);
  CoeffEstimate out;
  out.cache = sample_many(sampler, 0, num_subgraphs, threads);
  CoeffCounter counter(g);
  for (const Subgraph& s : out.cache) counter.add(s);
  out.coeffs = counter.finalize();
  return out;
}

CoeffEstimate estimate_coeffs_by_coverage(const Graph& g, const SamplerConfig& cfg, double coverage,
                                          std::size_t threads) {
  if (!(coverage > 0.0)) throw std::invalid_argument("coverage must be positive");
  const Sampler sampler(g, cfg);
  CoeffEstimate out;
  CoeffCounter counter(g);
  const double target = coverage * static_cast<double>(g.num_nodes());
  double drawn_nodes = 0.0;
  {
    SubgraphProducer producer(sampler, threads, threads == 0 ? 1 : 4 * threads);
    do {
      Subgraph s = producer.next();
      drawn_nodes += static_cast<double>(s.num_nodes());
      counter.add(s);
      out.cache.push_back(std::move(s));
      if (cfg.kind == SamplerKind::Full) break;
      if (out.cache.size() > 1000000) {
        throw std::invalid_argument("sampler yields (nearly) empty subgraphs; coverage unreachable");
      }
    } while (drawn_nodes < target);
  }
  out.coeffs = counter.finalize();
  return out;
}

NormCoeffs analytic_coeffs_edge(const Graph& g, double edge_budget) {
  if (!(edge_budget > 0.0)) throw std::invalid_argument("edge budget m must be positive");
  const std::vector<double> p_edge = independent_edge_probs(edge_weights(g), edge_budget);
  const auto edges = g.edges();
  const auto arc_edge = g.arc_edge();

  std::vector<double> p_node(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    double miss = 1.0;
    for (ArcId a = g.arc_begin(v); a < g.arc_end(v); ++a) {
      const Edge& e = edges[arc_edge[a]];
      if (e.u != e.v) miss *= 1.0 - p_edge[arc_edge[a]];
    }
    p_node[v] = 1.0 - miss;
  }

  NormCoeffs c;
  c.source = CoeffSource::Analytic;
  c.lambda.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    c.lambda[v] = static_cast<double>(g.num_nodes()) * p_node[v];
  }
  c.alpha.resize(g.num_arcs());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (ArcId a = g.arc_begin(v); a < g.arc_end(v); ++a) {
      const Edge& e = edges[arc_edge[a]];
      // A loop is present whenever its node is.
      c.alpha[a] = e.u == e.v ? 1.0 : p_edge[arc_edge[a]] / p_node[v];
    }
  }
  return c;
}

double normalized_arc_value(const Graph& g, const NormCoeffs& coeffs, ArcId arc) {
  if (arc >= g.num_arcs() || arc >= coeffs.alpha.size()) throw std::out_of_range("arc index out of range");
  return g.norm_values()[arc] / coeffs.alpha[arc];
}

}  // namespace subgcn
