#pragma once

#include <cstdint>
#include <vector>

#include "subgcn/gcn.hpp"
#include "subgcn/graph.hpp"

namespace subgcn {

/*
  Per-edge aggregation terms for independent edge sampling. For edge
  e = {u, v} and layer l, with x~ = (layer input) * W(l):

    b_e(l) = A~[v][u] * x~_u + A~[u][v] * x~_v

  where A~ = D^-1 A. Self-loops are left out. Row i of every matrix below
  belongs to edge_ids[i].
*/
struct EdgeAggregates {
  std::vector<EdgeId> edge_ids;
  std::vector<Matrix> per_layer;  // |E| x f per layer
  Matrix layer_sum;               // sum over layers
  std::vector<double> norms;      // ||layer_sum row||

  std::size_t num_edges() const { return edge_ids.size(); }
};

/// Terms from a full-graph forward pass of `model`. Every layer must have the
/// same output dimension so that the layer sum is defined.
EdgeAggregates edge_aggregates(const Graph& g, const Matrix& features, const Model& model);

/// Wraps given per-layer terms (edge i gets ID i).
EdgeAggregates aggregates_from_layers(std::vector<Matrix> per_layer);

/// p_i proportional to scores_i with sum(p) = m and p_i <= 1: proportional
/// allocation, with clipped entries fixed at 1 and the remaining budget
/// redistributed until nothing exceeds 1 (or everything is saturated).
std::vector<double> water_fill(const std::vector<double>& scores, double m);

/// Variance-minimizing probabilities: water-filled ||sum_l b_e||.
std::vector<double> optimal_edge_probs(const EdgeAggregates& agg, double m);

/// The sampler's topology-only probabilities for the same edges.
std::vector<double> topology_edge_probs(const Graph& g, const EdgeAggregates& agg, double m);

/// sum_e ||s_e||^2 / p_e - sum_e ||s_e||^2 with s_e = sum_l b_e(l); the total
/// variance of zeta = sum_e (s_e / p_e) 1_e over all dimensions. Infinite if
/// an edge with nonzero s_e has p_e = 0.
double variance_closed_form(const EdgeAggregates& agg, const std::vector<double>& probs);

struct MonteCarloVariance {
  double variance = 0.0;   // sample variance of zeta, summed over dimensions
  double std_error = 0.0;  // standard error of `variance`
  Eigen::RowVectorXd mean; // sample mean of zeta
  std::uint64_t trials = 0;
};

/// Draws zeta `trials` times. Trial blocks use fixed RNG streams of `seed`,
/// so the result does not depend on `threads`.
MonteCarloVariance variance_monte_carlo(const EdgeAggregates& agg, const std::vector<double>& probs,
                                        std::uint64_t trials, std::uint64_t seed, std::size_t threads = 0);
MonteCarloVariance variance_monte_carlo(const Graph& g, const Matrix& features, const Model& model,
                                        const std::vector<double>& probs, std::uint64_t trials,
                                        std::uint64_t seed, std::size_t threads = 0);

/// (1 - (1 - p)^d)^(L - 1): chance that a node of degree d keeps at least
/// one sampled edge in each of L - 1 independent layer samples.
double survival_probability(double p, std::uint32_t degree, std::uint32_t layers);

struct SurvivalEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

/// Picks a random root per trial and samples every edge independently with
/// probability p, once per layer for L - 1 layers; the root survives if
/// each sample keeps at least one of its edges.
SurvivalEstimate simulate_layer_survival(const Graph& g, double p, std::uint32_t layers, std::uint64_t trials,
                                         std::uint64_t seed);

}  // namespace subgcn
