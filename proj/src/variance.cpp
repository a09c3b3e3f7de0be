#include "subgcn/variance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "subgcn/rng.hpp"
#include "subgcn/samplers.hpp"

namespace subgcn {

namespace {

constexpr std::uint64_t kTrialBlock = 1024;

void finish(EdgeAggregates& agg) {
  if (agg.per_layer.empty()) throw std::invalid_argument("aggregates need at least one layer");
  const Matrix& first = agg.per_layer.front();
  agg.layer_sum = Matrix::Zero(first.rows(), first.cols());
  for (const Matrix& b : agg.per_layer) {
    if (b.rows() != first.rows() || b.cols() != first.cols()) {
      throw std::invalid_argument("per-layer aggregates must share one shape");
    }
    agg.layer_sum += b;
  }
  agg.norms.resize(static_cast<std::size_t>(first.rows()));
  for (Eigen::Index i = 0; i < first.rows(); ++i) agg.norms[static_cast<std::size_t>(i)] = agg.layer_sum.row(i).norm();
}

}  // namespace

EdgeAggregates edge_aggregates(const Graph& g, const Matrix& features, const Model& model) {
  const auto dims = model.dims();
  for (std::size_t l = 2; l < dims.size(); ++l) {
    if (dims[l] != dims[1]) throw std::invalid_argument("every layer must have the same output dim to sum over layers");
  }
  const ForwardCache cache = forward(model, full_propagation(g), features);

  EdgeAggregates agg;
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (edges[e].u != edges[e].v) agg.edge_ids.push_back(e);
  }
  const auto rows = static_cast<Eigen::Index>(agg.edge_ids.size());
  const auto norm = g.norm_values();
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const Matrix projected = cache.inputs[l] * model.weights[l];
    Matrix b(rows, projected.cols());
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Edge& e = edges[agg.edge_ids[static_cast<std::size_t>(i)]];
      const double a_vu = norm[*g.arc(e.v, e.u)];  // row v, column u
      const double a_uv = norm[*g.arc(e.u, e.v)];
      b.row(i) = a_vu * projected.row(e.u) + a_uv * projected.row(e.v);
    }
    agg.per_layer.push_back(std::move(b));
  }
  finish(agg);
  return agg;
}

EdgeAggregates aggregates_from_layers(std::vector<Matrix> per_layer) {
  EdgeAggregates agg;
  agg.per_layer = std::move(per_layer);
  finish(agg);
  agg.edge_ids.resize(agg.norms.size());
  std::iota(agg.edge_ids.begin(), agg.edge_ids.end(), EdgeId{0});
  return agg;
}

std::vector<double> water_fill(const std::vector<double>& scores, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("edge budget m must be positive");
  std::vector<double> p(scores.size(), 0.0);
  std::vector<bool> saturated(scores.size(), false);
  double budget = m;
  for (;;) {
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] < 0.0 || !std::isfinite(scores[i])) throw std::invalid_argument("scores must be finite and >= 0");
      if (!saturated[i]) total += scores[i];
    }
    if (total <= 0.0 || budget <= 0.0) break;
    bool clipped = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (saturated[i]) continue;
      p[i] = budget * scores[i] / total;
      if (p[i] >= 1.0) {
        p[i] = 1.0;
        saturated[i] = true;
        budget -= 1.0;
        clipped = true;
      }
    }
    if (!clipped) break;
  }
  return p;
}

std::vector<double> optimal_edge_probs(const EdgeAggregates& agg, double m) {
  if (std::none_of(agg.norms.begin(), agg.norms.end(), [](double x) { return x > 0.0; })) {
    throw std::invalid_argument("all edge aggregates are zero");
  }
  return water_fill(agg.norms, m);
}

std::vector<double> topology_edge_probs(const Graph& g, const EdgeAggregates& agg, double m) {
  const std::vector<double> all = independent_edge_probs(edge_weights(g), m);
  std::vector<double> p;
  p.reserve(agg.edge_ids.size());
  for (EdgeId e : agg.edge_ids) p.push_back(all.at(e));
  return p;
}

double variance_closed_form(const EdgeAggregates& agg, const std::vector<double>& probs) {
  if (probs.size() != agg.num_edges()) throw std::invalid_argument("one probability per edge required");
  double var = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
    const double sq = agg.layer_sum.row(static_cast<Eigen::Index>(i)).squaredNorm();
    if (sq == 0.0) continue;
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    var += sq / p - sq;
  }
  return var;
}

MonteCarloVariance variance_monte_carlo(const EdgeAggregates& agg, const std::vector<double>& probs,
                                        std::uint64_t trials, std::uint64_t seed, std::size_t threads) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (probs.size() != agg.num_edges()) throw std::invalid_argument("one probability per edge required");
  const Eigen::Index dim = agg.layer_sum.cols();
  const std::size_t edges = probs.size();

  // s_e / p_e, or zero for edges that can never be drawn.
  Matrix scaled = Matrix::Zero(static_cast<Eigen::Index>(edges), dim);
  for (std::size_t i = 0; i < edges; ++i) {
    if (probs[i] > 0.0) scaled.row(static_cast<Eigen::Index>(i)) = agg.layer_sum.row(static_cast<Eigen::Index>(i)) / probs[i];
  }

  Matrix zeta = Matrix::Zero(static_cast<Eigen::Index>(trials), dim);
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  auto run_block = [&](std::uint64_t block) {
    Rng rng = Rng::stream(seed, block);
    const std::uint64_t end = std::min(trials, (block + 1) * kTrialBlock);
    for (std::uint64_t t = block * kTrialBlock; t < end; ++t) {
      auto row = zeta.row(static_cast<Eigen::Index>(t));
      for (std::size_t i = 0; i < edges; ++i) {
        if (rng.bernoulli(probs[i])) row += scaled.row(static_cast<Eigen::Index>(i));
      }
    }
  };
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) run_block(b);
      });
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloVariance out;
  out.trials = trials;
  out.mean = zeta.colwise().mean();
  const auto n = static_cast<double>(trials);
  std::vector<double> dev(trials);
  for (std::uint64_t t = 0; t < trials; ++t) dev[t] = (zeta.row(static_cast<Eigen::Index>(t)) - out.mean).squaredNorm();
  double sum = 0.0;
  double comp = 0.0;
  for (double d : dev) {  // Kahan
    const double y = d - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  const double mean_dev = sum / n;
  out.variance = trials > 1 ? sum / (n - 1.0) : 0.0;
  if (trials > 1) {
    double ss = 0.0;
    for (double d : dev) ss += (d - mean_dev) * (d - mean_dev);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

MonteCarloVariance variance_monte_carlo(const Graph& g, const Matrix& features, const Model& model,
                                        const std::vector<double>& probs, std::uint64_t trials,
                                        std::uint64_t seed, std::size_t threads) {
  return variance_monte_carlo(edge_aggregates(g, features, model), probs, trials, seed, threads);
}

double survival_probability(double p, std::uint32_t degree, std::uint32_t layers) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (degree == 0 || layers == 0) throw std::invalid_argument("degree and layer count must be at least 1");
  return std::pow(1.0 - std::pow(1.0 - p, degree), layers - 1);
}

SurvivalEstimate simulate_layer_survival(const Graph& g, double p, std::uint32_t layers, std::uint64_t trials,
                                         std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (layers == 0 || trials == 0) throw std::invalid_argument("layers and trials must be at least 1");
  Rng rng(seed);
  const auto edges = g.edges();
  const auto arc_edge = g.arc_edge();
  std::uint64_t alive = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto root = static_cast<NodeId>(rng.below(g.num_nodes()));
    bool survived = true;
    // Edges away from the root do not affect it, so only its own are drawn.
    for (std::uint32_t l = 1; l < layers && survived; ++l) {
      bool kept = false;
      for (ArcId a = g.arc_begin(root); a < g.arc_end(root); ++a) {
        const Edge& e = edges[arc_edge[a]];
        if (e.u == e.v) continue;
        kept = rng.bernoulli(p) || kept;
      }
      survived = kept;
    }
    alive += survived ? 1 : 0;
  }
  SurvivalEstimate out;
  out.trials = trials;
  out.rate = static_cast<double>(alive) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(trials));
  return out;
}

}  // namespace subgcn
