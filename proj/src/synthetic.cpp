#include "subgcn/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "subgcn/rng.hpp"

namespace subgcn {

namespace {

// Per class: shuffle members, first 60% train, next 20% val, rest test.
std::vector<Split> stratified_split(std::span<const std::uint32_t> labels, std::uint32_t num_classes, Rng& rng) {
  std::vector<Split> split(labels.size(), Split::Test);
  std::vector<std::vector<NodeId>> members(num_classes);
  for (NodeId v = 0; v < labels.size(); ++v) members[labels[v]].push_back(v);
  for (auto& group : members) {
    std::shuffle(group.begin(), group.end(), rng.engine());
    const std::size_t train = (group.size() * 6 + 5) / 10;
    const std::size_t val = (group.size() * 2 + 5) / 10;
    for (std::size_t i = 0; i < group.size(); ++i) {
      split[group[i]] = i < train ? Split::Train : i < train + val ? Split::Val : Split::Test;
    }
  }
  return split;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

Dataset generate_sbm(const SbmSpec& spec, bool self_loops) {
  if (spec.blocks == 0 || spec.block_size == 0) throw std::invalid_argument("SBM blocks must be non-empty");
  check_probability(spec.p_in, "intra-block probability");
  check_probability(spec.p_out, "inter-block probability");
  if (!(spec.noise >= 0.0)) throw std::invalid_argument("noise must be non-negative");

  Rng rng(spec.seed);
  const std::uint32_t n = spec.blocks * spec.block_size;
  std::vector<std::uint32_t> block(n);
  for (NodeId v = 0; v < n; ++v) block[v] = v / spec.block_size;

  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(block[u] == block[v] ? spec.p_in : spec.p_out)) edges.push_back({u, v});
    }
  }

  Dataset ds;
  ds.graph = Graph::build(edges, n, self_loops);
  ds.mode = LabelMode::Single;
  ds.num_classes = spec.blocks;
  ds.targets = one_hot(block, spec.blocks);
  ds.features = ds.targets;
  for (Eigen::Index i = 0; i < ds.features.size(); ++i) ds.features.data()[i] += rng.normal(0.0, spec.noise);
  ds.split = stratified_split(block, spec.blocks, rng);
  return ds;
}

Graph generate_regular(std::uint32_t degree, std::uint32_t nodes, std::uint64_t seed) {
  if (nodes == 0) throw std::invalid_argument("regular graph needs at least one node");
  if (degree >= nodes) throw std::invalid_argument("degree must be below the node count");
  if ((static_cast<std::uint64_t>(degree) * nodes) % 2 != 0) throw std::invalid_argument("degree * nodes must be even");

  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<NodeId> stubs;
    stubs.reserve(static_cast<std::size_t>(degree) * nodes);
    for (NodeId v = 0; v < nodes; ++v) stubs.insert(stubs.end(), degree, v);
    std::set<std::pair<NodeId, NodeId>> chosen;
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      // Try random stub pairs; give up on this attempt after many rejections.
      bool paired = false;
      for (int tries = 0; tries < 100 && !paired; ++tries) {
        const std::size_t i = rng.below(stubs.size());
        const std::size_t j = rng.below(stubs.size());
        const NodeId a = std::min(stubs[i], stubs[j]);
        const NodeId b = std::max(stubs[i], stubs[j]);
        if (i == j || a == b || chosen.count({a, b}) > 0) continue;
        chosen.insert({a, b});
        const std::size_t hi = std::max(i, j), lo = std::min(i, j);
        stubs[hi] = stubs.back();
        stubs.pop_back();
        stubs[lo] = stubs.back();
        stubs.pop_back();
        paired = true;
      }
      stuck = !paired;
    }
    if (stuck) continue;
    std::vector<Edge> edges;
    for (const auto& [a, b] : chosen) edges.push_back({a, b});
    return Graph::build(edges, nodes);
  }
  throw std::invalid_argument("could not realize a simple " + std::to_string(degree) + "-regular graph on " +
                              std::to_string(nodes) + " nodes");
}

Graph generate_er(std::uint32_t nodes, double p, std::uint64_t seed) {
  if (nodes == 0) throw std::invalid_argument("ER graph needs at least one node");
  check_probability(p, "edge probability");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < nodes; ++u) {
    for (NodeId v = u + 1; v < nodes; ++v) {
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return Graph::build(edges, nodes);
}

Dataset random_dataset(Graph graph, std::uint32_t feature_dim, std::uint32_t num_classes, std::uint64_t seed) {
  if (feature_dim == 0 || num_classes == 0) throw std::invalid_argument("feature dim and class count must be positive");
  Rng rng(seed);
  Dataset ds;
  const NodeId n = graph.num_nodes();
  ds.graph = std::move(graph);
  ds.features.resize(n, feature_dim);
  for (Eigen::Index i = 0; i < ds.features.size(); ++i) ds.features.data()[i] = rng.normal();
  std::vector<std::uint32_t> labels(n);
  for (auto& c : labels) c = static_cast<std::uint32_t>(rng.below(num_classes));
  ds.mode = LabelMode::Single;
  ds.num_classes = num_classes;
  ds.targets = one_hot(labels, num_classes);
  ds.split = stratified_split(labels, num_classes, rng);
  return ds;
}

}  // namespace subgcn
