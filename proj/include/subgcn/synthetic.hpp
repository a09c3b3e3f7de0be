#pragma once

#include <cstdint>

#include "subgcn/dataset.hpp"
#include "subgcn/graph.hpp"

namespace subgcn {

struct SbmSpec {
  std::uint32_t blocks = 2;
  std::uint32_t block_size = 500;
  double p_in = 0.05;   // intra-block edge probability
  double p_out = 0.005; // inter-block edge probability
  double noise = 1.0;   // stddev of Gaussian feature noise
  std::uint64_t seed = 0;
};

/// Stochastic block model: labels are block IDs, features are the one-hot
/// block indicator plus N(0, noise^2) noise, split 60/20/20 per block.
Dataset generate_sbm(const SbmSpec& spec, bool self_loops = false);

/// Uniformly random simple d-regular graph (pairing with restarts).
Graph generate_regular(std::uint32_t degree, std::uint32_t nodes, std::uint64_t seed);

/// Erdos-Renyi G(n, p).
Graph generate_er(std::uint32_t nodes, double p, std::uint64_t seed);

/// Attaches N(0, 1) features, uniform random single labels and a stratified
/// 60/20/20 split to an existing graph.
Dataset random_dataset(Graph graph, std::uint32_t feature_dim, std::uint32_t num_classes, std::uint64_t seed);

}  // namespace subgcn
