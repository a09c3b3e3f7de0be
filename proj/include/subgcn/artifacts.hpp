#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "subgcn/graph.hpp"
#include "subgcn/normalization.hpp"
#include "subgcn/samplers.hpp"
#include "subgcn/trainer.hpp"

namespace subgcn {

// Binary artifacts. Each file starts with an 8-byte tag and a u32 version;
// every number is little-endian, reals are IEEE 64-bit. Caches and
// checkpoints record the graph hash and are refused for any other graph.

struct SubgraphCache {
  std::uint64_t graph_hash = 0;
  SamplerConfig sampler;
  std::uint64_t first_index = 0;
  std::vector<Subgraph> subgraphs;

  friend bool operator==(const SubgraphCache&, const SubgraphCache&) = default;
};

void save_subgraph_cache(const std::filesystem::path& path, const SubgraphCache& cache);
/// With `g`, also checks that the cache was drawn from that graph.
SubgraphCache load_subgraph_cache(const std::filesystem::path& path, const Graph* g = nullptr);

struct CoeffFile {
  std::uint64_t graph_hash = 0;
  SamplerConfig sampler;
  NormCoeffs coeffs;

  friend bool operator==(const CoeffFile&, const CoeffFile&) = default;
};

void save_coeffs(const std::filesystem::path& path, const CoeffFile& file);
CoeffFile load_coeffs(const std::filesystem::path& path, const Graph& g);

struct Checkpoint {
  std::uint64_t graph_hash = 0;
  ModelSpec model;
  SamplerConfig sampler;
  TrainConfig train;
  TrainState state;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint make_checkpoint(const Trainer& trainer, const Graph& g);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// With `g`, also checks the graph hash.
Checkpoint load_checkpoint(const std::filesystem::path& path, const Graph* g = nullptr);

}  // namespace subgcn
