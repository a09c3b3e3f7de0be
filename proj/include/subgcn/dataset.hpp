#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "subgcn/gcn.hpp"
#include "subgcn/graph.hpp"

namespace subgcn {

enum class LabelMode : std::uint8_t { Single = 0, Multi = 1 };
enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

/*
  A node classification dataset. targets is |V| x num_classes with 0/1
  entries; in single-label mode each row is one-hot.

  On disk (one directory):
    graph.txt     "num_nodes num_edges", then "u v" per edge, u < v, ascending
    features.txt  "num_nodes dim", then one row of floats per node
    labels.txt    "single|multi num_classes", then a class ID or a 0/1 row
    split.txt     one tag per node: 0 train, 1 val, 2 test
*/
struct Dataset {
  Graph graph;
  Matrix features;
  Matrix targets;
  LabelMode mode = LabelMode::Single;
  std::uint32_t num_classes = 0;
  std::vector<Split> split;

  /// Throws DataError on any inconsistency.
  void validate() const;

  Head head() const { return mode == LabelMode::Single ? Head::Softmax : Head::Sigmoid; }
  std::vector<NodeId> nodes_in(Split which) const;
  std::vector<std::uint8_t> mask(Split which) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.graph == b.graph && identical(a.features, b.features) && identical(a.targets, b.targets) &&
           a.mode == b.mode && a.num_classes == b.num_classes && a.split == b.split;
  }
};

Dataset load_dataset(const std::filesystem::path& dir, bool self_loops = false);
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Builds targets from single-label class IDs.
Matrix one_hot(std::span<const std::uint32_t> labels, std::uint32_t num_classes);

}  // namespace subgcn
