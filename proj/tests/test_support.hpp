#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "subgcn/graph.hpp"
#include "subgcn/rng.hpp"
#include "subgcn/gcn.hpp"

namespace testing {

using subgcn::Edge;
using subgcn::Graph;
using subgcn::NodeId;

inline Graph make_graph(std::vector<Edge> edges, NodeId n, bool self_loops = false) {
  return Graph::build(edges, n, self_loops);
}

inline Graph triangle() { return make_graph({{0, 1}, {1, 2}, {0, 2}}, 3); }
inline Graph path(NodeId n) {
  std::vector<Edge> e;
  for (NodeId v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return make_graph(e, n);
}
inline Graph star(NodeId leaves) {
  std::vector<Edge> e;
  for (NodeId v = 1; v <= leaves; ++v) e.push_back({0, v});
  return make_graph(e, leaves + 1);
}
inline Graph complete(NodeId n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.push_back({u, v});
  return make_graph(e, n);
}
// Edges (0,1),(1,2),(2,3),(1,3); degrees 1,3,2,2.
inline Graph square_with_chord() { return make_graph({{0, 1}, {1, 2}, {2, 3}, {1, 3}}, 4); }

inline Graph random_graph(NodeId n, double p, std::uint64_t seed, bool self_loops = false) {
  subgcn::Rng rng(seed);
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) e.push_back({u, v});
  return make_graph(e, n, self_loops);
}

inline subgcn::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, subgcn::Rng& rng, double scale = 1.0) {
  subgcn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, scale);
  return m;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("subgcn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
