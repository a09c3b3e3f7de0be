#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "subgcn/graph.hpp"
#include "subgcn/normalization.hpp"
#include "subgcn/rng.hpp"

namespace subgcn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Same shape and bitwise-equal entries.
bool identical(const Matrix& a, const Matrix& b);
bool identical(std::span<const Matrix> a, std::span<const Matrix> b);

/// Sparse row-major propagation operator over local node IDs.
struct Propagation {
  std::vector<ArcId> row_offsets{0};
  std::vector<NodeId> col_indices;
  std::vector<double> values;

  std::size_t rows() const { return row_offsets.size() - 1; }
  /// A * x
  Matrix apply(const Matrix& x) const;
  /// A^T * x
  Matrix apply_transpose(const Matrix& x) const;
};

/// D^-1 A of the whole graph.
Propagation full_propagation(const Graph& g);

/// Subgraph operator with entries norm_value / alpha. Without coefficients,
/// alpha is taken as 1.
Propagation subgraph_propagation(const Graph& g, const Subgraph& s, const NormCoeffs* coeffs);

enum class Head : std::uint8_t {
  Softmax = 0,  // single-label, cross-entropy
  Sigmoid = 1,  // multi-label, per-class binary cross-entropy
};

/// Stack of graph-convolution layers; weights[l] is f(l) x f(l+1). Hidden
/// layers use ReLU, the last layer emits raw class scores.
struct Model {
  std::vector<Matrix> weights;
  Head head = Head::Softmax;

  /// Glorot-uniform initialization.
  static Model glorot(std::span<const std::size_t> dims, Head head, Rng& rng);

  std::size_t num_layers() const { return weights.size(); }
  std::vector<std::size_t> dims() const;
  std::size_t num_classes() const { return static_cast<std::size_t>(weights.back().cols()); }
  /// Throws std::invalid_argument if consecutive shapes disagree.
  void validate() const;

  friend bool operator==(const Model& a, const Model& b) {
    return a.head == b.head && identical(a.weights, b.weights);
  }
};

/// One minibatch: local operator plus gathered features and targets.
/// lambda[i] > 0 marks nodes contributing L_i / lambda[i] to the loss.
struct Batch {
  std::vector<NodeId> nodes;
  Propagation adjacency;
  Matrix features;
  Matrix targets;
  std::vector<double> lambda;
};

/// Gathers a Batch for `s`. Only nodes with loss_mask set and a positive
/// lambda in `coeffs` (or every masked node when coeffs is null, lambda = 1)
/// contribute to the loss.
Batch make_batch(const Graph& g, const Subgraph& s, const NormCoeffs* coeffs, const Matrix& features,
                 const Matrix& targets, std::span<const std::uint8_t> loss_mask);

struct ForwardCache {
  std::vector<Matrix> inputs;           // layer inputs after dropout
  std::vector<Matrix> masks;            // scaled dropout masks; empty when off
  std::vector<Matrix> pre_activations;  // A X W per layer
  Matrix scores;
};

struct DropoutSpec {
  double rate = 0.0;
  Rng* rng = nullptr;
};

ForwardCache forward(const Model& model, const Propagation& adjacency, const Matrix& features,
                     DropoutSpec dropout = {});
ForwardCache forward_subgraph(const Model& model, const Batch& batch, DropoutSpec dropout = {});
/// Inference on the full graph: alpha = 1, no dropout.
Matrix forward_full(const Model& model, const Graph& g, const Matrix& features);

/// Loss of each row of `scores` against `targets`.
std::vector<double> per_node_loss(const Matrix& scores, const Matrix& targets, Head head);

struct LossResult {
  double loss = 0.0;
  std::size_t contributing = 0;  // 0 means the batch had nothing to learn from
  std::vector<Matrix> grads;
};

/// loss = sum over contributing nodes of L_v / lambda_v (divided by the
/// contributing count when `mean`), with exact reverse-mode gradients.
LossResult loss_and_grad(const Model& model, const Batch& batch, const ForwardCache& cache,
                         bool mean = false);

}  // namespace subgcn
