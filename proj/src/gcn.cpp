#include "subgcn/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace subgcn {

bool identical(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::equal(a.data(), a.data() + a.size(), b.data());
}

bool identical(std::span<const Matrix> a, std::span<const Matrix> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!identical(a[i], b[i])) return false;
  }
  return true;
}

Matrix Propagation::apply(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != rows()) {
    throw std::invalid_argument("propagation: operand has " + std::to_string(x.rows()) + " rows, expected " +
                                std::to_string(rows()));
  }
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < rows(); ++i) {
    auto out = y.row(static_cast<Eigen::Index>(i));
    for (ArcId k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      out.noalias() += values[k] * x.row(col_indices[k]);
    }
  }
  return y;
}

Matrix Propagation::apply_transpose(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != rows()) {
    throw std::invalid_argument("propagation: transpose operand has wrong row count");
  }
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto in = x.row(static_cast<Eigen::Index>(i));
    for (ArcId k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      y.row(col_indices[k]).noalias() += values[k] * in;
    }
  }
  return y;
}

Propagation full_propagation(const Graph& g) {
  Propagation p;
  p.row_offsets.assign(g.row_offsets().begin(), g.row_offsets().end());
  p.col_indices.assign(g.col_indices().begin(), g.col_indices().end());
  p.values.assign(g.norm_values().begin(), g.norm_values().end());
  return p;
}

Propagation subgraph_propagation(const Graph& g, const Subgraph& s, const NormCoeffs* coeffs) {
  if (coeffs != nullptr && coeffs->alpha.size() != g.num_arcs()) {
    throw std::invalid_argument("coefficients do not match the graph's arc count");
  }
  Propagation p;
  p.row_offsets = s.row_offsets;
  p.col_indices = s.col_indices;
  p.values.resize(s.num_arcs());
  const auto norm = g.norm_values();
  for (std::size_t k = 0; k < s.num_arcs(); ++k) {
    const ArcId a = s.arc_origin[k];
    p.values[k] = coeffs == nullptr ? norm[a] : normalized_arc_value(g, *coeffs, a);
  }
  return p;
}

Model Model::glorot(std::span<const std::size_t> dims, Head head, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("model needs at least input and output dims");
  Model m;
  m.head = head;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] == 0 || dims[l + 1] == 0) throw std::invalid_argument("layer dims must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    Matrix w(dims[l], dims[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = (2.0 * rng.uniform() - 1.0) * limit;
    m.weights.push_back(std::move(w));
  }
  return m;
}

std::vector<std::size_t> Model::dims() const {
  std::vector<std::size_t> d;
  if (weights.empty()) return d;
  d.push_back(static_cast<std::size_t>(weights.front().rows()));
  for (const auto& w : weights) d.push_back(static_cast<std::size_t>(w.cols()));
  return d;
}

void Model::validate() const {
  if (weights.empty()) throw std::invalid_argument("model has no layers");
  for (std::size_t l = 1; l < weights.size(); ++l) {
    if (weights[l].rows() != weights[l - 1].cols()) {
      throw std::invalid_argument("layer " + std::to_string(l) + " input dim " + std::to_string(weights[l].rows()) +
                                  " does not match previous output dim " + std::to_string(weights[l - 1].cols()));
    }
  }
}

Batch make_batch(const Graph& g, const Subgraph& s, const NormCoeffs* coeffs, const Matrix& features,
                 const Matrix& targets, std::span<const std::uint8_t> loss_mask) {
  if (static_cast<std::size_t>(features.rows()) != g.num_nodes() ||
      static_cast<std::size_t>(targets.rows()) != g.num_nodes() || loss_mask.size() != g.num_nodes()) {
    throw std::invalid_argument("batch inputs must have one row per graph node");
  }
  Batch b;
  b.nodes = s.nodes;
  b.adjacency = subgraph_propagation(g, s, coeffs);
  const auto n = static_cast<Eigen::Index>(s.num_nodes());
  b.features.resize(n, features.cols());
  b.targets.resize(n, targets.cols());
  b.lambda.assign(s.num_nodes(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const NodeId v = s.nodes[static_cast<std::size_t>(i)];
    b.features.row(i) = features.row(v);
    b.targets.row(i) = targets.row(v);
    if (loss_mask[v] != 0) b.lambda[static_cast<std::size_t>(i)] = coeffs == nullptr ? 1.0 : coeffs->lambda[v];
  }
  return b;
}

ForwardCache forward(const Model& model, const Propagation& adjacency, const Matrix& features,
                     DropoutSpec dropout) {
  model.validate();
  if (features.cols() != model.weights.front().rows()) {
    throw std::invalid_argument("feature dim " + std::to_string(features.cols()) + " does not match model input dim " +
                                std::to_string(model.weights.front().rows()));
  }
  if (dropout.rate < 0.0 || dropout.rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  const bool drop = dropout.rate > 0.0;
  if (drop && dropout.rng == nullptr) throw std::invalid_argument("dropout requires an RNG");

  ForwardCache cache;
  Matrix h = features;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    if (drop) {
      Matrix mask(h.rows(), h.cols());
      const double keep_scale = 1.0 / (1.0 - dropout.rate);
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = dropout.rng->uniform() < dropout.rate ? 0.0 : keep_scale;
      }
      h = h.cwiseProduct(mask);
      cache.masks.push_back(std::move(mask));
    }
    Matrix projected = h * model.weights[l];
    Matrix z = adjacency.apply(projected);
    cache.inputs.push_back(std::move(h));
    if (l + 1 < model.num_layers()) {
      h = z.cwiseMax(0.0);
    } else {
      cache.scores = z;
    }
    cache.pre_activations.push_back(std::move(z));
  }
  return cache;
}

ForwardCache forward_subgraph(const Model& model, const Batch& batch, DropoutSpec dropout) {
  return forward(model, batch.adjacency, batch.features, dropout);
}

Matrix forward_full(const Model& model, const Graph& g, const Matrix& features) {
  return forward(model, full_propagation(g), features).scores;
}

namespace {

// Per-row loss and d(loss)/d(scores).
double row_loss(const Eigen::Ref<const Eigen::RowVectorXd>& z, const Eigen::Ref<const Eigen::RowVectorXd>& y,
                Head head, Eigen::RowVectorXd* grad) {
  if (head == Head::Softmax) {
    const double zmax = z.maxCoeff();
    const Eigen::RowVectorXd shifted = z.array() - zmax;
    const double log_norm = std::log(shifted.array().exp().sum());
    const Eigen::RowVectorXd log_p = shifted.array() - log_norm;
    if (grad != nullptr) *grad = log_p.array().exp().matrix() * y.sum() - y;
    return -(y.array() * log_p.array()).sum();
  }
  double loss = 0.0;
  if (grad != nullptr) grad->resize(z.size());
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    const double x = z[c];
    loss += std::max(x, 0.0) - x * y[c] + std::log1p(std::exp(-std::abs(x)));
    if (grad != nullptr) (*grad)[c] = 1.0 / (1.0 + std::exp(-x)) - y[c];
  }
  return loss;
}

}  // namespace

std::vector<double> per_node_loss(const Matrix& scores, const Matrix& targets, Head head) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw std::invalid_argument("scores and targets shapes differ");
  }
  std::vector<double> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = row_loss(scores.row(i), targets.row(i), head, nullptr);
  }
  return out;
}

LossResult loss_and_grad(const Model& model, const Batch& batch, const ForwardCache& cache, bool mean) {
  const Matrix& scores = cache.scores;
  if (scores.rows() != batch.targets.rows() || scores.cols() != batch.targets.cols()) {
    throw std::invalid_argument("scores and batch targets shapes differ");
  }
  LossResult out;
  Matrix grad = Matrix::Zero(scores.rows(), scores.cols());
  Eigen::RowVectorXd row_grad;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double lambda = batch.lambda[static_cast<std::size_t>(i)];
    if (!(lambda > 0.0)) continue;
    const double l = row_loss(scores.row(i), batch.targets.row(i), model.head, &row_grad);
    out.loss += l / lambda;
    grad.row(i) = row_grad / lambda;
    ++out.contributing;
  }
  if (out.contributing == 0) return out;
  if (mean) {
    const double scale = static_cast<double>(out.contributing);
    out.loss /= scale;
    grad /= scale;
  }

  const std::size_t layers = model.num_layers();
  out.grads.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) grad = grad.cwiseProduct((cache.pre_activations[l].array() > 0.0).cast<double>().matrix());
    const Matrix d_projected = batch.adjacency.apply_transpose(grad);
    out.grads[l] = cache.inputs[l].transpose() * d_projected;
    if (l > 0) {
      grad = d_projected * model.weights[l].transpose();
      if (!cache.masks.empty()) grad = grad.cwiseProduct(cache.masks[l]);
    }
  }
  return out;
}

}  // namespace subgcn
