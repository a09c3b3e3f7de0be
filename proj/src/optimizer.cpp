#include "subgcn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace subgcn {

AdamState AdamState::zeros_like(const Model& model) {
  AdamState s;
  for (const auto& w : model.weights) {
    s.first_moment.push_back(Matrix::Zero(w.rows(), w.cols()));
    s.second_moment.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  return s;
}

void adam_step(Model& model, const std::vector<Matrix>& grads, AdamState& state, double learning_rate,
               const AdamConfig& config) {
  const std::size_t layers = model.num_layers();
  if (grads.size() != layers || state.first_moment.size() != layers || state.second_moment.size() != layers) {
    throw std::invalid_argument("adam: gradient/state layer count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix& w = model.weights[l];
    const Matrix& g = grads[l];
    if (g.rows() != w.rows() || g.cols() != w.cols()) throw std::invalid_argument("adam: gradient shape mismatch");
    Matrix& m = state.first_moment[l];
    Matrix& v = state.second_moment[l];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double m_hat = m.data()[i] / correction1;
      const double v_hat = v.data()[i] / correction2;
      w.data()[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace subgcn
