#include "subgcn/metrics.hpp"

#include <stdexcept>

namespace subgcn {

double f1_micro(const Matrix& scores, const Matrix& targets, Head head, std::span<const NodeId> rows) {
  if (rows.empty()) throw std::invalid_argument("f1_micro: empty evaluation set");
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw std::invalid_argument("f1_micro: scores and targets shapes differ");
  }
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (NodeId r : rows) {
    const auto i = static_cast<Eigen::Index>(r);
    if (i >= scores.rows()) throw std::out_of_range("f1_micro: row out of range");
    Eigen::Index best = 0;
    if (head == Head::Softmax) scores.row(i).maxCoeff(&best);
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      const bool predicted = head == Head::Softmax ? c == best : scores(i, c) > 0.0;
      const bool actual = targets(i, c) > 0.5;
      if (predicted && actual) ++tp;
      else if (predicted) ++fp;
      else if (actual) ++fn;
    }
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 1.0 : 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace subgcn
