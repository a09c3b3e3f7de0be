#pragma once

#include <span>

#include "subgcn/gcn.hpp"

namespace subgcn {

/// Micro-averaged F1 = 2TP / (2TP + FP + FN), pooled over every
/// (node, class) decision of the listed rows. Softmax heads predict the
/// argmax class; sigmoid heads predict each class whose score is > 0
/// (probability > 0.5). For single-label data this equals accuracy.
double f1_micro(const Matrix& scores, const Matrix& targets, Head head, std::span<const NodeId> rows);

}  // namespace subgcn
