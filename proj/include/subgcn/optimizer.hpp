#pragma once

#include <cstdint>
#include <vector>

#include "subgcn/gcn.hpp"

namespace subgcn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const Model& model);
  friend bool operator==(const AdamState& a, const AdamState& b) {
    return a.step == b.step && identical(a.first_moment, b.first_moment) &&
           identical(a.second_moment, b.second_moment);
  }
};

/// One bias-corrected Adam update of every layer.
void adam_step(Model& model, const std::vector<Matrix>& grads, AdamState& state, double learning_rate,
               const AdamConfig& config = {});

}  // namespace subgcn
