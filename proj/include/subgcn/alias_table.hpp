#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "subgcn/rng.hpp"

namespace subgcn {

// Walker/Vose alias table: O(n) construction, O(1) draws from a discrete
// distribution given by non-negative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint64_t> alias_;
};

}  // namespace subgcn
