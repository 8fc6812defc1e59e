#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geocoherence/ensemble.hpp"

namespace geocoherence::detail {

// Column-major copy of a training table plus, per feature, the row order
// sorted by value (ties by row index). Built once and shared by every tree.
struct ColumnStore {
  explicit ColumnStore(const MatrixView& rows);

  double value(std::size_t feature, std::uint32_t row) const { return columns[feature * n_rows + row]; }
  std::span<const std::uint32_t> sorted(std::size_t feature) const {
    return {order.data() + feature * n_rows, n_rows};
  }

  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> columns;
  std::vector<std::uint32_t> order;
};

DecisionTree grow_tree(const ColumnStore& store, std::span<const int> labels, std::size_t n_classes,
                       const TreeParams& params, Rng& rng);

}  // namespace geocoherence::detail
