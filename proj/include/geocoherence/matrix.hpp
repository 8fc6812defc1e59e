#pragma once

#include <cassert>
#include <cstddef>
#include <span>

namespace geocoherence {

// Non-owning row-major view of a dense feature table.
struct MatrixView {
  std::span<const double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  MatrixView() = default;
  MatrixView(std::span<const double> v, std::size_t r, std::size_t c) : values(v), rows(r), cols(c) {
    assert(v.size() == r * c);
  }

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return values.subspan(r * cols, cols); }
};

}  // namespace geocoherence
