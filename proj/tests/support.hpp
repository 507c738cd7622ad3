#pragma once

#include <initializer_list>

#include "admmcert/types.hpp"

namespace admmcert::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Row-major fill.
inline Matrix mat(Index rows, Index cols, std::initializer_list<double> v) {
  Matrix out(rows, cols);
  auto it = v.begin();
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out(r, c) = *it++;
  }
  return out;
}

inline Matrix one(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace admmcert::testing
