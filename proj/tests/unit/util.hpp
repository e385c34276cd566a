#pragma once

#include <cmath>

#include <doctest.h>

#include "col/geometry.hpp"

namespace testutil {

inline col::Vector vec(std::initializer_list<double> xs) {
  col::Vector v(static_cast<col::Index>(xs.size()));
  col::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline void check_close(const col::Vector& a, const col::Vector& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (col::Index i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(a[i] - b[i]) <= tol);
  }
}

}  // namespace testutil
