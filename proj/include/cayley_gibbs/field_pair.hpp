#pragma once

#include <algorithm>
#include <cmath>
#include <compare>

namespace cayley_gibbs {

/// A pair (h, l) of field values; a solution of the two-field system when it
/// comes out of the solver.
struct FieldPair {
  double h = 0.0;
  double l = 0.0;

  FieldPair operator-() const { return {-h, -l}; }

  friend auto operator<=>(const FieldPair&, const FieldPair&) = default;
};

inline double linf_distance(const FieldPair& x, const FieldPair& y) {
  return std::max(std::fabs(x.h - y.h), std::fabs(x.l - y.l));
}

}  // namespace cayley_gibbs
