#pragma once
#include <stdexcept>

#include "cvxreg/types.hpp"

namespace cvxreg {

/// Canonical constraint-row orderings, shared by every operator and by the
/// dense reference path so row positions are bit-exact everywhere:
///  - full rows: lexicographic over ordered pairs (l1, l2), l1 != l2;
///  - within(i): lexicographic over ordered pairs inside block i;
///  - cross: lexicographic over block pairs (i, j), i != j, then
///    lexicographic over (l1, l2).
struct RowIndexing {
  Index N = 0;
  Index K = 1;
  Index nbar = 0;

  static RowIndexing from(const Partition& part) {
    return RowIndexing{part.N(), part.K, part.nbar};
  }

  Index rows_total() const { return N * (N - 1); }
  Index rows_within_per_block() const { return nbar * (nbar - 1); }
  Index rows_cross() const { return N * (N - nbar); }
  Index rows_C() const { return rows_cross() + N; }

  /// Position of ordered pair (l1, l2) in the canonical cross ordering.
  /// Bijective onto [0, rows_cross()). Indices are 0-based.
  Index cross_position(Index l1, Index l2) const {
    const Index i = l1 / nbar;
    const Index j = l2 / nbar;
    if (i == j) throw std::invalid_argument("not a cross-block pair");
    const Index pair_rank = i * (K - 1) + j - (j > i ? 1 : 0);
    const Index local = (l1 - i * nbar) * nbar + (l2 - j * nbar);
    return pair_rank * nbar * nbar + local;
  }
};

}  // namespace cvxreg
