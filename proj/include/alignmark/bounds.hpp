#pragma once

#include <optional>
#include <vector>

#include "alignmark/matrix.hpp"

namespace alignmark {

struct BoundRow {
  int p = 0;
  int s_lower_I = 0;   // parity/boundary construction bound
  int s_lower_II = 0;  // uniform displacement-filling bound
  int d1_upper_I = 0;
  int d1_upper_II = 0;
};

/// Analytic bounds on s_min(p) and d1_max(p) for all p in [0, MN].
/// Dimensions are stored with rows <= cols (inputs are transposed as needed).
struct BoundTable {
  int rows = 0;
  int cols = 0;
  int n1 = 0;  // end of the checkerboard region
  int n2 = 0;  // end of the boundary-column region
  std::vector<BoundRow> entries;  // entries[p].p == p

  const BoundRow& at(int p) const { return entries.at(static_cast<std::size_t>(p)); }
};

BoundTable bound_table(int rows, int cols);

/// Inclusive p-interval where the two bounds trade places: `first` is the
/// last p with s_lower_II > s_lower_I, `last` the next p with
/// s_lower_I > s_lower_II (or MN if that never happens).
struct CrossingInterval {
  int first = 0;
  int last = 0;
};
std::optional<CrossingInterval> bound_crossing_interval(const BoundTable& table);

/// Matrix with exactly p ones filled in region order: one parity class of the
/// checkerboard, then the other class along the two boundary columns, then
/// everything else, each region in row-major order. Its horizontal
/// first-neighbour sidelobe A(0, 1) equals p - d1_upper_I(p).
/// Throws std::invalid_argument when p is outside [0, rows * cols].
BinaryMatrix construct_bound_matrix(int rows, int cols, int p);

/// Minimum over all matrices with p ones of max(A(1,0), A(0,1)).
/// Throws std::invalid_argument when rows * cols > 20 or p is out of range.
int brute_force_first_neighbor_min(int rows, int cols, int p);

/// The same minimum for every p in [0, rows * cols], in a single sweep.
std::vector<int> brute_force_first_neighbor_table(int rows, int cols);

}  // namespace alignmark
