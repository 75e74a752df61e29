#include "alignmark/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace alignmark {
namespace {

constexpr int kBruteForceMaxCells = 20;

int ceil_div(std::int64_t num, std::int64_t den) {
  return static_cast<int>((num + den - 1) / den);
}

void check_brute_force_shape(int rows, int cols) {
  if (rows < 1 || cols < 1 || rows * cols > kBruteForceMaxCells) {
    throw std::invalid_argument("brute-force oracle limited to rows * cols <= " +
                                std::to_string(kBruteForceMaxCells));
  }
}

// max(A(1,0), A(0,1)) for a flat row-major mask.
struct FirstNeighborKernel {
  int rows;
  int cols;
  std::uint32_t not_last_col = 0;

  FirstNeighborKernel(int r, int c) : rows(r), cols(c) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j + 1 < cols; ++j) not_last_col |= std::uint32_t{1} << (i * cols + j);
  }

  int operator()(std::uint32_t mask) const {
    const int horizontal = std::popcount(mask & (mask >> 1) & not_last_col);
    const int vertical = std::popcount(mask & (mask >> cols));
    return std::max(horizontal, vertical);
  }
};

}  // namespace

BoundTable bound_table(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("dimensions must be positive");
  const int m = std::min(rows, cols);
  const int n = std::max(rows, cols);
  const int cells = m * n;

  BoundTable table;
  table.rows = m;
  table.cols = n;
  if (cells % 2 == 0) {
    table.n1 = cells / 2;
    table.n2 = table.n1 + m;
  } else {
    table.n1 = (cells + 1) / 2;
    table.n2 = table.n1 + m - 1;
  }

  // Unique non-zero displacements, doubled: 4NM - 2N - 2M. Zero only for 1x1.
  const std::int64_t displacement_den = 4LL * n * m - 2LL * n - 2LL * m;
  table.entries.resize(static_cast<std::size_t>(cells) + 1);
  for (int p = 0; p <= cells; ++p) {
    BoundRow& row = table.entries[p];
    row.p = p;
    if (p <= table.n1) {
      row.d1_upper_I = p;
    } else if (p <= table.n2) {
      row.d1_upper_I = table.n1;
    } else {
      row.d1_upper_I = m * (n + 1) - p;
    }
    row.s_lower_I = p - row.d1_upper_I;
    const std::int64_t pairs = static_cast<std::int64_t>(p) * (p - 1);
    row.s_lower_II = displacement_den > 0 ? ceil_div(pairs, displacement_den) : 0;
    row.d1_upper_II = p - row.s_lower_II;
  }
  return table;
}

std::optional<CrossingInterval> bound_crossing_interval(const BoundTable& table) {
  // first: last p where the displacement bound is strictly the stronger one;
  // last: the next p where the construction bound strictly takes over.
  int first = -1;
  for (const BoundRow& row : table.entries) {
    if (row.s_lower_II > row.s_lower_I) first = row.p;
  }
  if (first < 0) return std::nullopt;
  int last = static_cast<int>(table.entries.size()) - 1;
  for (const BoundRow& row : table.entries) {
    if (row.p > first && row.s_lower_I > row.s_lower_II) {
      last = row.p;
      break;
    }
  }
  return CrossingInterval{first, last};
}

BinaryMatrix construct_bound_matrix(int rows, int cols, int p) {
  if (p < 0 || p > rows * cols) {
    throw std::invalid_argument("p must lie in [0, rows * cols]");
  }
  if (rows > cols) return transpose(construct_bound_matrix(cols, rows, p));

  BinaryMatrix m(rows, cols);
  int remaining = p;
  auto fill = [&](auto&& selects) {
    for (int i = 0; i < rows && remaining > 0; ++i)
      for (int j = 0; j < cols && remaining > 0; ++j)
        if (!m.at(i, j) && selects(i, j)) {
          m.set(i, j, true);
          --remaining;
        }
  };
  // I: checkerboard class holding (0, 0), ceil(MN / 2) cells.
  fill([](int i, int j) { return (i + j) % 2 == 0; });
  // II: the other class on the two boundary columns.
  fill([cols](int, int j) { return j == 0 || j == cols - 1; });
  // III: the rest.
  fill([](int, int) { return true; });
  return m;
}

int brute_force_first_neighbor_min(int rows, int cols, int p) {
  check_brute_force_shape(rows, cols);
  const int cells = rows * cols;
  if (p < 0 || p > cells) throw std::invalid_argument("p must lie in [0, rows * cols]");
  if (p == 0) return 0;

  const FirstNeighborKernel kernel(rows, cols);
  const std::uint64_t limit = std::uint64_t{1} << cells;
  int best = std::numeric_limits<int>::max();
  // Gosper's hack: every mask with exactly p bits, ascending.
  for (std::uint64_t mask = (std::uint64_t{1} << p) - 1; mask < limit;) {
    best = std::min(best, kernel(static_cast<std::uint32_t>(mask)));
    const std::uint64_t low = mask & (~mask + 1);
    const std::uint64_t ripple = mask + low;
    mask = (((ripple ^ mask) >> 2) / low) | ripple;
  }
  return best;
}

std::vector<int> brute_force_first_neighbor_table(int rows, int cols) {
  check_brute_force_shape(rows, cols);
  const int cells = rows * cols;
  const FirstNeighborKernel kernel(rows, cols);
  std::vector<int> best(static_cast<std::size_t>(cells) + 1, std::numeric_limits<int>::max());
  const std::uint32_t limit = std::uint32_t{1} << cells;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    int& slot = best[std::popcount(mask)];
    slot = std::min(slot, kernel(mask));
  }
  return best;
}

}  // namespace alignmark
