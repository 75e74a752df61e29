#include "alignmark/matrix.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace alignmark {
namespace {

void check_shape(int rows, int cols) {
  if (rows < 1 || cols < 1 || rows > BinaryMatrix::kMaxSide || cols > BinaryMatrix::kMaxSide) {
    throw std::invalid_argument("matrix dimensions must lie in [1, " +
                                std::to_string(BinaryMatrix::kMaxSide) + "], got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

constexpr std::array<Symmetry, 8> kSquareGroup = {
    Symmetry::kIdentity,       Symmetry::kRotate90,     Symmetry::kRotate180,
    Symmetry::kRotate270,      Symmetry::kFlipHorizontal, Symmetry::kFlipVertical,
    Symmetry::kTranspose,      Symmetry::kAntiTranspose,
};

constexpr std::array<Symmetry, 4> kRectGroup = {
    Symmetry::kIdentity,
    Symmetry::kFlipHorizontal,
    Symmetry::kFlipVertical,
    Symmetry::kRotate180,
};

}  // namespace

BinaryMatrix::BinaryMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  check_shape(rows, cols);
}

BinaryMatrix::BinaryMatrix(int rows, int cols, std::span<const Row> words)
    : BinaryMatrix(rows, cols) {
  if (static_cast<int>(words.size()) != rows) {
    throw std::invalid_argument("expected " + std::to_string(rows) + " row words, got " +
                                std::to_string(words.size()));
  }
  for (int i = 0; i < rows; ++i) {
    if (words[i] & ~column_mask()) {
      throw std::invalid_argument("row " + std::to_string(i) + " has bits beyond column " +
                                  std::to_string(cols));
    }
    rows_words_[i] = words[i];
  }
}

BinaryMatrix BinaryMatrix::from_rows(const std::vector<std::vector<int>>& cells) {
  if (cells.empty() || cells.front().empty()) throw std::invalid_argument("empty matrix");
  BinaryMatrix m(static_cast<int>(cells.size()), static_cast<int>(cells.front().size()));
  for (int i = 0; i < m.rows(); ++i) {
    if (static_cast<int>(cells[i].size()) != m.cols()) throw std::invalid_argument("ragged rows");
    for (int j = 0; j < m.cols(); ++j) {
      if (cells[i][j] != 0 && cells[i][j] != 1) throw std::invalid_argument("cells must be 0 or 1");
      m.set(i, j, cells[i][j] == 1);
    }
  }
  return m;
}

BinaryMatrix BinaryMatrix::all_ones(int rows, int cols) {
  BinaryMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) m.rows_words_[i] = m.column_mask();
  return m;
}

void BinaryMatrix::set(int i, int j, bool value) {
  const Row bit = Row{1} << j;
  rows_words_[i] = value ? (rows_words_[i] | bit) : (rows_words_[i] & ~bit);
}

int BinaryMatrix::popcount() const {
  int total = 0;
  for (int i = 0; i < rows_; ++i) total += std::popcount(rows_words_[i]);
  return total;
}

std::strong_ordering BinaryMatrix::operator<=>(const BinaryMatrix& other) const {
  if (auto c = rows_ <=> other.rows_; c != 0) return c;
  if (auto c = cols_ <=> other.cols_; c != 0) return c;
  for (int i = 0; i < rows_; ++i) {
    if (auto c = rows_words_[i] <=> other.rows_words_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool BinaryMatrix::operator==(const BinaryMatrix& other) const {
  return (*this <=> other) == 0;
}

BinaryMatrix::Row reverse_row(BinaryMatrix::Row word, int width) {
  BinaryMatrix::Row out = 0;
  for (int j = 0; j < width; ++j) {
    if ((word >> j) & 1u) out |= BinaryMatrix::Row{1} << (width - 1 - j);
  }
  return out;
}

std::span<const Symmetry> symmetry_group(int rows, int cols) {
  if (rows == cols) return kSquareGroup;
  return kRectGroup;
}

BinaryMatrix transpose(const BinaryMatrix& m) {
  BinaryMatrix t(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m.at(i, j)) t.set(j, i, true);
  return t;
}

BinaryMatrix apply(Symmetry op, const BinaryMatrix& m) {
  const int rows = m.rows();
  const int cols = m.cols();
  const bool needs_square = op == Symmetry::kRotate90 || op == Symmetry::kRotate270 ||
                            op == Symmetry::kTranspose || op == Symmetry::kAntiTranspose;
  if (needs_square && rows != cols) {
    throw std::invalid_argument("symmetry operation requires a square matrix");
  }

  BinaryMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!m.at(i, j)) continue;
      int r = i;
      int c = j;
      switch (op) {
        case Symmetry::kIdentity: break;
        case Symmetry::kRotate90: r = j; c = rows - 1 - i; break;
        case Symmetry::kRotate180: r = rows - 1 - i; c = cols - 1 - j; break;
        case Symmetry::kRotate270: r = cols - 1 - j; c = i; break;
        case Symmetry::kFlipHorizontal: c = cols - 1 - j; break;
        case Symmetry::kFlipVertical: r = rows - 1 - i; break;
        case Symmetry::kTranspose: r = j; c = i; break;
        case Symmetry::kAntiTranspose: r = cols - 1 - j; c = rows - 1 - i; break;
      }
      out.set(r, c, true);
    }
  }
  return out;
}

std::vector<BinaryMatrix> symmetry_orbit(const BinaryMatrix& m) {
  std::vector<BinaryMatrix> orbit;
  for (Symmetry op : symmetry_group(m.rows(), m.cols())) orbit.push_back(apply(op, m));
  std::sort(orbit.begin(), orbit.end());
  orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
  return orbit;
}

BinaryMatrix canonical_form(const BinaryMatrix& m) {
  BinaryMatrix best = m;
  for (Symmetry op : symmetry_group(m.rows(), m.cols())) {
    BinaryMatrix image = apply(op, m);
    if (image < best) best = image;
  }
  return best;
}

BinaryMatrix expand(const BinaryMatrix& m, int k) {
  if (k < 1) throw std::invalid_argument("expansion factor must be positive");
  if (m.rows() * k > BinaryMatrix::kMaxSide || m.cols() * k > BinaryMatrix::kMaxSide) {
    throw std::invalid_argument("expanded matrix exceeds the maximum side of " +
                                std::to_string(BinaryMatrix::kMaxSide));
  }
  BinaryMatrix out(m.rows() * k, m.cols() * k);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out.set(i, j, m.at(i / k, j / k));
  return out;
}

bool is_connected(const BinaryMatrix& m, int level, Surround surround) {
  if (level != 0 && level != 1) throw std::invalid_argument("level must be 0 or 1");
  const bool want = level == 1;
  // With a background the grid gets a one-pixel ring of zeros.
  const int pad = surround == Surround::kZeroBackground ? 1 : 0;
  const int rows = m.rows() + 2 * pad;
  const int cols = m.cols() + 2 * pad;
  auto value = [&](int r, int c) {
    const int i = r - pad;
    const int j = c - pad;
    if (i < 0 || i >= m.rows() || j < 0 || j >= m.cols()) return false;
    return m.at(i, j);
  };

  std::vector<char> seen(static_cast<std::size_t>(rows * cols), 0);
  std::vector<std::pair<int, int>> stack;
  int total = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m.at(i, j) == want) {
        ++total;
        if (total == 1) {
          stack.emplace_back(i + pad, j + pad);
          seen[(i + pad) * cols + j + pad] = 1;
        }
      }
  if (total == 0) return true;
  if (pad == 1 && !want) {
    stack.assign(1, {0, 0});
    std::fill(seen.begin(), seen.end(), 0);
    seen[0] = 1;
  }

  int reached = 0;
  while (!stack.empty()) {
    auto [r0, c0] = stack.back();
    stack.pop_back();
    const bool inside = r0 >= pad && r0 < rows - pad && c0 >= pad && c0 < cols - pad;
    reached += inside ? 1 : 0;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int r = r0 + di;
        const int c = c0 + dj;
        if (r < 0 || r >= rows || c < 0 || c >= cols) continue;
        if (seen[r * cols + c] || value(r, c) != want) continue;
        seen[r * cols + c] = 1;
        stack.emplace_back(r, c);
      }
    }
  }
  return reached == total;
}

bool is_diagonally_symmetric(const BinaryMatrix& m) {
  if (!m.is_square()) return false;
  return apply(Symmetry::kTranspose, m) == m || apply(Symmetry::kAntiTranspose, m) == m;
}

BinaryMatrix cross_mark(int side) {
  BinaryMatrix m(side, side);
  const int mid = side / 2;
  for (int t = 0; t < side; ++t) {
    m.set(mid, t, true);
    m.set(t, mid, true);
  }
  return m;
}

}  // namespace alignmark
