#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace alignmark {

/// Two-level M x N pattern. Row i is a bit word where bit j holds R(i, j);
/// bits at or beyond column N are always zero.
class BinaryMatrix {
 public:
  using Row = std::uint32_t;
  static constexpr int kMaxSide = 16;

  BinaryMatrix() = default;
  /// All-zero matrix. Throws std::invalid_argument outside [1, kMaxSide].
  BinaryMatrix(int rows, int cols);
  /// Throws when a word has bits set beyond `cols`.
  BinaryMatrix(int rows, int cols, std::span<const Row> words);

  /// Convenience constructor from nested 0/1 lists, mostly for tests.
  static BinaryMatrix from_rows(const std::vector<std::vector<int>>& cells);
  static BinaryMatrix all_ones(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  bool at(int i, int j) const { return (rows_words_[i] >> j) & 1u; }
  void set(int i, int j, bool value);

  Row row(int i) const { return rows_words_[i]; }
  std::span<const Row> words() const { return {rows_words_.data(), static_cast<std::size_t>(rows_)}; }
  Row column_mask() const { return cols_ == 32 ? ~Row{0} : ((Row{1} << cols_) - 1); }

  /// Number of ones; equals the autocorrelation peak.
  int popcount() const;

  /// Shape first, then row-major comparison of the bit words.
  std::strong_ordering operator<=>(const BinaryMatrix& other) const;
  bool operator==(const BinaryMatrix& other) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::array<Row, kMaxSide> rows_words_{};
};

/// Mirror of an N-bit row word (column j goes to column N-1-j).
BinaryMatrix::Row reverse_row(BinaryMatrix::Row word, int width);

/// The dihedral operations. Transposes and quarter turns are only valid for
/// square matrices.
enum class Symmetry {
  kIdentity,
  kRotate90,
  kRotate180,
  kRotate270,
  kFlipHorizontal,  // mirror columns (left <-> right)
  kFlipVertical,    // mirror rows (top <-> bottom)
  kTranspose,
  kAntiTranspose,
};

/// Shape-preserving operations for a rows x cols matrix: all eight when
/// square, otherwise {identity, horizontal flip, vertical flip, 180 rotation}.
std::span<const Symmetry> symmetry_group(int rows, int cols);

BinaryMatrix apply(Symmetry op, const BinaryMatrix& m);
BinaryMatrix transpose(const BinaryMatrix& m);

/// Distinct images of `m` under its symmetry group, sorted ascending.
std::vector<BinaryMatrix> symmetry_orbit(const BinaryMatrix& m);

/// Orbit minimum under operator<=>. Equal for every member of an orbit.
BinaryMatrix canonical_form(const BinaryMatrix& m);

/// Each cell becomes a k x k block. Throws for k == 0 or when the result
/// exceeds kMaxSide.
BinaryMatrix expand(const BinaryMatrix& m, int k);

enum class Surround {
  kNone,
  kZeroBackground,  // the matrix sits in an unbounded field of zeros
};

/// True when every pixel with value `level` belongs to a single 8-connected
/// component. Vacuously true when no pixel has that level. With
/// kZeroBackground, zero pixels may also connect through the surrounding field.
bool is_connected(const BinaryMatrix& m, int level, Surround surround = Surround::kNone);

/// Invariant under transpose or anti-transpose, i.e. some orientation of the
/// matrix equals its own transpose.
bool is_diagonally_symmetric(const BinaryMatrix& m);

/// Plus-shaped mark: middle row and middle column set.
BinaryMatrix cross_mark(int side);

}  // namespace alignmark
