#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "alignmark/matrix.hpp"

namespace alignmark {

/// Integer aperiodic autocorrelation over shifts
/// tau1 in [-(M-1), M-1], tau2 in [-(N-1), N-1], stored row-major with the
/// zero shift at the grid centre.
class AutocorrelationMap {
 public:
  AutocorrelationMap(int rows, int cols);

  int source_rows() const { return rows_; }
  int source_cols() const { return cols_; }
  int grid_rows() const { return 2 * rows_ - 1; }
  int grid_cols() const { return 2 * cols_ - 1; }

  int operator()(int tau1, int tau2) const { return values_[index(tau1, tau2)]; }
  int& operator()(int tau1, int tau2) { return values_[index(tau1, tau2)]; }

  std::span<const int> values() const { return values_; }

  int peak() const { return (*this)(0, 0); }
  /// Largest value over non-zero shifts; 0 when there are none (1x1 source).
  int max_sidelobe() const;

 private:
  std::size_t index(int tau1, int tau2) const {
    return static_cast<std::size_t>(tau1 + rows_ - 1) * grid_cols() + (tau2 + cols_ - 1);
  }

  int rows_;
  int cols_;
  std::vector<int> values_;
};

AutocorrelationMap autocorrelate(const BinaryMatrix& m);

/// Overlap count between row_a and row_b shifted by tau2:
/// popcount(a & shift(b, tau2)) where shift moves column j + tau2 onto j.
inline int row_overlap(BinaryMatrix::Row a, BinaryMatrix::Row b, int tau2) {
  const BinaryMatrix::Row shifted = tau2 >= 0 ? (b >> tau2) : (b << -tau2);
  return __builtin_popcount(a & shifted);
}

/// Overlap counts for every tau2 in [-(width-1), width-1], index tau2 + width - 1.
std::vector<int> row_correlation_table(BinaryMatrix::Row row_a, BinaryMatrix::Row row_b, int width);

/// Dense real-valued image, row-major.
struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int r, int c, double fill = 0.0)
      : rows(r), cols(c), pixels(static_cast<std::size_t>(r) * c, fill) {}

  double operator()(int i, int j) const { return pixels[static_cast<std::size_t>(i) * cols + j]; }
  double& operator()(int i, int j) { return pixels[static_cast<std::size_t>(i) * cols + j]; }
};

/// Real crosscorrelation C(tau1, tau2) = sum R(i,j) D(i+tau1, j+tau2) over an
/// inclusive rectangle of shifts.
class CrosscorrelationMap {
 public:
  CrosscorrelationMap(int tau1_min, int tau1_max, int tau2_min, int tau2_max);

  int tau1_min() const { return tau1_min_; }
  int tau1_max() const { return tau1_max_; }
  int tau2_min() const { return tau2_min_; }
  int tau2_max() const { return tau2_max_; }
  int grid_cols() const { return tau2_max_ - tau2_min_ + 1; }

  double operator()(int tau1, int tau2) const { return values_[index(tau1, tau2)]; }
  double& operator()(int tau1, int tau2) { return values_[index(tau1, tau2)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Every shift attaining the maximum, in row-major order.
  std::vector<std::pair<int, int>> argmax() const;

 private:
  std::size_t index(int tau1, int tau2) const {
    return static_cast<std::size_t>(tau1 - tau1_min_) * grid_cols() + (tau2 - tau2_min_);
  }

  int tau1_min_;
  int tau1_max_;
  int tau2_min_;
  int tau2_max_;
  std::vector<double> values_;
};

enum class ShiftDomain {
  kOverlapping,  // any placement sharing at least one row and column with the data
  kContained,    // reference fully inside the data
};

/// Direct-summation crosscorrelation of a binary reference against a data
/// image. Throws std::invalid_argument for empty data or, in kContained mode,
/// data smaller than the reference.
CrosscorrelationMap crosscorrelate(const BinaryMatrix& reference, const Image& data,
                                   ShiftDomain domain = ShiftDomain::kOverlapping);

/// Crosscorrelation of expand(reference, k) against data images over
/// contained shifts, without materialising the expanded reference (so the
/// expanded side may exceed BinaryMatrix::kMaxSide). Each output is the sum of
/// k x k box sums taken in a fixed order, so equal inputs give bit-identical
/// values at every shift. Buffers are reused across calls; one instance per
/// thread.
class ExpandedCorrelator {
 public:
  ExpandedCorrelator(const BinaryMatrix& reference, int k);

  /// The returned map stays valid until the next call.
  const CrosscorrelationMap& operator()(const Image& data);

  int expanded_rows() const { return reference_.rows() * k_; }
  int expanded_cols() const { return reference_.cols() * k_; }

 private:
  BinaryMatrix reference_;
  int k_;
  std::vector<std::pair<int, int>> cells_;
  std::vector<double> horizontal_;
  std::vector<double> box_;
  CrosscorrelationMap map_{0, 0, 0, 0};
};

inline CrosscorrelationMap crosscorrelate_expanded(const BinaryMatrix& reference, int k, const Image& data) {
  ExpandedCorrelator correlator(reference, k);
  return correlator(data);
}

}  // namespace alignmark
