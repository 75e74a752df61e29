#include "alignmark/correlation.hpp"

#include <algorithm>
#include <stdexcept>

namespace alignmark {

AutocorrelationMap::AutocorrelationMap(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      values_(static_cast<std::size_t>(2 * rows - 1) * (2 * cols - 1), 0) {}

int AutocorrelationMap::max_sidelobe() const {
  int best = 0;
  const std::size_t centre = index(0, 0);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i != centre) best = std::max(best, values_[i]);
  }
  return best;
}

AutocorrelationMap autocorrelate(const BinaryMatrix& m) {
  const int rows = m.rows();
  const int cols = m.cols();
  AutocorrelationMap map(rows, cols);
  // Fill tau1 >= 0 from row kernels, mirror the rest.
  for (int tau1 = 0; tau1 < rows; ++tau1) {
    for (int tau2 = -(cols - 1); tau2 < cols; ++tau2) {
      int sum = 0;
      for (int i = 0; i + tau1 < rows; ++i) sum += row_overlap(m.row(i), m.row(i + tau1), tau2);
      map(tau1, tau2) = sum;
      map(-tau1, -tau2) = sum;
    }
  }
  return map;
}

std::vector<int> row_correlation_table(BinaryMatrix::Row row_a, BinaryMatrix::Row row_b, int width) {
  if (width < 1 || width > BinaryMatrix::kMaxSide) throw std::invalid_argument("bad row width");
  const BinaryMatrix::Row mask = (BinaryMatrix::Row{1} << width) - 1;
  if ((row_a & ~mask) || (row_b & ~mask)) throw std::invalid_argument("row word wider than width");
  std::vector<int> table(static_cast<std::size_t>(2 * width - 1));
  for (int tau2 = -(width - 1); tau2 < width; ++tau2) {
    table[tau2 + width - 1] = row_overlap(row_a, row_b, tau2);
  }
  return table;
}

CrosscorrelationMap::CrosscorrelationMap(int tau1_min, int tau1_max, int tau2_min, int tau2_max)
    : tau1_min_(tau1_min),
      tau1_max_(tau1_max),
      tau2_min_(tau2_min),
      tau2_max_(tau2_max),
      values_(static_cast<std::size_t>(tau1_max - tau1_min + 1) * (tau2_max - tau2_min + 1), 0.0) {}

std::vector<std::pair<int, int>> CrosscorrelationMap::argmax() const {
  std::vector<std::pair<int, int>> best;
  if (values_.empty()) return best;
  const double top = *std::max_element(values_.begin(), values_.end());
  for (int t1 = tau1_min_; t1 <= tau1_max_; ++t1)
    for (int t2 = tau2_min_; t2 <= tau2_max_; ++t2)
      if ((*this)(t1, t2) == top) best.emplace_back(t1, t2);
  return best;
}

CrosscorrelationMap crosscorrelate(const BinaryMatrix& reference, const Image& data, ShiftDomain domain) {
  if (data.rows < 1 || data.cols < 1) throw std::invalid_argument("empty data image");
  const int rows = reference.rows();
  const int cols = reference.cols();

  int t1_lo = -(rows - 1), t1_hi = data.rows - 1;
  int t2_lo = -(cols - 1), t2_hi = data.cols - 1;
  if (domain == ShiftDomain::kContained) {
    if (data.rows < rows || data.cols < cols) {
      throw std::invalid_argument("data image smaller than the reference");
    }
    t1_lo = 0;
    t2_lo = 0;
    t1_hi = data.rows - rows;
    t2_hi = data.cols - cols;
  }

  CrosscorrelationMap map(t1_lo, t1_hi, t2_lo, t2_hi);
  for (int t1 = t1_lo; t1 <= t1_hi; ++t1) {
    for (int t2 = t2_lo; t2 <= t2_hi; ++t2) {
      double sum = 0.0;
      for (int i = 0; i < rows; ++i) {
        const int r = i + t1;
        if (r < 0 || r >= data.rows) continue;
        for (int j = 0; j < cols; ++j) {
          const int c = j + t2;
          if (c < 0 || c >= data.cols || !reference.at(i, j)) continue;
          sum += data(r, c);
        }
      }
      map(t1, t2) = sum;
    }
  }
  return map;
}

ExpandedCorrelator::ExpandedCorrelator(const BinaryMatrix& reference, int k)
    : reference_(reference), k_(k) {
  if (k < 1) throw std::invalid_argument("expansion factor must be positive");
  for (int a = 0; a < reference.rows(); ++a)
    for (int b = 0; b < reference.cols(); ++b)
      if (reference.at(a, b)) cells_.emplace_back(a, b);
}

const CrosscorrelationMap& ExpandedCorrelator::operator()(const Image& data) {
  const int k = k_;
  if (data.rows < 1 || data.cols < 1) throw std::invalid_argument("empty data image");
  if (data.rows < expanded_rows() || data.cols < expanded_cols()) {
    throw std::invalid_argument("data image smaller than the expanded reference");
  }

  const int hcols = data.cols - k + 1;
  horizontal_.assign(static_cast<std::size_t>(data.rows) * hcols, 0.0);
  for (int x = 0; x < data.rows; ++x) {
    double* out = horizontal_.data() + static_cast<std::size_t>(x) * hcols;
    const double* in = data.pixels.data() + static_cast<std::size_t>(x) * data.cols;
    for (int v = 0; v < k; ++v)
      for (int y = 0; y < hcols; ++y) out[y] += in[y + v];
  }
  const int brows = data.rows - k + 1;
  box_.assign(static_cast<std::size_t>(brows) * hcols, 0.0);
  for (int x = 0; x < brows; ++x) {
    double* out = box_.data() + static_cast<std::size_t>(x) * hcols;
    for (int u = 0; u < k; ++u) {
      const double* in = horizontal_.data() + static_cast<std::size_t>(x + u) * hcols;
      for (int y = 0; y < hcols; ++y) out[y] += in[y];
    }
  }

  const int t1_hi = data.rows - expanded_rows();
  const int t2_hi = data.cols - expanded_cols();
  if (map_.tau1_max() != t1_hi || map_.tau2_max() != t2_hi) {
    map_ = CrosscorrelationMap(0, t1_hi, 0, t2_hi);
  } else {
    std::fill(map_.values().begin(), map_.values().end(), 0.0);
  }
  const int width = t2_hi + 1;
  double* values = map_.values().data();
  // set cells are summed in row-major order for every shift
  for (int t1 = 0; t1 <= t1_hi; ++t1) {
    double* out = values + static_cast<std::size_t>(t1) * width;
    for (const auto& [a, b] : cells_) {
      const double* in = box_.data() + static_cast<std::size_t>(t1 + a * k) * hcols + b * k;
      for (int t2 = 0; t2 < width; ++t2) out[t2] += in[t2];
    }
  }
  return map_;
}

}  // namespace alignmark
