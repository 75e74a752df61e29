#include "alignmark/spectrum.hpp"

#include <numeric>
#include <stdexcept>

namespace alignmark {

std::int64_t DistanceSpectrum::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

DistanceSpectrum spectrum_of(const AutocorrelationMap& a) {
  const int rows = a.source_rows();
  const int cols = a.source_cols();
  const int p = a.peak();
  for (int t1 = -(rows - 1); t1 < rows; ++t1) {
    for (int t2 = -(cols - 1); t2 < cols; ++t2) {
      const int v = a(t1, t2);
      if (v < 0 || v > p || v != a(-t1, -t2)) {
        throw std::invalid_argument("map is not an autocorrelation (peak must dominate and be centred)");
      }
    }
  }

  DistanceSpectrum spectrum;
  spectrum.p = p;
  spectrum.s = a.max_sidelobe();
  spectrum.d1 = p - spectrum.s;
  spectrum.counts.assign(static_cast<std::size_t>(spectrum.s) + 1, 0);
  for (int t1 = -(rows - 1); t1 < rows; ++t1) {
    for (int t2 = -(cols - 1); t2 < cols; ++t2) {
      if (t1 == 0 && t2 == 0) continue;
      // distance p - v maps to bin (p - v) - d1 = s - v
      ++spectrum.counts[spectrum.s - a(t1, t2)];
    }
  }
  return spectrum;
}

std::weak_ordering rank_order(const DistanceSpectrum& a, const DistanceSpectrum& b) {
  if (a.d1 != b.d1) return a.d1 > b.d1 ? std::weak_ordering::less : std::weak_ordering::greater;
  const std::size_t n = std::max(a.counts.size(), b.counts.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t x = i < a.counts.size() ? a.counts[i] : 0;
    const std::int64_t y = i < b.counts.size() ? b.counts[i] : 0;
    if (x != y) return x < y ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  return std::weak_ordering::equivalent;
}

std::string to_string(const DistanceSpectrum& spectrum) {
  std::string out = "{" + std::to_string(spectrum.d1) + " |";
  for (std::size_t i = 0; i < spectrum.counts.size(); ++i) {
    out += (i == 0 ? " " : ", ") + std::to_string(spectrum.counts[i]);
  }
  return out + "}";
}

Rational sharpness(const BinaryMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("sharpness is defined for square matrices");
  const auto d1 = static_cast<std::int64_t>(spectrum_of(m).d1);
  const std::int64_t side = m.cols();
  const std::int64_t g = std::gcd(d1, side);
  return {d1 / g, side / g};
}

}  // namespace alignmark
