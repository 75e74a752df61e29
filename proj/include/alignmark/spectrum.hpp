#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "alignmark/correlation.hpp"
#include "alignmark/matrix.hpp"

namespace alignmark {

/// Peak-sidelobe distance histogram {d1 | n1, n2, ..., n_(s+1)}.
/// counts[i] is the number of sidelobe cells at distance d1 + i from the
/// peak; the last bin (distance p) holds the zero-valued sidelobes.
struct DistanceSpectrum {
  int p = 0;
  int s = 0;
  int d1 = 0;
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
  bool operator==(const DistanceSpectrum&) const = default;
};

/// Throws std::invalid_argument when `a` is not an autocorrelation (peak not
/// the maximum, or not inversion-symmetric).
DistanceSpectrum spectrum_of(const AutocorrelationMap& a);

inline DistanceSpectrum spectrum_of(const BinaryMatrix& m) { return spectrum_of(autocorrelate(m)); }

/// Ranking order: `less` means `a` ranks above `b` (larger d1, then smaller
/// n_i at the first difference). Missing trailing bins count as zero.
std::weak_ordering rank_order(const DistanceSpectrum& a, const DistanceSpectrum& b);

inline bool ranks_above(const DistanceSpectrum& a, const DistanceSpectrum& b) {
  return rank_order(a, b) < 0;
}

/// "{d1 | n1, n2, ...}"
std::string to_string(const DistanceSpectrum& spectrum);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const Rational&) const = default;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Lambda = d1 / N for a square matrix, reduced. Throws for non-square input.
Rational sharpness(const BinaryMatrix& m);

}  // namespace alignmark
