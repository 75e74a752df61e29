#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alignmark/matrix.hpp"
#include "alignmark/spectrum.hpp"

namespace alignmark {

enum class SymmetryRestriction {
  kNone,
  kDiagonal,  // only matrices equal to their transpose
};

struct SearchConfig {
  int rows = 0;
  int cols = 0;
  SymmetryRestriction restriction = SymmetryRestriction::kNone;
  /// Ranked max-d1 classes to keep in the report; 0 keeps all of them.
  int top_k = 3;
  /// Prefix rows used to split the space into independent work items.
  int partition_depth = 1;
  /// Track s_min(p) over every enumerated matrix.
  bool per_p = false;
  int threads = 1;

  /// Horizontal-flip prefix pruning (unrestricted searches only).
  bool flip_pruning = true;
  /// Spiral early exit on complete matrices. Off evaluates every sidelobe.
  bool spiral_early_exit = true;

  /// Searches estimated above this many complete matrices need `force`.
  double leaf_budget = 8.6e9;
  bool force = false;

  /// When non-empty, each finished prefix is written here and skipped on rerun.
  std::string checkpoint_dir;
  /// Candidates held in memory per worker before spilling to a temp file.
  std::size_t candidate_cap = std::size_t{1} << 20;
};

struct RankedMatrix {
  BinaryMatrix matrix;  // canonical form
  DistanceSpectrum spectrum;
  int orbit_size = 1;
};

struct CurvePoint {
  int p = 0;
  /// Minimum highest sidelobe over all enumerated matrices with p ones.
  /// Only filled when per_p is on.
  std::optional<int> s_min;
  /// Symmetry classes with p ones attaining the global maximum d1.
  std::int64_t classes = 0;
  /// The same count without identifying symmetric images.
  std::int64_t raw = 0;
};

/// Counters that depend on scheduling (stale shared maxima admit extra
/// candidates) are kept apart from the deterministic report fields.
struct SearchStats {
  std::uint64_t nodes = 0;   // rows placed, deterministic
  std::uint64_t leaves = 0;  // complete matrices, deterministic
  std::uint64_t sidelobe_evaluations = 0;
  std::uint64_t candidates_retained = 0;
  std::uint64_t prefixes = 0;
  std::uint64_t prefixes_resumed = 0;
  double seconds = 0.0;
};

struct SearchReport {
  int rows = 0;
  int cols = 0;
  SymmetryRestriction restriction = SymmetryRestriction::kNone;
  int best_d1 = 0;
  std::vector<RankedMatrix> optima;  // best first, at most top_k
  std::int64_t optimal_classes = 0;  // all classes attaining best_d1
  /// The top class strictly outranks the runner-up.
  bool unique_optimum = true;
  bool per_p = false;
  std::vector<CurvePoint> curve;  // index p in [0, rows * cols]
  SearchStats stats;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complete matrices the search would visit.
double estimated_leaves(const SearchConfig& config);

/// Throws std::invalid_argument for a malformed config and BudgetExceeded
/// when the estimate is above leaf_budget without force.
SearchReport search(const SearchConfig& config);

/// True when the mirrored prefix (columns reversed) reads smaller than the
/// prefix as 0/1 text, row by row. Exactly one of a non-palindromic pair is
/// pruned.
bool flip_prune(std::span<const BinaryMatrix::Row> prefix, int width);

/// Non-zero shifts of the half plane (tau1 > 0, or tau1 == 0 and tau2 > 0),
/// ring by ring outward from the peak. Inversion symmetry covers the rest.
std::vector<std::pair<int, int>> spiral_order(int rows, int cols);

/// True iff p - A(tau) >= threshold_d1 for every sidelobe. Sidelobes are
/// visited in spiral order and the first failure ends the scan. When
/// `visited` is given it receives the number of shifts examined.
bool spiral_d1_check(const BinaryMatrix& m, int threshold_d1, int* visited = nullptr);

struct PrefixAssignment {
  std::vector<BinaryMatrix::Row> rows;
  bool flip_tied = true;  // prefix still equals its mirror image
};

/// Every surviving prefix of partition_depth rows, in enumeration order.
/// Depth 0 yields a single empty prefix.
std::vector<PrefixAssignment> partition_work(const SearchConfig& config);

const char* to_string(SymmetryRestriction restriction);

}  // namespace alignmark
