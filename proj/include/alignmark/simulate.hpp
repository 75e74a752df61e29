#pragma once

#include <cstdint>
#include <random>

#include <boost/random/mersenne_twister.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "alignmark/correlation.hpp"
#include "alignmark/matrix.hpp"

namespace alignmark {

/// Per-trial random stream.
using TrialRng = boost::random::mt19937_64;

/// Independent stream for trial `trial` at SNR index `snr_index`.
TrialRng trial_stream(std::uint64_t seed, std::uint64_t snr_index, std::uint64_t trial);

/// Noise standard deviation for a unit-amplitude mark: 10^(-snr_db / 20);
/// +inf dB gives 0.
double noise_sigma(double snr_db);

/// "start:stop:step" (inclusive), a single value, or a comma-separated list of
/// either. "inf" denotes a noise-free point.
std::vector<double> parse_snr_grid(std::string_view text);

struct Embedding {
  Image image;
  int row = 0;  // top-left of the expanded mark
  int col = 0;
};

/// Expanded mark centred in a zero background whose sides are
/// background_factor times the expanded sides. Odd leftovers round the
/// offset toward the origin.
Embedding embed(const BinaryMatrix& mark, int expansion_k, int background_factor);

struct TrialOutcome {
  int dx = 0;  // column displacement of the detected peak
  int dy = 0;  // row displacement
  bool misaligned = false;
  int tie_count = 1;
};

/// Locates expand(mark, k) in `image` by crosscorrelation over contained
/// shifts. Tied maxima are resolved by a uniform draw from `rng`.
TrialOutcome detect(ExpandedCorrelator& correlator, const Image& image, int true_row, int true_col,
                    TrialRng& rng);

TrialOutcome detect(const BinaryMatrix& mark, int expansion_k, const Image& image, int true_row,
                    int true_col, TrialRng& rng);

struct TrialConfig {
  BinaryMatrix mark;
  int expansion_k = 1;
  int background_factor = 5;
  std::vector<double> snr_db;
  int trials = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SweepPoint {
  double snr_db = 0.0;
  double sigma = 0.0;
  int trials = 0;
  double rms_dx = 0.0;
  double rms_dy = 0.0;
  double mean_abs_dx = 0.0;
  double mean_abs_dy = 0.0;
  double misalign_rate = 0.0;
  double misalign_stderr = 0.0;
  // delta-method standard errors of the RMS values
  double rms_dx_stderr = 0.0;
  double rms_dy_stderr = 0.0;
  std::int64_t tied_trials = 0;
};

/// Monte-Carlo alignment sweep. Results are identical for any thread count.
std::vector<SweepPoint> run_sweep(const TrialConfig& config);

/// CSV with columns snr_db, rms_dx, rms_dy, mean_abs_dx, mean_abs_dy,
/// misalign_rate, misalign_stderr, trials.
std::string sweep_to_csv(const std::vector<SweepPoint>& points);

struct RateEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
};

/// Fraction of trials whose detected peak is displaced, with its binomial
/// standard error. Requires trials >= 100.
RateEstimate estimate_misalignment_probability(const BinaryMatrix& mark, double snr_db, int trials,
                                               std::uint64_t seed, int expansion_k = 1,
                                               int background_factor = 5, int threads = 1);

}  // namespace alignmark
