#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "alignmark/simulate.hpp"

using namespace alignmark;

namespace {

const BinaryMatrix kOptimal3 = BinaryMatrix::from_rows({{1, 1, 1}, {1, 0, 1}, {1, 1, 1}});

TrialConfig small_config(const BinaryMatrix& mark, std::vector<double> snr, int trials) {
  TrialConfig c;
  c.mark = mark;
  c.expansion_k = 2;
  c.background_factor = 3;
  c.snr_db = std::move(snr);
  c.trials = trials;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("noise sigma from SNR") {
  CHECK(noise_sigma(0.0) == 1.0);
  CHECK(noise_sigma(20.0) == doctest::Approx(0.1));
  CHECK(noise_sigma(-20.0) == doctest::Approx(10.0));
  CHECK(noise_sigma(INFINITY) == 0.0);
}

TEST_CASE("SNR grid parsing") {
  CHECK(parse_snr_grid("-5:20:5") == std::vector<double>{-5, 0, 5, 10, 15, 20});
  CHECK(parse_snr_grid("3") == std::vector<double>{3});
  CHECK(parse_snr_grid("0:1:0.5,10, inf") == std::vector<double>{0, 0.5, 1, 10, INFINITY});
  CHECK(parse_snr_grid("-5:20:1").size() == 26);
  CHECK_THROWS_AS(parse_snr_grid(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("5:1:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("0:5:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_snr_grid("abc"), std::invalid_argument);
}

TEST_CASE("embedding places the expanded mark in the centre") {
  const Embedding one = embed(BinaryMatrix::from_rows({{1}}), 1, 3);
  CHECK(one.image.rows == 3);
  CHECK(one.row == 1);
  CHECK(one.col == 1);
  double total = 0;
  for (double v : one.image.pixels) total += v;
  CHECK(total == 1.0);
  CHECK(one.image(1, 1) == 1.0);

  const Embedding five = embed(cross_mark(5), 14, 5);
  CHECK(five.image.rows == 350);
  CHECK(five.image.cols == 350);
  CHECK(five.row == 140);
  const Embedding seven = embed(cross_mark(7), 10, 5);
  CHECK(seven.image.rows == 350);
  CHECK(seven.row == 140);

  // odd leftovers round toward the origin
  const Embedding odd = embed(BinaryMatrix::from_rows({{1, 1}}), 1, 2);
  CHECK(odd.image.cols == 4);
  CHECK(odd.col == 1);
  CHECK_THROWS_AS(embed(kOptimal3, 0, 5), std::invalid_argument);
}

TEST_CASE("detection of the clean image") {
  const Embedding e = embed(kOptimal3, 3, 4);
  TrialRng rng = trial_stream(1, 0, 0);
  const TrialOutcome o = detect(kOptimal3, 3, e.image, e.row, e.col, rng);
  CHECK(o.dx == 0);
  CHECK(o.dy == 0);
  CHECK_FALSE(o.misaligned);
  CHECK(o.tie_count == 1);
}

TEST_CASE("constant images tie everywhere and pick uniformly") {
  const BinaryMatrix mark = BinaryMatrix::from_rows({{1, 0}, {1, 1}});
  const Image flat(4, 5, 0.25);  // 3 x 4 contained shifts
  ExpandedCorrelator correlator(mark, 1);
  std::map<std::pair<int, int>, int> hits;
  const int draws = 12000;
  for (int t = 0; t < draws; ++t) {
    TrialRng rng = trial_stream(3, 0, static_cast<std::uint64_t>(t));
    const TrialOutcome o = detect(correlator, flat, 0, 0, rng);
    CHECK(o.tie_count == 12);
    ++hits[{o.dy, o.dx}];
  }
  REQUIRE(hits.size() == 12);
  // each cell expects 1000; 6 standard deviations is about 190
  for (const auto& [shift, n] : hits) CHECK(std::abs(n - 1000) < 190);
}

TEST_CASE("affine rescaling leaves the outcome unchanged") {
  const Embedding e = embed(kOptimal3, 2, 4);
  for (std::uint64_t t = 0; t < 200; ++t) {
    TrialRng noise = trial_stream(9, 1, t);
    Image noisy = e.image;
    // integer noise keeps every correlation value exact after rescaling
    for (double& v : noisy.pixels) v += static_cast<double>(noise() % 7) - 3.0;
    Image scaled = noisy;
    for (double& v : scaled.pixels) v = 4.0 * v - 2.5;

    TrialRng a = trial_stream(9, 2, t);
    TrialRng b = trial_stream(9, 2, t);
    const TrialOutcome x = detect(kOptimal3, 2, noisy, e.row, e.col, a);
    const TrialOutcome y = detect(kOptimal3, 2, scaled, e.row, e.col, b);
    CHECK(x.dx == y.dx);
    CHECK(x.dy == y.dy);
    CHECK(x.tie_count == y.tie_count);
  }
}

TEST_CASE("noise-free sweep never misaligns") {
  for (const BinaryMatrix& mark : {kOptimal3, cross_mark(5), BinaryMatrix::from_rows({{1}})}) {
    const auto points = run_sweep(small_config(mark, {INFINITY}, 50));
    REQUIRE(points.size() == 1);
    CHECK(points[0].misalign_rate == 0.0);
    CHECK(points[0].rms_dx == 0.0);
    CHECK(points[0].rms_dy == 0.0);
  }
  const RateEstimate clean = estimate_misalignment_probability(kOptimal3, INFINITY, 100, 1);
  CHECK(clean.rate == 0.0);
  CHECK(clean.standard_error == 0.0);
}

TEST_CASE("sweep is identical for any thread count") {
  TrialConfig c = small_config(kOptimal3, {-10, 0, 10}, 300);
  c.threads = 1;
  const std::string one = sweep_to_csv(run_sweep(c));
  c.threads = 4;
  CHECK(sweep_to_csv(run_sweep(c)) == one);
  c.seed = 8;
  CHECK(sweep_to_csv(run_sweep(c)) != one);
}

TEST_CASE("CSV layout") {
  const std::string csv = sweep_to_csv(run_sweep(small_config(kOptimal3, {0, 5}, 20)));
  CHECK(csv.rfind("snr_db,rms_dx,rms_dy,mean_abs_dx,mean_abs_dy,misalign_rate,misalign_stderr,trials\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("misalignment decreases with SNR") {
  TrialConfig c = small_config(kOptimal3, {-12, -6, 0, 6}, 2000);
  c.expansion_k = 1;
  c.background_factor = 5;
  const auto points = run_sweep(c);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double se = std::hypot(points[i].misalign_stderr, points[i - 1].misalign_stderr);
    CHECK(points[i].misalign_rate <= points[i - 1].misalign_rate + 3 * se);
    const double rms_se = std::hypot(points[i].rms_dx_stderr, points[i - 1].rms_dx_stderr);
    CHECK(points[i].rms_dx <= points[i - 1].rms_dx + 3 * rms_se);
  }
  CHECK(points.front().misalign_rate > points.back().misalign_rate);
}

TEST_CASE("regression: 3x3 optimum misalignment rate") {
  // Recorded from the first run of this configuration.
  const RateEstimate r = estimate_misalignment_probability(kOptimal3, -3.0, 4000, 20240611);
  CHECK(r.rate == 3101.0 / 4000.0);
  CHECK(r.standard_error == doctest::Approx(std::sqrt(r.rate * (1 - r.rate) / 4000)));
}

TEST_CASE("degenerate configurations are rejected") {
  TrialConfig empty = small_config(BinaryMatrix(3, 3), {0}, 10);
  CHECK_THROWS_AS(run_sweep(empty), std::invalid_argument);
  TrialConfig zero_k = small_config(kOptimal3, {0}, 10);
  zero_k.expansion_k = 0;
  CHECK_THROWS_AS(run_sweep(zero_k), std::invalid_argument);
  TrialConfig no_trials = small_config(kOptimal3, {0}, 0);
  CHECK_THROWS_AS(run_sweep(no_trials), std::invalid_argument);
  CHECK_THROWS_AS(estimate_misalignment_probability(kOptimal3, 0, 99, 1), std::invalid_argument);
}

TEST_CASE("the 5x5 optimum misaligns less than the 5x5 cross") {
  const BinaryMatrix opt5 =
      BinaryMatrix::from_rows({{1, 1, 0, 1, 1}, {1, 0, 1, 0, 1}, {1, 0, 1, 1, 0}, {1, 1, 0, 0, 1}, {1, 1, 1, 1, 1}});
  for (double snr : {-6.0, -3.0}) {
    CAPTURE(snr);
    const RateEstimate a = estimate_misalignment_probability(opt5, snr, 2000, 11, 2, 3);
    const RateEstimate b = estimate_misalignment_probability(cross_mark(5), snr, 2000, 11, 2, 3);
    CHECK(a.rate <= b.rate + 3 * std::hypot(a.standard_error, b.standard_error));
    MESSAGE("optimum " << a.rate << ", cross " << b.rate);
  }
}
