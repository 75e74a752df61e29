#include "alignmark/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

namespace alignmark {
namespace {

double parse_number(std::string_view token) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || end != token.data() + token.size() || token.empty()) {
    throw std::invalid_argument("bad SNR value '" + std::string(token) + "'");
  }
  return value;
}

void check_config(const TrialConfig& config) {
  if (config.mark.rows() < 1 || config.mark.cols() < 1) throw std::invalid_argument("empty mark");
  if (config.mark.popcount() == 0) throw std::invalid_argument("mark has no set pixels");
  if (config.expansion_k < 1) throw std::invalid_argument("expansion factor must be positive");
  if (config.background_factor < 1) throw std::invalid_argument("background factor must be positive");
  if (config.trials < 1) throw std::invalid_argument("trials must be positive");
  if (config.threads < 1) throw std::invalid_argument("threads must be positive");
}

struct Accumulator {
  double sum_dx2 = 0, sum_dy2 = 0, sum_dx4 = 0, sum_dy4 = 0;
  double sum_abs_dx = 0, sum_abs_dy = 0;
  std::int64_t misaligned = 0;
  std::int64_t tied = 0;

  void add(const TrialOutcome& o) {
    const double x2 = static_cast<double>(o.dx) * o.dx;
    const double y2 = static_cast<double>(o.dy) * o.dy;
    sum_dx2 += x2;
    sum_dy2 += y2;
    sum_dx4 += x2 * x2;
    sum_dy4 += y2 * y2;
    sum_abs_dx += std::abs(o.dx);
    sum_abs_dy += std::abs(o.dy);
    misaligned += o.misaligned ? 1 : 0;
    tied += o.tie_count > 1 ? 1 : 0;
  }
};

// Standard error of sqrt(mean(x^2)) from the first two moments of x^2.
double rms_stderr(double sum2, double sum4, double n) {
  const double mean2 = sum2 / n;
  if (mean2 <= 0.0 || n < 2) return 0.0;
  const double var2 = std::max(0.0, (sum4 / n - mean2 * mean2) * n / (n - 1));
  return std::sqrt(var2 / n) / (2.0 * std::sqrt(mean2));
}

}  // namespace

TrialRng trial_stream(std::uint64_t seed, std::uint64_t snr_index, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(snr_index), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32)};
  return TrialRng(seq);
}

double noise_sigma(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 20.0);
}

std::vector<double> parse_snr_grid(std::string_view text) {
  std::vector<double> grid;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

    const std::size_t c1 = item.find(':');
    if (c1 == std::string_view::npos) {
      grid.push_back(parse_number(item));
      continue;
    }
    const std::size_t c2 = item.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw std::invalid_argument("SNR range needs start:stop:step");
    const double start = parse_number(item.substr(0, c1));
    const double stop = parse_number(item.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_number(item.substr(c2 + 1));
    if (!(step > 0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start) {
      throw std::invalid_argument("SNR range needs finite start <= stop and a positive step");
    }
    const double slack = step * 1e-9;
    for (int i = 0;; ++i) {
      const double value = start + i * step;
      if (value > stop + slack) break;
      grid.push_back(value);
    }
  }
  if (grid.empty()) throw std::invalid_argument("empty SNR grid");
  return grid;
}

Embedding embed(const BinaryMatrix& mark, int expansion_k, int background_factor) {
  if (expansion_k < 1 || background_factor < 1) {
    throw std::invalid_argument("expansion and background factors must be positive");
  }
  const int mark_rows = mark.rows() * expansion_k;
  const int mark_cols = mark.cols() * expansion_k;
  Embedding out;
  out.image = Image(mark_rows * background_factor, mark_cols * background_factor);
  out.row = (out.image.rows - mark_rows) / 2;
  out.col = (out.image.cols - mark_cols) / 2;
  for (int i = 0; i < mark_rows; ++i)
    for (int j = 0; j < mark_cols; ++j)
      if (mark.at(i / expansion_k, j / expansion_k)) out.image(out.row + i, out.col + j) = 1.0;
  return out;
}

TrialOutcome detect(ExpandedCorrelator& correlator, const Image& image, int true_row, int true_col,
                    TrialRng& rng) {
  const CrosscorrelationMap& map = correlator(image);
  const std::span<const double> values = map.values();
  const double top = *std::max_element(values.begin(), values.end());

  int ties = 0;
  for (double v : values) ties += v == top ? 1 : 0;
  int pick = 0;
  if (ties > 1) pick = boost::random::uniform_int_distribution<int>(0, ties - 1)(rng);

  std::size_t index = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == top && pick-- == 0) {
      index = i;
      break;
    }
  }
  const int width = map.grid_cols();
  const int row = map.tau1_min() + static_cast<int>(index / width);
  const int col = map.tau2_min() + static_cast<int>(index % width);

  TrialOutcome outcome;
  outcome.dx = col - true_col;
  outcome.dy = row - true_row;
  outcome.misaligned = outcome.dx != 0 || outcome.dy != 0;
  outcome.tie_count = ties;
  return outcome;
}

TrialOutcome detect(const BinaryMatrix& mark, int expansion_k, const Image& image, int true_row,
                    int true_col, TrialRng& rng) {
  ExpandedCorrelator correlator(mark, expansion_k);
  return detect(correlator, image, true_row, true_col, rng);
}

std::vector<SweepPoint> run_sweep(const TrialConfig& config) {
  check_config(config);
  const Embedding clean = embed(config.mark, config.expansion_k, config.background_factor);
  const auto trials = static_cast<std::size_t>(config.trials);

  std::vector<SweepPoint> points;
  std::vector<TrialOutcome> outcomes(trials);
  for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
    const double sigma = noise_sigma(config.snr_db[s]);

    auto work = [&](std::size_t first, std::size_t stride) {
      ExpandedCorrelator correlator(config.mark, config.expansion_k);
      Image noisy = clean.image;
      for (std::size_t t = first; t < trials; t += stride) {
        TrialRng rng = trial_stream(config.seed, s, t);
        if (sigma > 0.0) {
          boost::random::normal_distribution<double> gauss(0.0, 1.0);
          for (std::size_t i = 0; i < noisy.pixels.size(); ++i) {
            noisy.pixels[i] = clean.image.pixels[i] + sigma * gauss(rng);
          }
        }
        outcomes[t] = detect(correlator, noisy, clean.row, clean.col, rng);
      }
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), trials);
    if (workers <= 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
      for (auto& th : pool) th.join();
    }

    Accumulator acc;
    for (const TrialOutcome& o : outcomes) acc.add(o);
    const double n = static_cast<double>(trials);
    SweepPoint point;
    point.snr_db = config.snr_db[s];
    point.sigma = sigma;
    point.trials = config.trials;
    point.rms_dx = std::sqrt(acc.sum_dx2 / n);
    point.rms_dy = std::sqrt(acc.sum_dy2 / n);
    point.mean_abs_dx = acc.sum_abs_dx / n;
    point.mean_abs_dy = acc.sum_abs_dy / n;
    point.misalign_rate = static_cast<double>(acc.misaligned) / n;
    point.misalign_stderr = std::sqrt(point.misalign_rate * (1.0 - point.misalign_rate) / n);
    point.rms_dx_stderr = rms_stderr(acc.sum_dx2, acc.sum_dx4, n);
    point.rms_dy_stderr = rms_stderr(acc.sum_dy2, acc.sum_dy4, n);
    point.tied_trials = acc.tied;
    points.push_back(point);
  }
  return points;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::string out = "snr_db,rms_dx,rms_dy,mean_abs_dx,mean_abs_dy,misalign_rate,misalign_stderr,trials\n";
  for (const SweepPoint& p : points) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", p.snr_db, p.rms_dx, p.rms_dy, p.mean_abs_dx,
                       p.mean_abs_dy, p.misalign_rate, p.misalign_stderr, p.trials);
  }
  return out;
}

RateEstimate estimate_misalignment_probability(const BinaryMatrix& mark, double snr_db, int trials,
                                               std::uint64_t seed, int expansion_k,
                                               int background_factor, int threads) {
  if (trials < 100) throw std::invalid_argument("misalignment estimate needs at least 100 trials");
  TrialConfig config;
  config.mark = mark;
  config.expansion_k = expansion_k;
  config.background_factor = background_factor;
  config.snr_db = {snr_db};
  config.trials = trials;
  config.seed = seed;
  config.threads = threads;
  const SweepPoint point = run_sweep(config).front();
  return {point.misalign_rate, point.misalign_stderr};
}

}  // namespace alignmark
