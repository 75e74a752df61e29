#include "alignmark/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "alignmark/correlation.hpp"

namespace alignmark {
namespace {

using Row = BinaryMatrix::Row;
constexpr int kNoSidelobe = INT_MAX;

const std::array<std::uint16_t, 1 << 16>& reverse16_table() {
  static const auto table = [] {
    std::array<std::uint16_t, 1 << 16> t{};
    for (std::uint32_t w = 0; w < t.size(); ++w) t[w] = static_cast<std::uint16_t>(reverse_row(w, 16));
    return t;
  }();
  return table;
}

inline Row mirror(Row word, int width) {
  return static_cast<Row>(reverse16_table()[word]) >> (16 - width);
}

// a < b when both are read as 0/1 text, column 0 first.
inline bool text_less(Row a, Row b) {
  const Row diff = a ^ b;
  if (diff == 0) return false;
  return ((a >> std::countr_zero(diff)) & 1u) == 0;
}

struct Shift {
  int tau1;
  int tau2;
};

std::vector<Shift> evaluation_shifts(const SearchConfig& config) {
  std::vector<Shift> shifts;
  const auto order = spiral_order(config.rows, config.cols);
  if (config.restriction == SymmetryRestriction::kNone) {
    for (auto [t1, t2] : order) shifts.push_back({t1, t2});
    return shifts;
  }
  // Symmetric matrices have A(t1, t2) == A(t2, t1); keep one shift per pair.
  std::set<std::pair<int, int>> kept;
  for (auto [t1, t2] : order) {
    int s1 = t2, s2 = t1;
    if (s1 < 0 || (s1 == 0 && s2 < 0)) {
      s1 = -s1;
      s2 = -s2;
    }
    if (kept.count({s1, s2})) continue;
    kept.insert({t1, t2});
    shifts.push_back({t1, t2});
  }
  return shifts;
}

void validate(const SearchConfig& config) {
  if (config.rows < 1 || config.cols < 1 || config.rows > BinaryMatrix::kMaxSide ||
      config.cols > BinaryMatrix::kMaxSide) {
    throw std::invalid_argument("search dimensions must lie in [1, 16]");
  }
  if (config.restriction == SymmetryRestriction::kDiagonal && config.rows != config.cols) {
    throw std::invalid_argument("diagonal restriction requires a square matrix");
  }
  if (config.partition_depth < 0 || config.partition_depth >= config.rows) {
    throw std::invalid_argument("partition depth must lie in [0, rows - 1]");
  }
  if (config.top_k < 0) throw std::invalid_argument("top_k must be non-negative");
  if (config.threads < 1) throw std::invalid_argument("threads must be positive");
}

// Prefix enumeration shared by partition_work and the node counter.
template <typename Visit>
std::uint64_t enumerate_prefixes(const SearchConfig& config, int depth, Visit&& visit) {
  const int width = config.cols;
  const Row mask = (Row{1} << width) - 1;
  const bool diagonal = config.restriction == SymmetryRestriction::kDiagonal;
  std::vector<Row> rows(static_cast<std::size_t>(depth));
  std::uint64_t nodes = 0;

  auto rec = [&](auto&& self, int d, bool tied) -> void {
    if (d == depth) {
      visit(rows, tied);
      return;
    }
    if (diagonal) {
      Row fixed = 0;
      for (int j = 0; j < d; ++j) fixed |= ((rows[j] >> d) & 1u) << j;
      const Row free_count = Row{1} << (width - d);
      for (Row x = 0; x < free_count; ++x) {
        rows[d] = fixed | (x << d);
        ++nodes;
        self(self, d + 1, tied);
      }
      return;
    }
    for (Row r = 0; r <= mask; ++r) {
      bool next_tied = tied;
      if (config.flip_pruning && tied) {
        const Row rev = mirror(r, width);
        if (text_less(rev, r)) continue;
        next_tied = rev == r;
      }
      rows[d] = r;
      ++nodes;
      self(self, d + 1, next_tied);
    }
  };
  rec(rec, 0, true);
  return nodes;
}

struct Candidate {
  std::array<std::uint16_t, BinaryMatrix::kMaxSide> rows{};
  std::int16_t d1 = 0;
};

// Candidates in memory up to a cap, the overflow in an anonymous temp file.
class CandidateStore {
 public:
  explicit CandidateStore(std::size_t cap) : cap_(std::max<std::size_t>(cap, 1)) {}

  void add(const Candidate& c) {
    if (memory_.size() < cap_) {
      memory_.push_back(c);
      return;
    }
    if (!spill_) {
      spill_.reset(std::tmpfile());
      if (!spill_) throw std::runtime_error("cannot open candidate spill file");
    }
    if (std::fwrite(&c, sizeof c, 1, spill_.get()) != 1) {
      throw std::runtime_error("candidate spill write failed");
    }
    ++spilled_;
  }

  void clear() {
    memory_.clear();
    spill_.reset();
    spilled_ = 0;
  }

  std::size_t size() const { return memory_.size() + spilled_; }

  std::vector<Candidate> drain() {
    std::vector<Candidate> out = std::move(memory_);
    if (spill_) {
      std::rewind(spill_.get());
      Candidate c;
      for (std::size_t i = 0; i < spilled_; ++i) {
        if (std::fread(&c, sizeof c, 1, spill_.get()) != 1) {
          throw std::runtime_error("candidate spill read failed");
        }
        out.push_back(c);
      }
    }
    clear();
    return out;
  }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
  };
  std::size_t cap_;
  std::vector<Candidate> memory_;
  std::unique_ptr<std::FILE, FileCloser> spill_;
  std::size_t spilled_ = 0;
};

struct SubtreeResult {
  int best_d1 = -1;                    // among retained candidates
  std::vector<Candidate> candidates;   // all with d1 == best_d1
  std::vector<int> s_min;              // per p, kNoSidelobe when unseen
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t retained = 0;
};

class SubtreeSearcher {
 public:
  SubtreeSearcher(const SearchConfig& config, std::span<const Shift> shifts,
                  std::atomic<int>& shared_best)
      : config_(config),
        shifts_(shifts),
        shared_best_(shared_best),
        rows_count_(config.rows),
        width_(config.cols),
        mask_((Row{1} << config.cols) - 1),
        diagonal_(config.restriction == SymmetryRestriction::kDiagonal),
        store_(config.candidate_cap),
        base_(shifts.size(), 0) {}

  SubtreeResult run(const PrefixAssignment& prefix) {
    result_ = SubtreeResult{};
    result_.s_min.assign(static_cast<std::size_t>(rows_count_ * width_) + 1, kNoSidelobe);
    local_best_ = -1;
    refresh_threshold();

    int pop = 0;
    const int depth = static_cast<int>(prefix.rows.size());
    for (int i = 0; i < depth; ++i) {
      rows_[i] = prefix.rows[i];
      pop += std::popcount(prefix.rows[i]);
    }
    if (diagonal_) {
      descend_diagonal(depth, pop);
    } else {
      descend(depth, prefix.flip_tied, pop);
    }

    for (const Candidate& c : store_.drain()) {
      if (c.d1 == local_best_) result_.candidates.push_back(c);
    }
    result_.best_d1 = local_best_;
    return std::move(result_);
  }

 private:
  void refresh_threshold() {
    threshold_ = std::max(local_best_, shared_best_.load(std::memory_order_relaxed));
  }

  void publish(int d1) {
    int seen = shared_best_.load(std::memory_order_relaxed);
    while (seen < d1 && !shared_best_.compare_exchange_weak(seen, d1, std::memory_order_relaxed)) {
    }
  }

  void descend(int depth, bool tied, int pop) {
    if (depth == rows_count_ - 1) {
      last_row(tied, pop);
      return;
    }
    for (Row r = 0; r <= mask_; ++r) {
      bool next_tied = tied;
      if (config_.flip_pruning && tied) {
        const Row rev = mirror(r, width_);
        if (text_less(rev, r)) continue;
        next_tied = rev == r;
      }
      rows_[depth] = r;
      ++result_.nodes;
      descend(depth + 1, next_tied, pop + std::popcount(r));
    }
  }

  // All rows but the last are fixed: precompute their contribution to every
  // shift once, then each completion adds at most one row-pair term.
  void last_row(bool tied, int pop) {
    const int last = rows_count_ - 1;
    for (std::size_t k = 0; k < shifts_.size(); ++k) {
      const auto [t1, t2] = shifts_[k];
      int sum = 0;
      for (int i = 0; i + t1 < last; ++i) sum += row_overlap(rows_[i], rows_[i + t1], t2);
      base_[k] = sum;
    }
    refresh_threshold();

    for (Row r = 0; r <= mask_; ++r) {
      if (config_.flip_pruning && tied && text_less(mirror(r, width_), r)) continue;
      rows_[last] = r;
      ++result_.nodes;
      ++result_.leaves;
      const int p = pop + std::popcount(r);
      const int limit = sidelobe_limit(p);
      if (limit < 0) continue;

      int s = 0;
      bool rejected = false;
      for (std::size_t k = 0; k < shifts_.size(); ++k) {
        const auto [t1, t2] = shifts_[k];
        const int a = base_[k] + row_overlap(rows_[last - t1], r, t2);
        ++result_.evaluations;
        if (a > limit) {
          rejected = true;
          break;
        }
        s = std::max(s, a);
      }
      if (!rejected) complete(p, s);
    }
  }

  void descend_diagonal(int depth, int pop) {
    if (depth == rows_count_) {
      leaf_diagonal(pop);
      return;
    }
    Row fixed = 0;
    for (int j = 0; j < depth; ++j) fixed |= ((rows_[j] >> depth) & 1u) << j;
    const Row free_count = Row{1} << (width_ - depth);
    for (Row x = 0; x < free_count; ++x) {
      const Row r = fixed | (x << depth);
      rows_[depth] = r;
      ++result_.nodes;
      descend_diagonal(depth + 1, pop + std::popcount(r));
    }
  }

  void leaf_diagonal(int p) {
    ++result_.leaves;
    const int limit = sidelobe_limit(p);
    if (limit < 0) return;
    int s = 0;
    for (const auto [t1, t2] : shifts_) {
      int a = 0;
      for (int i = 0; i + t1 < rows_count_; ++i) a += row_overlap(rows_[i], rows_[i + t1], t2);
      ++result_.evaluations;
      if (a > limit) return;
      s = std::max(s, a);
    }
    complete(p, s);
  }

  // Largest sidelobe that can still matter for this matrix; negative when
  // nothing can.
  int sidelobe_limit(int p) const {
    if (!config_.spiral_early_exit) return kNoSidelobe;
    const int for_optimum = p - threshold_;
    if (!config_.per_p) return for_optimum;
    return std::max(for_optimum, result_.s_min[p]);
  }

  void complete(int p, int s) {
    if (config_.per_p) result_.s_min[p] = std::min(result_.s_min[p], s);
    const int d1 = p - s;
    if (d1 < threshold_) return;
    if (d1 > local_best_) {
      local_best_ = d1;
      store_.clear();
      publish(d1);
      refresh_threshold();
      if (d1 < threshold_) return;
    }
    Candidate c;
    for (int i = 0; i < rows_count_; ++i) c.rows[i] = static_cast<std::uint16_t>(rows_[i]);
    c.d1 = static_cast<std::int16_t>(d1);
    store_.add(c);
    ++result_.retained;
  }

  const SearchConfig& config_;
  std::span<const Shift> shifts_;
  std::atomic<int>& shared_best_;
  int rows_count_;
  int width_;
  Row mask_;
  bool diagonal_;
  CandidateStore store_;
  std::vector<int> base_;
  std::array<Row, BinaryMatrix::kMaxSide> rows_{};
  SubtreeResult result_;
  int local_best_ = -1;
  int threshold_ = -1;
};

// ---- checkpoints ----------------------------------------------------------

using nlohmann::json;

json fingerprint(const SearchConfig& config) {
  return {{"rows", config.rows},
          {"cols", config.cols},
          {"restriction", to_string(config.restriction)},
          {"depth", config.partition_depth},
          {"per_p", config.per_p},
          {"flip_pruning", config.flip_pruning}};
}

std::filesystem::path checkpoint_path(const SearchConfig& config, std::size_t index) {
  return std::filesystem::path(config.checkpoint_dir) / ("prefix_" + std::to_string(index) + ".json");
}

std::optional<SubtreeResult> load_checkpoint(const SearchConfig& config, std::size_t index) {
  const auto path = checkpoint_path(config, index);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json doc;
  try {
    in >> doc;
  } catch (const json::exception&) {
    return std::nullopt;  // partial write from an interrupted run
  }
  if (doc.value("fingerprint", json{}) != fingerprint(config)) {
    throw std::runtime_error("checkpoint " + path.string() + " belongs to a different search");
  }
  SubtreeResult r;
  r.best_d1 = doc.at("best_d1").get<int>();
  for (const auto& words : doc.at("candidates")) {
    Candidate c;
    for (std::size_t i = 0; i < words.size(); ++i) c.rows[i] = words[i].get<std::uint16_t>();
    c.d1 = static_cast<std::int16_t>(r.best_d1);
    r.candidates.push_back(c);
  }
  for (const auto& v : doc.at("s_min")) r.s_min.push_back(v.is_null() ? kNoSidelobe : v.get<int>());
  r.nodes = doc.at("nodes").get<std::uint64_t>();
  r.leaves = doc.at("leaves").get<std::uint64_t>();
  return r;
}

void save_checkpoint(const SearchConfig& config, std::size_t index, const SubtreeResult& r) {
  json doc;
  doc["fingerprint"] = fingerprint(config);
  doc["index"] = index;
  doc["best_d1"] = r.best_d1;
  json candidates = json::array();
  for (const Candidate& c : r.candidates) {
    json words = json::array();
    for (int i = 0; i < config.rows; ++i) words.push_back(c.rows[i]);
    candidates.push_back(std::move(words));
  }
  doc["candidates"] = std::move(candidates);
  json s_min = json::array();
  for (int v : r.s_min) s_min.push_back(v == kNoSidelobe ? json(nullptr) : json(v));
  doc["s_min"] = std::move(s_min);
  doc["nodes"] = r.nodes;
  doc["leaves"] = r.leaves;

  const auto path = checkpoint_path(config, index);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << doc.dump();
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// ---- report assembly ------------------------------------------------------

int symmetric_members(const BinaryMatrix& canonical) {
  int count = 0;
  for (const BinaryMatrix& m : symmetry_orbit(canonical)) count += transpose(m) == m ? 1 : 0;
  return count;
}

SearchReport assemble(const SearchConfig& config, std::vector<SubtreeResult>& parts) {
  SearchReport report;
  report.rows = config.rows;
  report.cols = config.cols;
  report.restriction = config.restriction;
  report.per_p = config.per_p;

  const int cells = config.rows * config.cols;
  std::vector<int> s_min(static_cast<std::size_t>(cells) + 1, kNoSidelobe);
  int best = -1;
  for (const SubtreeResult& part : parts) {
    best = std::max(best, part.best_d1);
    report.stats.nodes += part.nodes;
    report.stats.leaves += part.leaves;
    report.stats.sidelobe_evaluations += part.evaluations;
    report.stats.candidates_retained += part.retained;
    for (std::size_t p = 0; p < part.s_min.size() && p < s_min.size(); ++p) {
      s_min[p] = std::min(s_min[p], part.s_min[p]);
    }
  }
  report.best_d1 = best;

  std::set<BinaryMatrix> classes;
  for (const SubtreeResult& part : parts) {
    if (part.best_d1 != best) continue;
    for (const Candidate& c : part.candidates) {
      std::array<Row, BinaryMatrix::kMaxSide> words{};
      for (int i = 0; i < config.rows; ++i) words[i] = c.rows[i];
      classes.insert(canonical_form(
          BinaryMatrix(config.rows, config.cols, std::span<const Row>(words.data(), config.rows))));
    }
  }

  std::vector<RankedMatrix> ranked;
  report.curve.resize(static_cast<std::size_t>(cells) + 1);
  for (int p = 0; p <= cells; ++p) {
    report.curve[p].p = p;
    if (config.per_p && s_min[p] != kNoSidelobe) report.curve[p].s_min = s_min[p];
  }
  for (const BinaryMatrix& m : classes) {
    RankedMatrix entry{m, spectrum_of(m), static_cast<int>(symmetry_orbit(m).size())};
    CurvePoint& point = report.curve[entry.spectrum.p];
    ++point.classes;
    point.raw += config.restriction == SymmetryRestriction::kDiagonal ? symmetric_members(m)
                                                                      : entry.orbit_size;
    ranked.push_back(std::move(entry));
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedMatrix& a, const RankedMatrix& b) {
    const auto order = rank_order(a.spectrum, b.spectrum);
    if (order != 0) return order < 0;
    return a.matrix < b.matrix;
  });
  report.optimal_classes = static_cast<std::int64_t>(ranked.size());
  report.unique_optimum = ranked.size() < 2 || ranks_above(ranked[0].spectrum, ranked[1].spectrum);
  if (config.top_k > 0 && ranked.size() > static_cast<std::size_t>(config.top_k)) {
    ranked.resize(static_cast<std::size_t>(config.top_k));
  }
  report.optima = std::move(ranked);
  return report;
}

}  // namespace

const char* to_string(SymmetryRestriction restriction) {
  return restriction == SymmetryRestriction::kDiagonal ? "diagonal" : "none";
}

double estimated_leaves(const SearchConfig& config) {
  const int free_bits = config.restriction == SymmetryRestriction::kDiagonal
                            ? config.rows * (config.rows + 1) / 2
                            : config.rows * config.cols;
  const double all = std::ldexp(1.0, free_bits);
  const bool halved = config.restriction == SymmetryRestriction::kNone && config.flip_pruning;
  return halved ? all / 2 : all;
}

bool flip_prune(std::span<const Row> prefix, int width) {
  if (width < 1 || width > BinaryMatrix::kMaxSide) throw std::invalid_argument("bad row width");
  for (Row r : prefix) {
    const Row rev = mirror(r, width);
    if (rev != r) return text_less(rev, r);
  }
  return false;
}

std::vector<std::pair<int, int>> spiral_order(int rows, int cols) {
  std::vector<std::pair<int, int>> shifts;
  for (int t1 = 0; t1 < rows; ++t1) {
    for (int t2 = -(cols - 1); t2 < cols; ++t2) {
      if (t1 == 0 && t2 <= 0) continue;
      shifts.emplace_back(t1, t2);
    }
  }
  std::sort(shifts.begin(), shifts.end(), [](auto a, auto b) {
    const int ring_a = std::max(std::abs(a.first), std::abs(a.second));
    const int ring_b = std::max(std::abs(b.first), std::abs(b.second));
    if (ring_a != ring_b) return ring_a < ring_b;
    // Sweep from +tau2 through +tau1 to -tau2.
    return std::atan2(a.first, a.second) < std::atan2(b.first, b.second);
  });
  return shifts;
}

bool spiral_d1_check(const BinaryMatrix& m, int threshold_d1, int* visited) {
  const int p = m.popcount();
  int count = 0;
  // s >= 0, so d1 never exceeds p even without sidelobes
  bool ok = p >= threshold_d1;
  for (auto [t1, t2] : spiral_order(m.rows(), m.cols())) {
    if (!ok) break;
    int a = 0;
    for (int i = 0; i + t1 < m.rows(); ++i) a += row_overlap(m.row(i), m.row(i + t1), t2);
    ++count;
    if (p - a < threshold_d1) {
      ok = false;
      break;
    }
  }
  if (visited) *visited = count;
  return ok;
}

std::vector<PrefixAssignment> partition_work(const SearchConfig& config) {
  validate(config);
  std::vector<PrefixAssignment> prefixes;
  enumerate_prefixes(config, config.partition_depth, [&](const std::vector<Row>& rows, bool tied) {
    prefixes.push_back({rows, tied});
  });
  return prefixes;
}

SearchReport search(const SearchConfig& config) {
  validate(config);
  const double leaves = estimated_leaves(config);
  if (leaves > config.leaf_budget && !config.force) {
    throw BudgetExceeded(fmt::format("search of {}x{} ({}) visits about {:.3g} matrices, above the budget of {:.3g}; "
                                     "force is required",
                                     config.rows, config.cols, to_string(config.restriction), leaves,
                                     config.leaf_budget));
  }
  if (!config.checkpoint_dir.empty()) std::filesystem::create_directories(config.checkpoint_dir);

  const auto start = std::chrono::steady_clock::now();
  std::vector<PrefixAssignment> prefixes;
  const std::uint64_t prefix_nodes =
      enumerate_prefixes(config, config.partition_depth,
                         [&](const std::vector<Row>& rows, bool tied) { prefixes.push_back({rows, tied}); });

  const std::vector<Shift> shifts = evaluation_shifts(config);
  std::vector<SubtreeResult> parts(prefixes.size());
  std::vector<char> resumed(prefixes.size(), 0);
  std::atomic<int> shared_best{-1};
  if (!config.checkpoint_dir.empty()) {
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      if (auto loaded = load_checkpoint(config, i)) {
        parts[i] = std::move(*loaded);
        resumed[i] = 1;
        if (parts[i].best_d1 > shared_best.load()) shared_best = parts[i].best_d1;
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      SubtreeSearcher searcher(config, shifts, shared_best);
      for (std::size_t i = next++; i < prefixes.size(); i = next++) {
        if (resumed[i]) continue;
        parts[i] = searcher.run(prefixes[i]);
        if (!config.checkpoint_dir.empty()) save_checkpoint(config, i, parts[i]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = prefixes.size();
    }
  };

  const int thread_count = std::min<int>(config.threads, static_cast<int>(prefixes.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SearchReport report = assemble(config, parts);
  report.stats.nodes += prefix_nodes;
  report.stats.prefixes = prefixes.size();
  report.stats.prefixes_resumed = static_cast<std::uint64_t>(std::count(resumed.begin(), resumed.end(), 1));
  report.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace alignmark
