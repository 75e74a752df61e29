#include <doctest.h>

#include <climits>
#include <filesystem>
#include <random>
#include <set>

#include "alignmark/correlation.hpp"
#include "alignmark/io.hpp"
#include "alignmark/search.hpp"
#include "support.hpp"

using namespace alignmark;
using test_support::to_grid;

namespace {

SearchConfig config_for(int rows, int cols) {
  SearchConfig c;
  c.rows = rows;
  c.cols = cols;
  c.top_k = 0;
  c.per_p = true;
  c.partition_depth = rows > 1 ? 1 : 0;
  return c;
}

void check_against_oracle(const SearchReport& r, const oracle::SearchResult& o) {
  CHECK(r.best_d1 == o.best_d1);
  REQUIRE(r.curve.size() == o.s_min.size());
  for (std::size_t p = 0; p < r.curve.size(); ++p) {
    CAPTURE(p);
    if (o.s_min[p] == INT_MAX) {
      CHECK_FALSE(r.curve[p].s_min.has_value());
    } else {
      CHECK(r.curve[p].s_min == o.s_min[p]);
    }
    CHECK(r.curve[p].classes == o.classes[p]);
    CHECK(r.curve[p].raw == o.raw[p]);
  }
  CHECK(r.optimal_classes == static_cast<std::int64_t>(o.optima.size()));
  std::set<std::string> found;
  for (const RankedMatrix& m : r.optima) {
    CHECK(canonical_form(m.matrix) == m.matrix);
    const std::string key = oracle::class_key(to_grid(m.matrix));
    CHECK(found.insert(key).second);
    REQUIRE(o.optima.count(key) == 1);
    CHECK(m.spectrum.counts == o.optima.at(key).counts);
    CHECK(m.orbit_size == static_cast<int>(symmetry_orbit(m.matrix).size()));
  }
  for (std::size_t i = 1; i < r.optima.size(); ++i) {
    CHECK_FALSE(ranks_above(r.optima[i].spectrum, r.optima[i - 1].spectrum));
  }
}

// Report fields that must not depend on scheduling or partitioning.
std::string stable_json(const SearchReport& r) {
  nlohmann::json j = to_json(r);
  j.erase("stats");
  return j.dump();
}

}  // namespace

TEST_CASE("search matches enumeration for every shape up to 12 cells") {
  for (int m = 1; m <= 12; ++m)
    for (int n = 1; m * n <= 12; ++n) {
      CAPTURE(m);
      CAPTURE(n);
      const oracle::SearchResult o = oracle::enumerate_all(m, n, false);
      for (int mode = 0; mode < 4; ++mode) {
        SearchConfig c = config_for(m, n);
        c.flip_pruning = (mode & 1) != 0;
        c.spiral_early_exit = (mode & 2) != 0;
        check_against_oracle(search(c), o);
      }
    }
}

TEST_CASE("diagonal search matches symmetric enumeration") {
  for (int n = 1; n <= 5; ++n) {
    CAPTURE(n);
    SearchConfig c = config_for(n, n);
    c.restriction = SymmetryRestriction::kDiagonal;
    const SearchReport r = search(c);
    check_against_oracle(r, oracle::enumerate_all(n, n, true));
    for (const RankedMatrix& m : r.optima) CHECK(is_diagonally_symmetric(m.matrix));
    CHECK(r.stats.leaves == (std::uint64_t{1} << (n * (n + 1) / 2)));
  }
}

TEST_CASE("2x2 optimum outranks every other 2x2 matrix") {
  SearchConfig c = config_for(2, 2);
  const SearchReport r = search(c);
  REQUIRE(r.unique_optimum);
  const RankedMatrix& best = r.optima.front();
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const BinaryMatrix m = BinaryMatrix::from_rows(oracle::from_mask(2, 2, mask));
    if (canonical_form(m) == best.matrix) continue;
    CHECK(ranks_above(best.spectrum, spectrum_of(m)));
  }
}

TEST_CASE("3x3 optimum is unique and its white pixels are enclosed") {
  const SearchReport r = search(config_for(3, 3));
  CHECK(r.unique_optimum);
  const BinaryMatrix& m = r.optima.front().matrix;
  CHECK(is_connected(m, 1));
  CHECK_FALSE(is_connected(m, 0, Surround::kZeroBackground));
}

TEST_CASE("report does not depend on threads, depth, pruning or candidate spill") {
  SearchConfig base = config_for(4, 4);
  base.top_k = 5;
  const std::string expected = stable_json(search(base));
  for (int depth = 0; depth <= 3; ++depth)
    for (int threads : {1, 3}) {
      SearchConfig c = base;
      c.partition_depth = depth;
      c.threads = threads;
      CHECK(stable_json(search(c)) == expected);
    }
  SearchConfig spill = base;
  spill.candidate_cap = 3;
  CHECK(stable_json(search(spill)) == expected);
  SearchConfig plain = base;
  plain.flip_pruning = false;
  plain.spiral_early_exit = false;
  const SearchReport unpruned = search(plain);
  CHECK(stable_json(unpruned) == expected);
  CHECK(unpruned.stats.leaves == (std::uint64_t{1} << 16));
}

TEST_CASE("checkpointed search resumes to the same report") {
  const auto dir = std::filesystem::temp_directory_path() / "alignmark_test_checkpoint";
  std::filesystem::remove_all(dir);
  SearchConfig c = config_for(4, 4);
  c.partition_depth = 2;
  c.checkpoint_dir = dir.string();
  const SearchReport first = search(c);
  CHECK(first.stats.prefixes_resumed == 0);
  const SearchReport second = search(c);
  CHECK(second.stats.prefixes_resumed == second.stats.prefixes);
  CHECK(stable_json(first) == stable_json(second));

  SearchConfig other = c;
  other.per_p = false;
  CHECK_THROWS(search(other));
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid configurations and the budget guard") {
  SearchConfig c = config_for(3, 4);
  c.restriction = SymmetryRestriction::kDiagonal;
  CHECK_THROWS_AS(search(c), std::invalid_argument);
  SearchConfig deep = config_for(3, 3);
  deep.partition_depth = 3;
  CHECK_THROWS_AS(search(deep), std::invalid_argument);
  SearchConfig big = config_for(7, 7);
  CHECK_THROWS_AS(search(big), BudgetExceeded);
  SearchConfig tight = config_for(3, 3);
  tight.leaf_budget = 10;
  CHECK_THROWS_AS(search(tight), BudgetExceeded);
  tight.force = true;
  CHECK(search(tight).best_d1 == 4);
  CHECK(estimated_leaves(config_for(4, 4)) == doctest::Approx(32768));
}

TEST_CASE("uniqueness is reported, not assumed") {
  // 1x2: the single pixel {1 | 2} and the pair {1 | 2, 0} tie.
  const SearchReport r = search(config_for(1, 2));
  CHECK(r.optimal_classes == 2);
  CHECK_FALSE(r.unique_optimum);
}

TEST_CASE("flip prune examples") {
  const std::vector<BinaryMatrix::Row> keep = {0b10};  // text "01"
  CHECK_FALSE(flip_prune(keep, 2));
  const std::vector<BinaryMatrix::Row> prune = {0b01};  // text "10"
  CHECK(flip_prune(prune, 2));
  const std::vector<BinaryMatrix::Row> palindrome = {0b101};
  CHECK_FALSE(flip_prune(palindrome, 3));
}

TEST_CASE("flip prune keeps exactly one of each mirror pair") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 2000; ++t) {
    const int width = 1 + static_cast<int>(rng() % 8);
    const int rows = 1 + static_cast<int>(rng() % 4);
    std::vector<BinaryMatrix::Row> prefix(rows), mirrored(rows);
    for (int i = 0; i < rows; ++i) {
      prefix[i] = static_cast<BinaryMatrix::Row>(rng()) & ((1u << width) - 1);
      mirrored[i] = reverse_row(prefix[i], width);
    }
    if (prefix == mirrored) {
      CHECK_FALSE(flip_prune(prefix, width));
    } else {
      CHECK(flip_prune(prefix, width) != flip_prune(mirrored, width));
    }
  }
}

TEST_CASE("spiral order covers the half plane ring by ring") {
  const auto order = spiral_order(4, 5);
  REQUIRE(order.size() >= 4);
  CHECK(order[0] == std::pair{0, 1});
  CHECK(order[1] == std::pair{1, 1});
  CHECK(order[2] == std::pair{1, 0});
  CHECK(order[3] == std::pair{1, -1});
  std::set<std::pair<int, int>> seen(order.begin(), order.end());
  CHECK(seen.size() == order.size());
  CHECK(order.size() == static_cast<std::size_t>((7 * 9 - 1) / 2));
  int ring = 0;
  for (auto [t1, t2] : order) {
    CHECK((t1 > 0 || (t1 == 0 && t2 > 0)));
    const int r = std::max(std::abs(t1), std::abs(t2));
    CHECK(r >= ring);
    ring = r;
  }
}

TEST_CASE("spiral check examples") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 50; ++t) CHECK(spiral_d1_check(test_support::random_shape(rng, 6), 0));
  int visited = 0;
  CHECK_FALSE(spiral_d1_check(BinaryMatrix::all_ones(3, 3), 4, &visited));
  CHECK(visited <= 4);
  CHECK(spiral_d1_check(BinaryMatrix::all_ones(3, 3), 3));

  const SearchReport r = search(config_for(4, 4));
  const BinaryMatrix& best = r.optima.front().matrix;
  CHECK(spiral_d1_check(best, r.best_d1));
  CHECK_FALSE(spiral_d1_check(best, r.best_d1 + 1));
}

TEST_CASE("spiral check equals the full scan") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 2000; ++t) {
    const BinaryMatrix m = test_support::random_shape(rng, 7);
    const AutocorrelationMap a = autocorrelate(m);
    const int d1 = a.peak() - a.max_sidelobe();
    const int threshold = static_cast<int>(rng() % 8);
    CHECK(spiral_d1_check(m, threshold) == (d1 >= threshold));
  }
}

TEST_CASE("partition work") {
  SearchConfig c = config_for(3, 3);
  const auto prefixes = partition_work(c);
  // 4 palindromic rows plus one of each of the 2 mirror pairs
  CHECK(prefixes.size() == 6);
  CHECK(prefixes.size() <= 8);
  SearchConfig none = c;
  none.partition_depth = 0;
  CHECK(partition_work(none).size() == 1);
  CHECK(partition_work(none).front().rows.empty());

  SearchConfig diag = config_for(4, 4);
  diag.restriction = SymmetryRestriction::kDiagonal;
  diag.partition_depth = 2;
  const auto sym = partition_work(diag);
  CHECK(sym.size() == (1u << (4 + 3)));
  for (const PrefixAssignment& a : sym) {
    REQUIRE(a.rows.size() == 2);
    CHECK(((a.rows[0] >> 1) & 1u) == (a.rows[1] & 1u));
  }
}
