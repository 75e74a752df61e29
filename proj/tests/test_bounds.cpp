#include <doctest.h>

#include <climits>
#include <random>

#include "alignmark/bounds.hpp"
#include "alignmark/correlation.hpp"
#include "support.hpp"

using namespace alignmark;

namespace {

int first_neighbor_max(const BinaryMatrix& m) {
  const AutocorrelationMap a = autocorrelate(m);
  int v = 0;
  if (m.rows() > 1) v = std::max(v, a(1, 0));
  if (m.cols() > 1) v = std::max(v, a(0, 1));
  return v;
}

}  // namespace

TEST_CASE("bound table examples at 5x5") {
  const BoundTable t = bound_table(5, 5);
  CHECK(t.n1 == 13);
  CHECK(t.n2 == 17);
  CHECK(t.at(20).d1_upper_I == 10);
  CHECK(t.at(10).s_lower_II == 2);
  CHECK(t.entries.size() == 26);
}

TEST_CASE("region breakpoints follow the parity of MN") {
  for (int m = 1; m <= 9; ++m)
    for (int n = m; n <= 9; ++n) {
      const BoundTable t = bound_table(m, n);
      const int cells = m * n;
      if (cells % 2 == 0) {
        CHECK(t.n1 == cells / 2);
        CHECK(t.n2 == t.n1 + m);
      } else {
        CHECK(t.n1 == (cells + 1) / 2);
        CHECK(t.n2 == t.n1 + m - 1);
      }
    }
}

TEST_CASE("bound rows are consistent") {
  for (int m = 1; m <= 9; ++m)
    for (int n = 1; n <= 9; ++n) {
      const BoundTable t = bound_table(m, n);
      CHECK(t.rows == std::min(m, n));
      CHECK(t.cols == std::max(m, n));
      for (int p = 0; p <= m * n; ++p) {
        const BoundRow& r = t.at(p);
        CHECK(r.p == p);
        CHECK(r.d1_upper_I == p - r.s_lower_I);
        CHECK(r.d1_upper_II == p - r.s_lower_II);
        CHECK(r.s_lower_I >= 0);
        CHECK(r.s_lower_II >= 0);
        const int denom = 4 * m * n - 2 * m - 2 * n;
        if (denom > 0) {
          // smallest integer not below p(p-1)/denom
          CHECK(r.s_lower_II * denom >= p * (p - 1));
          CHECK((r.s_lower_II - 1) * denom < p * (p - 1));
        }
      }
    }
}

TEST_CASE("all-ones square matches the first bound") {
  for (int n = 2; n <= 9; ++n) {
    const BoundTable t = bound_table(n, n);
    const int p = n * n;
    CHECK(t.at(p).s_lower_I == n * n - n);
    CHECK(first_neighbor_max(BinaryMatrix::all_ones(n, n)) == n * n - n);
  }
}

TEST_CASE("second bound is larger for small p and the first for large p") {
  for (int n = 3; n <= 9; ++n) {
    const BoundTable t = bound_table(n, n);
    CHECK(t.at(2).s_lower_II > t.at(2).s_lower_I);
    CHECK(t.at(n * n).s_lower_I > t.at(n * n).s_lower_II);
    const auto crossing = bound_crossing_interval(t);
    REQUIRE(crossing.has_value());
    CHECK(crossing->first < crossing->last);
    CHECK(t.at(crossing->first).s_lower_II > t.at(crossing->first).s_lower_I);
    CHECK(t.at(crossing->last).s_lower_I > t.at(crossing->last).s_lower_II);
    for (int p = crossing->first + 1; p < crossing->last; ++p) {
      CHECK(t.at(p).s_lower_I <= t.at(p).s_lower_II);
      CHECK(t.at(p).s_lower_II <= t.at(p).s_lower_I);
    }
  }
}

TEST_CASE("construction examples") {
  CHECK(construct_bound_matrix(4, 4, 0).popcount() == 0);
  const BinaryMatrix checker = construct_bound_matrix(4, 4, 8);
  const AutocorrelationMap a = autocorrelate(checker);
  CHECK(a(1, 0) == 0);
  CHECK(a(0, 1) == 0);
  CHECK_THROWS_AS(construct_bound_matrix(4, 4, 17), std::invalid_argument);
  CHECK_THROWS_AS(construct_bound_matrix(4, 4, -1), std::invalid_argument);
}

TEST_CASE("construction attains the first bound along rows") {
  for (int n = 2; n <= 9; ++n) {
    const BoundTable t = bound_table(n, n);
    for (int p = 0; p <= n * n; ++p) {
      const BinaryMatrix m = construct_bound_matrix(n, n, p);
      CHECK(m.popcount() == p);
      const AutocorrelationMap a = autocorrelate(m);
      CHECK(a(0, 1) == p - t.at(p).d1_upper_I);
      // the column direction is never below the bound
      CHECK(a(1, 0) >= p - t.at(p).d1_upper_I);
    }
  }
  // rectangular inputs are handled through the transpose
  const BinaryMatrix tall = construct_bound_matrix(5, 3, 9);
  CHECK(tall.rows() == 5);
  CHECK(tall.popcount() == 9);
}

TEST_CASE("brute force examples") {
  for (int p = 0; p <= 5; ++p) CHECK(brute_force_first_neighbor_min(3, 3, p) == 0);
  CHECK(brute_force_first_neighbor_min(3, 3, 9) == 6);
  CHECK_THROWS_AS(brute_force_first_neighbor_min(5, 5, 3), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_first_neighbor_min(3, 3, 10), std::invalid_argument);
}

TEST_CASE("brute force agrees with a direct scan and bounds it from above") {
  for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}}) {
    const std::vector<int> table = brute_force_first_neighbor_table(m, n);
    const BoundTable bounds = bound_table(m, n);
    std::vector<int> direct(m * n + 1, INT_MAX);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m * n)); ++mask) {
      const BinaryMatrix mat = BinaryMatrix::from_rows(oracle::from_mask(m, n, mask));
      direct[mat.popcount()] = std::min(direct[mat.popcount()], first_neighbor_max(mat));
    }
    CHECK(table == direct);
    for (int p = 0; p <= m * n; ++p) {
      CHECK(brute_force_first_neighbor_min(m, n, p) == table[p]);
      CHECK(table[p] >= p - bounds.at(p).d1_upper_I);
    }
  }
}

TEST_CASE("half-plane sidelobes fill p(p-1)/2 displacement pairs") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 1000; ++t) {
    const BinaryMatrix m = test_support::random_shape(rng, 8);
    const AutocorrelationMap a = autocorrelate(m);
    std::int64_t sum = 0;
    for (int t1 = 0; t1 < m.rows(); ++t1)
      for (int t2 = -(m.cols() - 1); t2 < m.cols(); ++t2)
        if (t1 > 0 || t2 > 0) sum += a(t1, t2);
    const std::int64_t p = m.popcount();
    CHECK(sum == p * (p - 1) / 2);
  }
  // number of unique non-zero displacements
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; n <= 6; ++n) CHECK(((2 * m - 1) * (2 * n - 1) - 1) / 2 == 2 * m * n - m - n);
}
