#include "oracles.hpp"

#include "pdm/boost_explain.hpp"
#include "pdm/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace pdm;
using Eigen::Index;

namespace {

std::vector<Index> range(Index lo, Index hi) {
  std::vector<Index> out(static_cast<std::size_t>(hi - lo));
  std::iota(out.begin(), out.end(), lo);
  return out;
}

// Noise everywhere, and column `col` set to +1 for the first half, -1 for the rest.
VoteMatrix one_discriminating_column(int n, int m, Index col, std::uint64_t seed) {
  VoteValues x = oracle::random_matrix(n, m, seed).values();
  for (int i = 0; i < n; ++i) x(i, col) = i < n / 2 ? 1 : -1;
  // make the other columns identical across the halves so only `col` separates
  for (int i = n / 2; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (j != col) x(i, j) = x(i - n / 2, j);
  return oracle::make_matrix(x);
}

} // namespace

TEST_CASE("a single discriminating column is found in round one with zero error") {
  for (Index col : {Index{0}, Index{3}, Index{9}}) {
    const auto v = one_discriminating_column(16, 10, col, 40 + static_cast<std::uint64_t>(col));
    const auto a = range(0, 8), b = range(8, 16);
    const auto run = adaboost_pair(v, a, b);
    REQUIRE(!run.stumps.empty());
    CHECK(run.stumps.front().column == col);
    CHECK(run.errors.front() == 0.0);
    CHECK(run.perfect);
    CHECK(run.stumps.size() == 1);
    CHECK(run.training_error == 0.0);
    CHECK(run.alphas.front() == doctest::Approx(0.5 * std::log(1e8)));
    REQUIRE(run.ranking.size() == 1);
    CHECK(run.ranking.front().vote_id == v.vote_ids()[static_cast<std::size_t>(col)]);
    CHECK(run.ranking.front().rounds == 1);
  }
}

TEST_CASE("clusters with identical vote rows are inseparable") {
  VoteValues x(6, 4);
  x << 1, -1, 0, 1,
       -1, 1, 1, 1,
       1, 1, -1, 0,
       1, -1, 0, 1,
       -1, 1, 1, 1,
       1, 1, -1, 0;
  const auto v = oracle::make_matrix(x);
  const auto run = adaboost_pair(v, range(0, 3), range(3, 6));
  REQUIRE(run.diagnostic);
  CHECK(run.diagnostic->find("inseparable") != std::string::npos);
  CHECK(run.stumps.empty());
  CHECK(run.ranking.empty());
}

TEST_CASE("ties between perfect columns go to the lower index") {
  VoteValues x(4, 5);
  x << 1, -1, 1, 1, -1,
       1, 1, 1, 1, -1,
       1, -1, -1, -1, 1,
       1, 1, -1, -1, 1;
  const auto v = oracle::make_matrix(x);
  const auto run = adaboost_pair(v, range(0, 2), range(2, 4));
  REQUIRE(!run.stumps.empty());
  CHECK(run.stumps.front().column == 2);
  CHECK(run.stumps.front().polarity == 1);
  // reversing the roles flips the polarity, not the column
  const auto rev = adaboost_pair(v, range(2, 4), range(0, 2));
  CHECK(rev.stumps.front().column == 2);
  CHECK(rev.stumps.front().polarity == -1);
}

TEST_CASE("stump prediction over the value alphabet") {
  const Stump up{0, -0.5, 1};
  CHECK(up.predict(-1) == -1);
  CHECK(up.predict(0) == 1);
  CHECK(up.predict(1) == 1);
  const Stump down{0, 0.5, -1};
  CHECK(down.predict(1) == -1);
  CHECK(down.predict(0) == 1);
  CHECK(down.predict(-1) == 1);
}

TEST_CASE("abstention is a usable feature value") {
  // cluster A abstains on column 1, B votes; nothing else differs
  VoteValues x(4, 2);
  x << 1, 0,
       -1, 0,
       1, 1,
       -1, -1;
  const auto v = oracle::make_matrix(x);
  const auto run = adaboost_pair(v, range(0, 2), range(2, 4), 5);
  REQUIRE(!run.stumps.empty());
  CHECK(run.stumps.front().column == 1);
}

TEST_CASE("training error respects the exponential bound on every run") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int n = 10 + static_cast<int>(s % 7) * 3;
    const auto v = oracle::random_matrix(n, 12 + static_cast<int>(s % 5), 700 + s, 0.15);
    const auto split = static_cast<Index>(3 + s % 5);
    const auto run = adaboost_pair(v, range(0, split), range(split, n), 30);
    CHECK(run.training_error <= run.error_bound + 1e-12);
    for (double e : run.errors) {
      CHECK(e >= 0.0);
      CHECK(e < 0.5);
    }
    for (std::size_t k = 1; k < run.ranking.size(); ++k) CHECK(run.ranking[k - 1].weight >= run.ranking[k].weight);
    for (const auto& r : run.ranking) CHECK(r.weight >= 0.0);
    double total = 0.0;
    for (double a : run.alphas) total += a;
    double ranked = 0.0;
    int rounds = 0;
    for (const auto& r : run.ranking) {
      ranked += r.weight;
      rounds += r.rounds;
    }
    CHECK(ranked == doctest::Approx(total));
    CHECK(rounds == static_cast<int>(run.stumps.size()));
  }
}

TEST_CASE("ranking is invariant under reordering members within a cluster") {
  const auto v = oracle::party_region(24, 20, 10, 0.2, 0.2, 5).votes;
  auto a = range(0, 12), b = range(12, 24);
  const auto base = adaboost_pair(v, a, b, 20);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    const auto run = adaboost_pair(v, a, b, 20);
    REQUIRE(run.ranking.size() == base.ranking.size());
    for (std::size_t k = 0; k < run.ranking.size(); ++k) {
      CHECK(run.ranking[k].column == base.ranking[k].column);
      CHECK(run.ranking[k].weight == doctest::Approx(base.ranking[k].weight).epsilon(1e-12));
    }
  }
}

TEST_CASE("ranking ties keep vote order") {
  // columns 1 and 3 are each perfect; only one round runs, so make two rounds
  // possible by giving each column a single error in a different member
  VoteValues x(6, 4);
  x << 1, 1, 0, 1,
       1, 1, 0, -1,
       1, -1, 0, 1,
       -1, -1, 0, -1,
       -1, -1, 0, -1,
       -1, -1, 0, -1;
  const auto v = oracle::make_matrix(x);
  const auto run = adaboost_pair(v, range(0, 3), range(3, 6), 50);
  for (std::size_t k = 1; k < run.ranking.size(); ++k) {
    const auto& p = run.ranking[k - 1];
    const auto& q = run.ranking[k];
    CHECK((p.weight > q.weight || (p.weight == q.weight && p.column < q.column)));
  }
}

TEST_CASE("adaboost parameter errors") {
  const auto v = oracle::random_matrix(6, 3, 1);
  const auto a = range(0, 3), b = range(3, 6), overlap = range(2, 5);
  CHECK_THROWS_AS(adaboost_pair(v, {}, b), Error);
  CHECK_THROWS_AS(adaboost_pair(v, a, {}), Error);
  CHECK_THROWS_AS(adaboost_pair(v, a, overlap), Error);
  CHECK_THROWS_AS(adaboost_pair(v, a, b, 0), Error);
}

TEST_CASE("yea percentages count cast votes only") {
  VoteValues x(5, 3);
  x << 1, 1, 0,
       1, -1, 0,
       1, 0, 0,
       -1, -1, 1,
       -1, 1, -1;
  const auto v = oracle::make_matrix(x);
  const std::vector<Index> a{0, 1, 2}, b{3, 4};
  CHECK(yea_percent(v, a, 0) == 100);
  CHECK(yea_percent(v, b, 0) == 0);
  // member 2 abstains on vote 1: 1 of 2 cast
  CHECK(yea_percent(v, a, 1) == 50);
  CHECK_FALSE(yea_percent(v, a, 2));
  CHECK(yea_percent(v, b, 2) == 50);
  const std::vector<Index> three{0, 1, 3};
  // 2 of 3: 66.67 rounds to 67
  CHECK(yea_percent(v, three, 0) == 67);
}

TEST_CASE("explain_clusters: table shape, pair coverage and the unanimous-bloc vote") {
  const auto planted = oracle::party_region(24, 20, 10, 0.05, 0.05, 3);
  std::vector<int> assignment;
  for (int i = 0; i < 24; ++i)
    assignment.push_back(planted.party[static_cast<std::size_t>(i)] * 2 + planted.region[static_cast<std::size_t>(i)]);
  const auto sv = explain_clusters(planted.votes, assignment, 4, 50, 3);
  CHECK(sv.pairs.size() == 6);
  CHECK(sv.yea_table.size() == 4);
  CHECK(std::is_sorted(sv.selected_columns.begin(), sv.selected_columns.end()));
  CHECK(sv.selected_columns.size() <= 18);
  for (const auto& row : sv.yea_table) {
    REQUIRE(row.size() == sv.selected_columns.size());
    for (const auto& cell : row) {
      REQUIRE(cell);
      CHECK(*cell >= 0);
      CHECK(*cell <= 100);
    }
  }

  VoteValues x(4, 2);
  x << 1, 1,
       1, -1,
       -1, 1,
       -1, -1;
  const auto v = oracle::make_matrix(x);
  const auto two = explain_clusters(v, {0, 0, 1, 1}, 2);
  REQUIRE(two.selected_columns.size() == 1);
  CHECK(two.selected_columns.front() == 0);
  CHECK(two.yea_table[0][0] == 100);
  CHECK(two.yea_table[1][0] == 0);
}

TEST_CASE("explain_clusters warnings and errors") {
  const auto v = oracle::random_matrix(5, 4, 2);
  // one-member cluster is allowed with a warning; -1 marks legislators outside the layer
  const auto sv = explain_clusters(v, {0, 1, 1, -1, 1}, 2);
  CHECK(std::any_of(sv.warnings.begin(), sv.warnings.end(),
                    [](const std::string& w) { return w.find("single member") != std::string::npos; }));
  CHECK_THROWS_AS(explain_clusters(v, {0, 0, 0, 0, 0}, 1), Error);
  CHECK_THROWS_AS(explain_clusters(v, {0, 0, 0, 0, 0}, 2), Error);
  CHECK_THROWS_AS(explain_clusters(v, {0, 1}, 2), Error);
  CHECK_THROWS_AS(explain_clusters(v, {0, 1, 2, 0, 1}, 2), Error);
}
