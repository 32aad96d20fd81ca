#include "oracles.hpp"
#include "test_util.hpp"

#include "pdm/csv.hpp"
#include "pdm/error.hpp"
#include "pdm/rollcall.hpp"

#include <doctest.h>

using namespace pdm;

TEST_CASE("csv record splitting and escaping") {
  CHECK(csv::split_record("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(csv::split_record("\"x, y\",\"he said \"\"hi\"\"\"") ==
        std::vector<std::string>{"x, y", "he said \"hi\""});
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::split_record(csv::join({"a,b", "q\"q", ""})) == std::vector<std::string>{"a,b", "q\"q", ""});
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double x = nd(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(csv::format_double(x)) == x);
  }
  CHECK(csv::format_double(0.5) == "0.5");
}

TEST_CASE("load_wide_csv parses a small file") {
  testutil::TempDir dir("wide");
  const auto p = dir.write("v.csv", "id,name,party,region,v1,v2\n"
                                    "a,Alice,D,west,1,-1\n"
                                    "b,Bob,R,,-1,1\n");
  const auto v = load_wide_csv(p);
  REQUIRE(v.n() == 2);
  REQUIRE(v.m() == 2);
  CHECK(v(0, 0) == 1);
  CHECK(v(0, 1) == -1);
  CHECK(v(1, 0) == -1);
  CHECK(v(1, 1) == 1);
  CHECK(v.vote_ids() == std::vector<std::string>{"v1", "v2"});
  CHECK(v.legislators()[0].region == std::optional<std::string>("west"));
  CHECK_FALSE(v.legislators()[1].region.has_value());
}

TEST_CASE("load_wide_csv reports bad cells with their location") {
  testutil::TempDir dir("wide_bad");
  const auto p = dir.write("v.csv", "id,name,party,region,v1,v2\n"
                                    "a,Alice,D,,1,-1\n"
                                    "b,Bob,R,,-1,2\n");
  try {
    load_wide_csv(p);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == 6);
    CHECK(std::string(e.what()).find("'2'") != std::string::npos);
  }
}

TEST_CASE("load_wide_csv rejects structural problems") {
  testutil::TempDir dir("wide_struct");
  CHECK_THROWS_WITH_AS(load_wide_csv(dir.write("a.csv", "id,name,party,region\na,A,D,\nb,B,R,\n")),
                       doctest::Contains("no votes"), ParseError);
  CHECK_THROWS_AS(load_wide_csv(dir.write("b.csv", "id,name,party,region,v1\na,A,D,,1\na,B,R,,1\n")),
                  ParseError);
  CHECK_THROWS_AS(load_wide_csv(dir.write("c.csv", "id,name,party,region,v1\na,A,D,,1,1\nb,B,R,,1\n")),
                  ParseError);
  CHECK_THROWS_AS(load_wide_csv(dir.write("d.csv", "name,id,party,region,v1\na,A,D,,1\nb,B,R,,1\n")),
                  ParseError);
}

TEST_CASE("wide CSV round-trips exactly") {
  testutil::TempDir dir("roundtrip");
  auto v = oracle::random_matrix(12, 30, 5, 0.2);
  std::vector<Legislator> legs = v.legislators();
  legs[3].name = "Smith, \"Jr\"";
  legs[4].region = "south";
  v = VoteMatrix(legs, v.vote_ids(), v.values());
  save_wide_csv(v, dir.path / "x.csv");
  const auto back = load_wide_csv(dir.path / "x.csv");
  CHECK(back == v);
  CHECK(to_wide_csv(back) == to_wide_csv(v));
}

TEST_CASE("VoteMatrix validates its invariants") {
  VoteValues two(2, 1);
  two << 1, -1;
  CHECK_NOTHROW(oracle::make_matrix(two));
  VoteValues bad(2, 1);
  bad << 1, 3;
  CHECK_THROWS_AS(oracle::make_matrix(bad), Error);
  VoteValues one(1, 2);
  one << 1, 1;
  CHECK_THROWS_AS(oracle::make_matrix(one), Error);
}

TEST_CASE("voteview cast codes") {
  CHECK(map_cast_code(1) == 1);
  CHECK(map_cast_code(2) == 1);
  CHECK(map_cast_code(3) == 1);
  CHECK(map_cast_code(4) == -1);
  CHECK(map_cast_code(6) == -1);
  CHECK(map_cast_code(7) == 0);
  CHECK(map_cast_code(9) == 0);
  CHECK(map_cast_code(0) == 0);
}

TEST_CASE("load_voteview builds the matrix in roll number order") {
  testutil::TempDir dir("voteview");
  const auto members = dir.write("m.csv", "congress,icpsr,bioname,party_code,state_abbrev\n"
                                          "108,10,\"DOE, Jane\",100,NY\n"
                                          "108,20,\"ROE, Rick\",200,TX\n"
                                          "108,30,\"SILENT, Sam\",200,TX\n");
  const auto votes = dir.write("v.csv", "congress,chamber,rollnumber,icpsr,cast_code,prob\n"
                                        "108,Senate,7,10,6,99\n"
                                        "108,Senate,2,10,1,99\n"
                                        "108,Senate,2,20,9,99\n"
                                        "108,Senate,7,20,3,99\n");
  const auto v = load_voteview(members, votes);
  REQUIRE(v.n() == 3);
  REQUIRE(v.m() == 2);
  CHECK(v.vote_ids() == std::vector<std::string>{"2", "7"});
  CHECK(v(0, 0) == 1);
  CHECK(v(0, 1) == -1);
  CHECK(v(1, 0) == 0);
  CHECK(v(1, 1) == 1);
  CHECK(v(2, 0) == 0); // member with no votes: all-zero row
  CHECK(v(2, 1) == 0);
  CHECK(v.legislators()[0].name == "DOE, Jane");
  CHECK(v.legislators()[1].region == std::optional<std::string>("TX"));

  const auto dup = dir.write("dup.csv", "icpsr,rollnumber,cast_code\n10,1,1\n10,1,6\n");
  CHECK_THROWS_AS(load_voteview(members, dup), ParseError);
  const auto unknown = dir.write("unk.csv", "icpsr,rollnumber,cast_code\n99,1,1\n");
  CHECK_THROWS_AS(load_voteview(members, unknown), ParseError);
}

namespace {

VoteMatrix column_with(int n, int yeas, int nays) {
  VoteValues x = VoteValues::Zero(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i < yeas ? 1 : (i < yeas + nays ? -1 : 0);
    x(i, 1) = i % 2 ? 1 : -1;
  }
  return oracle::make_matrix(x);
}

} // namespace

TEST_CASE("filter_minority uses the whole body as denominator") {
  CHECK(filter_minority(column_with(100, 1, 99)).m() == 1);
  CHECK(filter_minority(column_with(100, 3, 97)).m() == 2);
  // minority exactly at threshold * n is kept (strict inequality)
  CHECK(filter_minority(column_with(40, 1, 39)).m() == 2);
  // abstainers count towards n: 2 yeas among 100 members is below 2.5
  CHECK(filter_minority(column_with(100, 2, 10)).m() == 1);
  const auto kept = filter_minority(column_with(100, 1, 99));
  CHECK(kept.vote_ids() == std::vector<std::string>{"q1"});
}

TEST_CASE("filter_minority edge cases and properties") {
  const auto v = oracle::random_matrix(30, 50, 11, 0.3);
  CHECK(filter_minority(v, 0.0) == v);
  CHECK_THROWS_AS(filter_minority(v, 0.5), Error);
  CHECK_THROWS_AS(filter_minority(v, -0.1), Error);

  VoteValues unanimous = VoteValues::Ones(10, 3);
  CHECK_THROWS_WITH(filter_minority(oracle::make_matrix(unanimous)), doctest::Contains("all votes filtered"));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    VoteValues x(25, 40);
    for (int j = 0; j < 40; ++j) {
      const double p = static_cast<double>(rng() % 1000) / 1000.0 * 0.2;
      for (int i = 0; i < 25; ++i) x(i, j) = (static_cast<double>(rng() % 1000) / 1000.0) < p ? -1 : 1;
    }
    x.col(0).setConstant(1);
    x(0, 0) = -1;
    x(1, 0) = -1; // keep at least one column alive
    const auto once = filter_minority(oracle::make_matrix(x), 0.06);
    CHECK(filter_minority(once, 0.06) == once);
    // survivors keep their relative order
    const auto& ids = once.vote_ids();
    for (std::size_t k = 1; k < ids.size(); ++k) {
      CHECK(std::stoi(ids[k - 1].substr(1)) < std::stoi(ids[k].substr(1)));
    }
  }
}
