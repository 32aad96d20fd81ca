#include "oracles.hpp"

#include "pdm/error.hpp"
#include "pdm/evaluate.hpp"
#include "pdm/pdm_engine.hpp"
#include "pdm/sim_rollcall.hpp"
#include "pdm/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace pdm;
using Eigen::Index;

TEST_CASE("simulation is reproducible bit for bit") {
  SimConfig cfg;
  cfg.alpha = 4.2;
  cfg.seed = 99;
  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  CHECK(a.vote_matrix == b.vote_matrix);
  CHECK(a.loyalty == b.loyalty);
  CHECK(a.fiedler_loyalty_corr == b.fiedler_loyalty_corr);
  cfg.seed = 100;
  CHECK_FALSE(simulate(cfg).vote_matrix == a.vote_matrix);
}

TEST_CASE("simulated matrix shape, parties and loyalty range") {
  SimConfig cfg;
  cfg.alpha = 2.0;
  cfg.n_members = 40;
  cfg.n_votes = 120;
  cfg.seed = 3;
  const auto r = simulate(cfg);
  CHECK(r.vote_matrix.n() == 40);
  CHECK(r.vote_matrix.m() == 120);
  CHECK((r.party.array() == 1).count() == 20);
  CHECK((r.party.array() == -1).count() == 20);
  CHECK(r.loyalty.minCoeff() >= 0.0);
  CHECK(r.loyalty.maxCoeff() <= 1.0);
  CHECK((r.vote_matrix.values().array() == 0).count() == 0);
  CHECK(r.fiedler_loyalty_corr >= -1.0);
  CHECK(r.fiedler_loyalty_corr <= 1.0);
}

TEST_CASE("loyalty follows Beta(alpha, 1)") {
  // mean alpha / (alpha + 1), and P(loyalty < 0.5) = 0.5^alpha; 4000 draws
  // pooled over 40 seeds keeps each spectral step small
  for (double alpha : {1.0, 3.0, 10.0}) {
    std::vector<double> draws;
    for (std::uint64_t s = 0; s < 40; ++s) {
      SimConfig cfg;
      cfg.alpha = alpha;
      cfg.n_members = 100;
      cfg.n_votes = 2;
      cfg.seed = 1 + s;
      const auto r = simulate(cfg);
      draws.insert(draws.end(), r.loyalty.data(), r.loyalty.data() + r.loyalty.size());
    }
    REQUIRE(draws.size() == 4000);
    CHECK(stats::mean(draws) == doctest::Approx(alpha / (alpha + 1.0)).epsilon(0.02));
    const double below =
        static_cast<double>(std::count_if(draws.begin(), draws.end(), [](double l) { return l < 0.5; })) / 4000.0;
    CHECK(below == doctest::Approx(std::pow(0.5, alpha)).epsilon(0.1).scale(0.02));
  }
}

TEST_CASE("infinite alpha: perfect party-line votes and exact correlation") {
  SimConfig cfg;
  cfg.alpha = std::numeric_limits<double>::infinity();
  cfg.n_members = 30;
  cfg.n_votes = 80;
  cfg.seed = 2;
  const auto r = simulate(cfg);
  CHECK(r.loyalty.minCoeff() == 1.0);
  for (Index j = 0; j < r.vote_matrix.m(); ++j) {
    CHECK(r.vote_matrix.yeas(j) == 15);
    CHECK(r.vote_matrix.nays(j) == 15);
    for (Index i = 1; i < 15; ++i) CHECK(r.vote_matrix(i, j) == r.vote_matrix(0, j));
  }
  CHECK(std::abs(r.fiedler_loyalty_corr) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.within_party_variance < 1e-20);
}

TEST_CASE("sign of the Fiedler vector recovers party at high loyalty") {
  for (double alpha : {10.0, 20.0, 30.0}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      SimConfig cfg;
      cfg.alpha = alpha;
      cfg.seed = s;
      const auto r = simulate(cfg);
      int agree = 0;
      for (Index i = 0; i < r.party.size(); ++i)
        if ((r.fiedler(i) > 0) == (r.party(i) > 0)) ++agree;
      const int best = std::max(agree, static_cast<int>(r.party.size()) - agree);
      CHECK(best >= 95);
    }
  }
}

TEST_CASE("simulated matrices go through the full pipeline unchanged") {
  SimConfig cfg;
  cfg.alpha = 8.0;
  cfg.n_members = 40;
  cfg.n_votes = 150;
  cfg.seed = 5;
  const auto r = simulate(cfg);
  const auto filtered = filter_minority(r.vote_matrix);
  PdmConfig pc;
  pc.seed = 1;
  const auto d = decompose(filtered, pc);
  REQUIRE_FALSE(d.layers.empty());
  CHECK((d.approximation() + d.residual - filtered.as_real()).cwiseAbs().maxCoeff() <= 1e-8);
  const auto rep = score(predict_signs(d.approximation(1), filtered), filtered);
  CHECK(rep.percent_correct > 80.0);
}

TEST_CASE("experiment trends across alpha") {
  const auto grid = parse_alpha_grid("1:30:1.5");
  REQUIRE(grid.size() == 20);
  const auto s = run_experiment(grid, 4, 7);
  CHECK(s.trials.size() == 80);
  CHECK(s.per_alpha.size() == 20);
  CHECK(s.corr_trend > 0.8);
  CHECK(s.localization_trend < -0.8);
  CHECK(s.mean_abs_corr >= 0.9);
  CHECK(s.mean_abs_corr <= 1.0);
  // plot data: four alphas spread over the grid, every member once per alpha
  CHECK(s.plot.size() == 400);
  CHECK(s.plot.front().alpha == grid.front());
  CHECK(s.plot.back().alpha == grid.back());
  // summary statistics agree with the recorded trials
  std::vector<double> all;
  for (const auto& t : s.trials) all.push_back(t.abs_corr);
  CHECK(s.mean_abs_corr == doctest::Approx(stats::mean(all)));
  CHECK(s.variance_abs_corr == doctest::Approx(stats::variance(all)));
  const auto again = run_experiment(grid, 4, 7);
  CHECK(again.mean_abs_corr == s.mean_abs_corr);
}

TEST_CASE("alpha grid parsing") {
  const auto g = parse_alpha_grid("1:30:0.3");
  CHECK(g.size() == 97);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == doctest::Approx(29.8));
  CHECK(parse_alpha_grid("2:3:0.5") == std::vector<double>{2.0, 2.5, 3.0});
  CHECK(parse_alpha_grid("7") == std::vector<double>{7.0});
  CHECK(parse_alpha_grid("1e9").front() == 1e9);
  CHECK_THROWS_AS(parse_alpha_grid("0"), Error);
  CHECK_THROWS_AS(parse_alpha_grid("-1:3:1"), Error);
  CHECK_THROWS_AS(parse_alpha_grid("1:3:0"), Error);
  CHECK_THROWS_AS(parse_alpha_grid("3:1:1"), Error);
  CHECK_THROWS_AS(parse_alpha_grid("1:2"), Error);
  CHECK_THROWS_AS(parse_alpha_grid("abc"), Error);
  CHECK_THROWS_AS(parse_alpha_grid(""), Error);
}

TEST_CASE("simulation parameter errors") {
  SimConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg.alpha = -2.0;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg.alpha = 1.0;
  cfg.beta = 2.0;
  CHECK_THROWS_AS(simulate(cfg), Error);
  CHECK_THROWS_AS(run_experiment({}, 3, 1), Error);
  CHECK_THROWS_AS(run_experiment({1.0}, 0, 1), Error);
}

TEST_CASE("summary statistics") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == 1.25);
  CHECK(stats::pearson(x, std::vector<double>{2, 4, 6, 8}) == doctest::Approx(1.0));
  CHECK(stats::pearson(x, std::vector<double>{8, 6, 4, 2}) == doctest::Approx(-1.0));
  CHECK(stats::pearson(x, std::vector<double>{5, 5, 5, 5}) == 0.0);
  CHECK(stats::average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
  CHECK(stats::spearman(x, std::vector<double>{1, 10, 100, 1000}) == doctest::Approx(1.0));
  CHECK(stats::spearman(x, std::vector<double>{3, 2, 1, 0}) == doctest::Approx(-1.0));
}
