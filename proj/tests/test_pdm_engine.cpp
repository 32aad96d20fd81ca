#include "oracles.hpp"

#include "pdm/error.hpp"
#include "pdm/evaluate.hpp"
#include "pdm/pdm_engine.hpp"

#include <doctest.h>

using namespace pdm;

namespace {

Motivation unit(std::initializer_list<double> xs, int cluster = 0) {
  Eigen::VectorXd v(static_cast<Index>(xs.size()));
  Index k = 0;
  for (double x : xs) v(k++) = x;
  return {v.normalized(), cluster, 1, true};
}

// Residual of each clustered row must be orthogonal to every basis motivation.
double max_orthogonality_violation(const Decomposition& d, const Eigen::MatrixXd& data) {
  double worst = 0.0;
  Eigen::MatrixXd before = data;
  for (const auto& layer : d.layers) {
    const Eigen::MatrixXd after = before - layer.approximation;
    for (Index r : layer.clustering.rows)
      for (const auto& mot : layer.motivations)
        if (mot.in_basis) worst = std::max(worst, std::abs(after.row(r).dot(mot.vector)));
    before = after;
  }
  return worst;
}

} // namespace

TEST_CASE("motivations are normalised cluster centroids") {
  Eigen::MatrixXd data(4, 3);
  data << 1, 1, -1,
          1, -1, -1,
          -1, 1, 1,
          -1, 1, 1;
  Clustering c;
  c.rows = {0, 1, 2, 3};
  c.labels = {0, 0, 1, 1};
  c.centroids = Eigen::MatrixXd::Zero(2, 1);
  const auto ms = motivations_from_clusters(data, c, 1);
  REQUIRE(ms.motivations.size() == 2);
  // centroid of rows 0,1 is (1, 0, -1) -> (1, 0, -1)/sqrt 2
  CHECK(ms.motivations[0].vector(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(ms.motivations[0].vector(1) == doctest::Approx(0.0));
  CHECK(ms.motivations[0].vector(2) == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(ms.motivations[1].vector.norm() == doctest::Approx(1.0));
  CHECK(ms.motivations[1].vector(0) == doctest::Approx(-1 / std::sqrt(3.0)));
  CHECK(ms.motivations[1].source_cluster == 1);
  CHECK(ms.diagnostics.empty());
}

TEST_CASE("a cluster with a zero centroid gives no motivation") {
  Eigen::MatrixXd data(4, 2);
  data << 1, -1, -1, 1, 1, 1, 1, 1;
  Clustering c;
  c.rows = {0, 1, 2, 3};
  c.labels = {0, 0, 1, 1};
  c.centroids = Eigen::MatrixXd::Zero(2, 1);
  const auto ms = motivations_from_clusters(data, c, 2);
  REQUIRE(ms.motivations.size() == 1);
  CHECK(ms.motivations[0].source_cluster == 1);
  CHECK(ms.motivations[0].layer == 2);
  CHECK(ms.diagnostics.size() == 1);
}

TEST_CASE("projection on hand examples") {
  // row equal to a motivation: weight is its norm
  const auto p = project((Eigen::VectorXd(3) << 1, 1, 0).finished(), {unit({1, 1, 0})});
  CHECK(p.weights(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK((p.approx - Eigen::Vector3d(1, 1, 0)).norm() < 1e-12);
  // orthogonal row projects to zero
  const auto q = project((Eigen::VectorXd(3) << 1, -1, 0).finished(), {unit({1, 1, 0})});
  CHECK(std::abs(q.weights(0)) < 1e-12);
  CHECK(q.approx.norm() < 1e-12);
  // empty basis: zero approximation
  const auto e = project(Eigen::Vector3d(1, 2, 3), {});
  CHECK(e.approx.norm() == 0.0);
  // (near) dependent motivations are rejected
  CHECK_THROWS_AS(project(Eigen::Vector3d(1, 0, 0), {unit({1, 0, 0}), unit({1, 1e-9, 0})}), Error);
  CHECK(gram_condition({unit({1, 0, 0}), unit({0, 1, 0})}) == doctest::Approx(1.0));
}

TEST_CASE("projection agrees with the normal equations") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 5 + trial % 20;
    const int k = 1 + trial % 4;
    std::vector<Motivation> mots;
    oracle::Mat cols;
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd v(m);
      for (int j = 0; j < m; ++j) v(j) = z(rng);
      v.normalize();
      mots.push_back({v, c, 1, true});
      cols.emplace_back(v.data(), v.data() + m);
    }
    Eigen::VectorXd row(m);
    for (int j = 0; j < m; ++j) row(j) = static_cast<double>(static_cast<int>(rng() % 3) - 1);
    const auto p = project(row, mots);
    const auto w = oracle::normal_equations(cols, std::vector<double>(row.data(), row.data() + m));
    for (int c = 0; c < k; ++c) CHECK(p.weights(c) == doctest::Approx(w[static_cast<std::size_t>(c)]).epsilon(1e-9));
    // residual is orthogonal to the span
    for (const auto& mot : mots) CHECK(std::abs((row - p.approx).dot(mot.vector)) < 1e-10);
    // projecting the projection changes nothing
    const auto pp = project(p.approx, mots);
    CHECK((pp.approx - p.approx).norm() < 1e-10);
  }
}

TEST_CASE("perfectly polarized matrix: one layer, two exact blocs, perfect prediction") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto v = oracle::two_bloc(24, 60, s);
    PdmConfig cfg;
    cfg.seed = s;
    const auto d = decompose(v, cfg);
    REQUIRE(d.layers.size() == 1);
    const auto& layer = d.layers.front();
    CHECK(layer.params.k0 == 2);
    CHECK(layer.params.l >= 1);
    std::vector<int> truth;
    for (int i = 0; i < 24; ++i) truth.push_back(i < 12 ? 0 : 1);
    CHECK(oracle::adjusted_rand(layer.assignment(24), truth) == doctest::Approx(1.0));
    CHECK(d.stop_reason == StopReason::residual_random);
    CHECK(d.residual.cwiseAbs().maxCoeff() < 1e-8);
    const auto rep = score(predict_signs(d.approximation(1), v), v);
    CHECK(rep.percent_correct == 100.0);
    REQUIRE(rep.apre);
    CHECK(*rep.apre == 1.0);
  }
}

TEST_CASE("decomposition identity and orthogonality on every run") {
  std::vector<VoteMatrix> inputs;
  for (std::uint64_t s = 0; s < 3; ++s) inputs.push_back(oracle::party_region(40, 120, 80, 0.1, 0.15, s).votes);
  inputs.push_back(oracle::random_matrix(30, 90, 5));
  inputs.push_back(oracle::random_matrix(30, 90, 6, 0.2));
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const auto& v = inputs[t];
    PdmConfig cfg;
    cfg.seed = t;
    cfg.max_layers = 3;
    const auto d = decompose(v, cfg);
    const Eigen::MatrixXd data = v.as_real();
    // V = sum A + R
    CHECK((d.approximation() + d.residual - data).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(max_orthogonality_violation(d, data) <= 1e-8);
    for (const auto& layer : d.layers) {
      CHECK(layer.approximation.rows() == v.n());
      CHECK(layer.weights.rows() == v.n());
      // legislators outside the layer carry zero weight
      const auto a = layer.assignment(v.n());
      for (Index i = 0; i < v.n(); ++i)
        if (a[static_cast<std::size_t>(i)] < 0) CHECK(layer.weights.row(i).norm() == 0.0);
      for (const auto& mot : layer.motivations) CHECK(mot.vector.norm() == doctest::Approx(1.0));
      CHECK(layer.params.k0 >= 2);
      CHECK(layer.params.k0 <= 20);
      CHECK(layer.params.l >= 1);
      CHECK(layer.params.l <= v.n() - 1);
    }
  }
}

TEST_CASE("two-factor planted matrix yields a second layer that follows the regions") {
  const auto planted = oracle::party_region(60, 300, 150, 0.1, 0.15, 1000);
  PdmConfig cfg;
  cfg.seed = 0;
  const auto d = decompose(planted.votes, cfg);
  REQUIRE(d.layers.size() == 2);
  CHECK(oracle::adjusted_rand(d.layers[0].assignment(60), planted.party) == doctest::Approx(1.0));
  const auto a2 = d.layers[1].assignment(60);
  std::vector<int> got, truth;
  for (std::size_t i = 0; i < a2.size(); ++i)
    if (a2[i] >= 0) {
      got.push_back(a2[i]);
      truth.push_back(planted.region[i]);
    }
  CHECK(got.size() >= 50);
  CHECK(oracle::adjusted_rand(got, truth) >= 0.9);
  // residual after two layers is no larger than after one
  const Eigen::MatrixXd data = planted.votes.as_real();
  CHECK((data - d.approximation(2)).norm() <= (data - d.approximation(1)).norm() + 1e-8);
}

TEST_CASE("max_layers caps the decomposition") {
  const auto planted = oracle::party_region(60, 300, 150, 0.1, 0.15, 1000);
  PdmConfig cfg;
  cfg.max_layers = 1;
  const auto d = decompose(planted.votes, cfg);
  CHECK(d.layers.size() == 1);
  CHECK(d.stop_reason == StopReason::max_layers);
  PdmConfig zero_layers;
  zero_layers.max_layers = 0;
  CHECK_THROWS_AS(decompose(planted.votes, zero_layers), Error);
  PdmConfig no_nulls;
  no_nulls.null_reps = 0;
  CHECK_THROWS_AS(decompose(planted.votes, no_nulls), Error);
}

TEST_CASE("decomposition is deterministic for a seed") {
  const auto v = oracle::party_region(40, 120, 80, 0.1, 0.15, 8).votes;
  PdmConfig cfg;
  cfg.seed = 77;
  const auto a = decompose(v, cfg);
  const auto b = decompose(v, cfg);
  REQUIRE(a.layers.size() == b.layers.size());
  CHECK(a.residual == b.residual);
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    CHECK(a.layers[k].clustering.labels == b.layers[k].clustering.labels);
    CHECK(a.layers[k].params.aic_curve == b.layers[k].params.aic_curve);
  }
}

TEST_CASE("random matrices mostly produce no layer") {
  int none = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    PdmConfig cfg;
    cfg.seed = s;
    if (decompose(oracle::random_matrix(40, 120, 300 + s), cfg).layers.empty()) ++none;
  }
  CHECK(none >= 8);
}

TEST_CASE("residual randomness test") {
  CHECK(residual_is_random(Eigen::MatrixXd::Zero(10, 20), 5, 1));
  CHECK(residual_is_random(oracle::random_matrix(40, 120, 4).as_real(), 25, 1));
  CHECK_FALSE(residual_is_random(oracle::two_bloc(30, 60, 1).as_real(), 25, 1));
}

TEST_CASE("stop reasons round-trip through their names") {
  for (auto r : {StopReason::residual_random, StopReason::max_layers, StopReason::no_significant_dims})
    CHECK(stop_reason_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(stop_reason_from_string("tired"), Error);
}

TEST_CASE("approximation_from is W M^T") {
  Eigen::MatrixXd w(2, 2);
  w << 1, 2, 3, 4;
  const std::vector<Motivation> mots{unit({1, 0}), unit({0, 1})};
  const auto a = approximation_from(w, mots, 2);
  CHECK(a == w);
}
