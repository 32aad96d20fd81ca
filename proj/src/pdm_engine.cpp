#include "pdm/pdm_engine.hpp"

#include "pdm/error.hpp"
#include "pdm/rng.hpp"
#include "pdm/rollcall.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pdm {

namespace {

// Streams derived from a layer seed.
enum Stream : std::uint64_t {
  kNullDims = 1,
  kMixture = 2,
  kKMeans = 3,
  kStopTest = 4,
  kRowTest = 5,
};

constexpr double kZeroCentroid = 1e-12;
constexpr double kZeroResidual = 1e-9;

Eigen::MatrixXd stack(const std::vector<Motivation>& motivations, Index m, bool basis_only) {
  std::vector<const Motivation*> used;
  for (const auto& mot : motivations) {
    if (!basis_only || mot.in_basis) used.push_back(&mot);
  }
  Eigen::MatrixXd out(m, static_cast<Index>(used.size()));
  for (std::size_t k = 0; k < used.size(); ++k) out.col(static_cast<Index>(k)) = used[k]->vector;
  return out;
}

double condition_of(const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return 1.0;
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Least squares with one step of iterative refinement; columns of `rhs` are
// the right-hand sides.
Eigen::MatrixXd solve_least_squares(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& rhs) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd coef = qr.solve(rhs);
  const Eigen::MatrixXd r = rhs - basis * coef;
  coef += qr.solve(r);
  return coef;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& a, const std::vector<Index>& rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = a.row(rows[k]);
  return out;
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Index> rows_below_null_quantile(const Eigen::MatrixXd& residual, int reps,
                                            std::uint64_t seed, double q) {
  std::vector<double> pool;
  pool.reserve(static_cast<std::size_t>(reps) * static_cast<std::size_t>(residual.rows()));
  Eigen::MatrixXd shuffled;
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    shuffled = residual;
    for (Index j = 0; j < shuffled.cols(); ++j) {
      double* col = shuffled.col(j).data();
      std::shuffle(col, col + shuffled.rows(), rng);
    }
    for (Index i = 0; i < shuffled.rows(); ++i) pool.push_back(shuffled.row(i).norm());
  }
  const double cut = quantile(std::move(pool), q);
  std::vector<Index> out;
  for (Index i = 0; i < residual.rows(); ++i) {
    if (residual.row(i).norm() < cut) out.push_back(i);
  }
  return out;
}

// Keeps the largest clusters first and skips any motivation that would push
// the Gram condition number past the limit.
void choose_basis(std::vector<Motivation>& motivations, const Clustering& clustering, Index m,
                  double limit, std::vector<std::string>& diagnostics) {
  Eigen::MatrixXd all = stack(motivations, m, false);
  if (condition_of(all) <= limit) return;

  std::vector<int> size(static_cast<std::size_t>(clustering.k()), 0);
  for (int label : clustering.labels) ++size[static_cast<std::size_t>(label)];
  std::vector<std::size_t> order(motivations.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return size[static_cast<std::size_t>(motivations[a].source_cluster)] >
           size[static_cast<std::size_t>(motivations[b].source_cluster)];
  });
  for (auto& mot : motivations) mot.in_basis = false;
  for (std::size_t k : order) {
    motivations[k].in_basis = true;
    if (condition_of(stack(motivations, m, true)) > limit) {
      motivations[k].in_basis = false;
      diagnostics.push_back("motivation of cluster " + std::to_string(motivations[k].source_cluster) +
                            " is linearly dependent on the others; excluded from the projection basis");
    }
  }
}

std::size_t count_distinct_rows(const Eigen::MatrixXd& points) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < points.cols(); ++j) row.push_back(points(i, j));
  }
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

} // namespace

MotivationSet motivations_from_clusters(const Eigen::MatrixXd& data, const Clustering& clustering,
                                        int layer) {
  const int k = clustering.k();
  std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(k), Eigen::VectorXd::Zero(data.cols()));
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t r = 0; r < clustering.rows.size(); ++r) {
    const auto label = static_cast<std::size_t>(clustering.labels[r]);
    sums[label] += data.row(clustering.rows[r]).transpose();
    ++counts[label];
  }
  MotivationSet out;
  for (int c = 0; c < k; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    if (counts[cc] == 0) throw Error("data", "cluster " + std::to_string(c) + " is empty");
    const Eigen::VectorXd centroid = sums[cc] / counts[cc];
    const double norm = centroid.norm();
    if (!(norm > kZeroCentroid)) {
      out.diagnostics.push_back("cluster " + std::to_string(c) +
                                " has a zero centroid; no motivation produced");
      continue;
    }
    out.motivations.push_back({centroid / norm, c, layer, true});
  }
  return out;
}

double gram_condition(const std::vector<Motivation>& motivations) {
  if (motivations.empty()) return 1.0;
  return condition_of(stack(motivations, motivations.front().vector.size(), false));
}

Projection project(const Eigen::VectorXd& row, const std::vector<Motivation>& motivations,
                   double condition_limit) {
  if (motivations.empty()) return {Eigen::VectorXd(0), Eigen::VectorXd::Zero(row.size())};
  const Eigen::MatrixXd basis = stack(motivations, row.size(), false);
  const double cond = condition_of(basis);
  if (!(cond <= condition_limit)) {
    throw Error("numerical",
                "motivations are not linearly independent (Gram condition number " +
                    std::to_string(cond) + "); adjust the clustering parameters");
  }
  Projection p;
  p.weights = solve_least_squares(basis, row);
  p.approx = basis * p.weights;
  return p;
}

Eigen::MatrixXd approximation_from(const Eigen::MatrixXd& weights,
                                   const std::vector<Motivation>& motivations, Index m) {
  return weights * stack(motivations, m, false).transpose();
}

std::vector<int> LayerModel::assignment(Index n) const {
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (std::size_t r = 0; r < clustering.rows.size(); ++r) {
    out[static_cast<std::size_t>(clustering.rows[r])] = clustering.labels[r];
  }
  return out;
}

const char* to_string(StopReason r) noexcept {
  switch (r) {
  case StopReason::residual_random: return "residual_random";
  case StopReason::max_layers: return "max_layers";
  case StopReason::no_significant_dims: return "no_significant_dims";
  }
  return "unknown";
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "residual_random") return StopReason::residual_random;
  if (s == "max_layers") return StopReason::max_layers;
  if (s == "no_significant_dims") return StopReason::no_significant_dims;
  throw Error("parse", "unknown stop reason '" + s + "'");
}

Eigen::MatrixXd Decomposition::approximation(int count) const {
  const auto use = count < 0 ? layers.size() : std::min(layers.size(), static_cast<std::size_t>(count));
  // A decomposition read back from disk has layers but no residual.
  const Index rows = layers.empty() ? residual.rows() : layers.front().approximation.rows();
  const Index cols = layers.empty() ? residual.cols() : layers.front().approximation.cols();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t k = 0; k < use; ++k) sum += layers[k].approximation;
  return sum;
}

bool residual_is_random(const Eigen::MatrixXd& residual, int null_reps, std::uint64_t seed,
                        double sigma) {
  if (residual.size() == 0 || residual.cwiseAbs().maxCoeff() <= kZeroResidual) return true;
  SpectralGraph graph;
  try {
    graph = build_spectral_graph(residual, sigma);
  } catch (const Error& e) {
    if (e.kind() == "data") return true;
    throw;
  }
  const auto sub = take_rows(residual, graph.active_rows);
  return select_l(graph.eigenvalues, sub, null_reps, seed, sigma).l == 0;
}

Decomposition decompose(const Eigen::MatrixXd& data, const PdmConfig& config) {
  if (config.max_layers < 1) throw Error("parameter", "max_layers must be at least 1");
  if (config.null_reps < 1) throw Error("parameter", "null_reps must be at least 1");
  const Index n = data.rows();
  const Index m = data.cols();

  Decomposition out;
  Eigen::MatrixXd current = data;
  bool stopped = false;

  for (int layer = 1; layer <= config.max_layers && !stopped; ++layer) {
    const std::uint64_t layer_seed = derive_seed(config.seed, static_cast<std::uint64_t>(layer));
    LayerModel model;
    model.layer_index = layer;

    std::vector<Index> candidates(static_cast<std::size_t>(n));
    std::iota(candidates.begin(), candidates.end(), Index{0});
    if (layer > 1) {
      if (residual_is_random(current, config.null_reps, derive_seed(layer_seed, kStopTest),
                             config.sigma)) {
        out.stop_reason = StopReason::residual_random;
        stopped = true;
        break;
      }
      if (config.exclude_null_rows) {
        model.null_rows = rows_below_null_quantile(current, config.null_reps,
                                                   derive_seed(layer_seed, kRowTest),
                                                   config.null_row_quantile);
        std::vector<Index> kept;
        std::set_difference(candidates.begin(), candidates.end(), model.null_rows.begin(),
                            model.null_rows.end(), std::back_inserter(kept));
        candidates = std::move(kept);
        model.diagnostics.push_back(std::to_string(model.null_rows.size()) +
                                    " legislator(s) with residual indistinguishable from the "
                                    "null model excluded from clustering");
      }
    }

    const Eigen::MatrixXd sub = take_rows(current, candidates);
    SpectralGraph graph;
    try {
      graph = build_spectral_graph(sub, config.sigma);
    } catch (const Error& e) {
      if (e.kind() != "data") throw;
      out.diagnostics.push_back("layer " + std::to_string(layer) + ": " + e.what());
      out.stop_reason = StopReason::no_significant_dims;
      stopped = true;
      break;
    }
    for (Index r : graph.no_signal_rows) {
      model.no_signal_rows.push_back(candidates[static_cast<std::size_t>(r)]);
    }
    model.diagnostics.insert(model.diagnostics.end(), graph.diagnostics.begin(),
                             graph.diagnostics.end());
    if (graph.size() < 4) {
      out.diagnostics.push_back("layer " + std::to_string(layer) +
                                ": fewer than four informative legislators");
      out.stop_reason = StopReason::no_significant_dims;
      stopped = true;
      break;
    }

    std::vector<Index> graph_rows; // indices into `current`
    for (Index r : graph.active_rows) graph_rows.push_back(candidates[static_cast<std::size_t>(r)]);
    const Eigen::MatrixXd graph_data = take_rows(current, graph_rows);

    auto lsel = select_l(graph.eigenvalues, graph_data, config.null_reps,
                         derive_seed(layer_seed, kNullDims), config.sigma);
    model.params.l = lsel.l;
    model.params.null_fiedler_min = lsel.null_fiedler_min;
    model.params.null_reps = config.null_reps;
    if (lsel.l == 0) {
      out.diagnostics.push_back("layer " + std::to_string(layer) +
                                ": no Laplacian eigenvalue below the null-model Fiedler minimum");
      out.stop_reason = StopReason::no_significant_dims;
      stopped = true;
      break;
    }

    auto ksel = select_k0(graph.fiedler_vector(), derive_seed(layer_seed, kMixture), config.k0);
    model.params.aic_curve = ksel.curve;
    model.diagnostics.insert(model.diagnostics.end(), ksel.diagnostics.begin(),
                             ksel.diagnostics.end());
    int k0 = ksel.k0;
    const auto distinct = count_distinct_rows(graph.eigenvectors.middleCols(1, lsel.l));
    if (distinct < 2) {
      out.diagnostics.push_back("layer " + std::to_string(layer) +
                                ": spectral embedding collapses to a single point");
      out.stop_reason = StopReason::no_significant_dims;
      stopped = true;
      break;
    }
    if (static_cast<std::size_t>(k0) > distinct) {
      model.diagnostics.push_back("k0 reduced from " + std::to_string(k0) + " to " +
                                  std::to_string(distinct) +
                                  ", the number of distinct embedded points");
      k0 = static_cast<int>(distinct);
    }
    model.params.k0 = k0;

    model.clustering = cluster(graph.eigenvectors, lsel.l, k0, derive_seed(layer_seed, kKMeans),
                               config.kmeans_restarts, config.row_normalize);
    for (auto& r : model.clustering.rows) r = graph_rows[static_cast<std::size_t>(r)];

    auto mset = motivations_from_clusters(current, model.clustering, layer);
    model.diagnostics.insert(model.diagnostics.end(), mset.diagnostics.begin(),
                             mset.diagnostics.end());
    if (mset.motivations.empty()) throw Error("numerical", "every cluster centroid vanished");
    model.motivations = std::move(mset.motivations);
    choose_basis(model.motivations, model.clustering, m, config.gram_condition_limit,
                 model.diagnostics);

    const Eigen::MatrixXd basis = stack(model.motivations, m, true);
    const Eigen::MatrixXd coef = solve_least_squares(basis, graph_data.transpose());
    model.weights = Eigen::MatrixXd::Zero(n, static_cast<Index>(model.motivations.size()));
    Index col = 0;
    for (std::size_t k = 0; k < model.motivations.size(); ++k) {
      if (!model.motivations[k].in_basis) continue;
      for (std::size_t r = 0; r < graph_rows.size(); ++r) {
        model.weights(graph_rows[r], static_cast<Index>(k)) = coef(col, static_cast<Index>(r));
      }
      ++col;
    }
    model.approximation = approximation_from(model.weights, model.motivations, m);
    current -= model.approximation;
    out.layers.push_back(std::move(model));
  }

  if (!stopped) {
    const std::uint64_t next_seed =
        derive_seed(config.seed, static_cast<std::uint64_t>(config.max_layers + 1));
    out.stop_reason = residual_is_random(current, config.null_reps,
                                         derive_seed(next_seed, kStopTest), config.sigma)
                          ? StopReason::residual_random
                          : StopReason::max_layers;
  }
  out.residual = std::move(current);
  return out;
}

Decomposition decompose(const VoteMatrix& v, const PdmConfig& config) {
  return decompose(v.as_real(), config);
}

} // namespace pdm
