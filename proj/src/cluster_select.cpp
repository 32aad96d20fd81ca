#include "pdm/cluster_select.hpp"

#include "pdm/error.hpp"
#include "pdm/rng.hpp"
#include "pdm/rollcall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pdm {

namespace {

// A component carrying less than this many points has no variance estimate
// of its own; the fit is treated as singular.
constexpr double kMinComponentMass = 2.0;

std::optional<KMeansResult> kmeans_once(const Eigen::MatrixXd& points, int k, Rng& rng,
                                        int max_iterations) {
  const Index n = points.rows();
  if (k < 1 || k > n) return std::nullopt;

  // k-means++ seeding
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (points.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    if (!(total > 0.0)) return std::nullopt;
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng);
    Index chosen = n - 1;
    for (Index i = 0; i < n; ++i) {
      target -= d2(i);
      if (target < 0.0 && d2(i) > 0.0) {
        chosen = i;
        break;
      }
    }
    while (d2(chosen) <= 0.0 && chosen > 0) --chosen;
    centers.row(c) = points.row(chosen);
    for (Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (points.row(i) - centers.row(c)).squaredNorm());
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) return std::nullopt;
      centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    }
    if (!changed) break;
  }

  KMeansResult out;
  out.labels = std::move(labels);
  out.centroids = std::move(centers);
  for (Index i = 0; i < n; ++i) {
    out.inertia += (points.row(i) - out.centroids.row(out.labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return out;
}

// Renumber labels by order of first appearance.
void canonicalize(KMeansResult& r) {
  const int k = static_cast<int>(r.centroids.rows());
  std::vector<int> map(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int& label : r.labels) {
    auto& slot = map[static_cast<std::size_t>(label)];
    if (slot < 0) slot = next++;
    label = slot;
  }
  Eigen::MatrixXd c(k, r.centroids.cols());
  for (int old = 0; old < k; ++old) c.row(map[static_cast<std::size_t>(old)]) = r.centroids.row(old);
  r.centroids = std::move(c);
}

std::optional<GaussianMixture1d> em_from(std::span<const double> x, GaussianMixture1d g,
                                         double floor, int max_iterations) {
  const auto n = x.size();
  const auto c = g.means.size();
  Eigen::MatrixXd resp(static_cast<Index>(n), static_cast<Index>(c));
  const double log2pi = std::log(2.0 * std::numbers::pi);

  auto e_step = [&]() {
    std::vector<double> base(c), inv(c), lp(c);
    for (std::size_t k = 0; k < c; ++k) {
      base[k] = std::log(g.weights[k]) - 0.5 * (log2pi + std::log(g.variances[k]));
      inv[k] = 0.5 / g.variances[k];
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < c; ++k) {
        const double dx = x[i] - g.means[k];
        lp[k] = base[k] - dx * dx * inv[k];
        mx = std::max(mx, lp[k]);
      }
      double s = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        lp[k] = std::exp(lp[k] - mx);
        s += lp[k];
      }
      ll += mx + std::log(s);
      for (std::size_t k = 0; k < c; ++k) resp(static_cast<Index>(i), static_cast<Index>(k)) = lp[k] / s;
    }
    return ll;
  };

  double prev = e_step();
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    for (std::size_t k = 0; k < c; ++k) {
      const auto kk = static_cast<Index>(k);
      const double nk = resp.col(kk).sum();
      if (!(nk > 1e-10)) return std::nullopt;
      double mu = 0.0;
      for (std::size_t i = 0; i < n; ++i) mu += resp(static_cast<Index>(i), kk) * x[i];
      mu /= nk;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mu;
        var += resp(static_cast<Index>(i), kk) * dx * dx;
      }
      g.weights[k] = nk / static_cast<double>(n);
      g.means[k] = mu;
      g.variances[k] = std::max(var / nk, floor);
    }
    const double ll = e_step();
    if (!std::isfinite(ll)) return std::nullopt;
    const bool done = std::abs(ll - prev) <= 1e-10 * std::max(1.0, std::abs(ll));
    prev = ll;
    if (done) break;
  }
  for (std::size_t k = 0; k < c; ++k) {
    if (g.weights[k] * static_cast<double>(n) < kMinComponentMass) return std::nullopt;
  }
  g.log_likelihood = prev;
  g.iterations = iter;
  return g;
}

} // namespace

std::optional<GaussianMixture1d> fit_gaussian_mixture(std::span<const double> x, int components,
                                                      std::uint64_t seed, int restarts,
                                                      int max_iterations, double variance_floor) {
  const auto n = x.size();
  if (components < 1 || static_cast<std::size_t>(components) > n) return std::nullopt;
  Eigen::MatrixXd points(static_cast<Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) points(static_cast<Index>(i), 0) = x[i];
  const double mean = points.mean();
  const double total_var = (points.array() - mean).square().sum() / static_cast<double>(n);
  if (!(total_var > 0.0)) return std::nullopt;
  const double floor = variance_floor * total_var;

  std::optional<GaussianMixture1d> best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    auto init = kmeans_once(points, components, rng, 100);
    if (!init) continue;
    GaussianMixture1d g;
    const auto c = static_cast<std::size_t>(components);
    g.weights.assign(c, 0.0);
    g.means.assign(c, 0.0);
    g.variances.assign(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(init->labels[i]);
      g.weights[k] += 1.0;
    }
    for (std::size_t k = 0; k < c; ++k) g.means[k] = init->centroids(static_cast<Index>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(init->labels[i]);
      const double dx = x[i] - g.means[k];
      g.variances[k] += dx * dx;
    }
    for (std::size_t k = 0; k < c; ++k) {
      g.variances[k] = std::max(g.variances[k] / g.weights[k], floor);
      g.weights[k] /= static_cast<double>(n);
    }
    auto fit = em_from(x, std::move(g), floor, max_iterations);
    if (fit && (!best || fit->log_likelihood > best->log_likelihood)) best = std::move(fit);
  }
  return best;
}

double information_criterion(const GaussianMixture1d& fit, std::size_t n,
                             InformationCriterion criterion) {
  // weights, means and variances, minus the simplex constraint
  const double params = 3.0 * static_cast<double>(fit.means.size()) - 1.0;
  const double penalty = criterion == InformationCriterion::aic
                             ? 2.0 * params
                             : params * std::log(static_cast<double>(n));
  return penalty - 2.0 * fit.log_likelihood;
}

int choose_k0(const std::vector<std::pair<int, double>>& curve, double window) {
  if (curve.empty()) throw Error("numerical", "empty information-criterion curve");
  double mn = std::numeric_limits<double>::infinity();
  bool positive = true;
  for (const auto& [c, v] : curve) {
    mn = std::min(mn, v);
    positive = positive && v > 0.0;
  }
  const double shift = positive ? 0.0 : mn - 1.0;
  const double min_shifted = mn - shift;

  std::vector<int> within;
  for (const auto& [c, v] : curve) {
    // v is "not 5% worse" than the minimum: min > (1 - window) * v
    if (min_shifted > (1.0 - window) * (v - shift) || v == mn) within.push_back(c);
  }
  std::sort(within.begin(), within.end());
  return within[(within.size() - 1) / 2];
}

K0Selection select_k0(const Eigen::VectorXd& fiedler, std::uint64_t seed, const K0Config& config) {
  if (fiedler.size() < 4) throw Error("data", "select_k0 needs at least four values");
  if (config.min_components < 2 || config.max_components < config.min_components) {
    throw Error("parameter", "invalid Gaussian mixture component range");
  }
  std::vector<double> x(fiedler.data(), fiedler.data() + fiedler.size());
  K0Selection out;
  for (int c = config.min_components; c <= config.max_components; ++c) {
    auto fit = fit_gaussian_mixture(x, c, derive_seed(seed, static_cast<std::uint64_t>(c)),
                                    config.em_restarts, config.em_max_iterations,
                                    config.variance_floor);
    if (!fit) {
      out.diagnostics.push_back("mixture with " + std::to_string(c) +
                                " components failed (singular component); skipped");
      continue;
    }
    out.curve.emplace_back(c, information_criterion(*fit, x.size(), config.criterion));
  }
  if (out.curve.empty()) {
    throw Error("numerical", "Gaussian mixture fit failed for every component count");
  }
  out.k0 = choose_k0(out.curve, config.tie_window);
  return out;
}

LSelection select_l(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& data, int null_reps,
                    std::uint64_t seed, double sigma) {
  if (null_reps < 1) throw Error("parameter", "null_reps must be at least 1");
  LSelection out;
  out.null_fiedler_min = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd shuffled(data.rows(), data.cols());
  for (int r = 0; r < null_reps; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    shuffled = data;
    for (Index j = 0; j < shuffled.cols(); ++j) {
      double* col = shuffled.col(j).data();
      std::shuffle(col, col + shuffled.rows(), rng);
    }
    const Eigen::VectorXd spectrum = laplacian_spectrum(shuffled, sigma);
    if (spectrum.size() < 2) continue;
    const double f = smallest_nonzero(spectrum);
    out.null_fiedler_values.push_back(f);
    out.null_fiedler_min = std::min(out.null_fiedler_min, f);
  }
  for (Index k = 1; k < eigenvalues.size(); ++k) {
    const double lambda = eigenvalues(k);
    if (lambda > kEigenTolerance && lambda < out.null_fiedler_min) ++out.l;
  }
  return out;
}

LSelection select_l(const Eigen::VectorXd& eigenvalues, const VoteMatrix& v, int null_reps,
                    std::uint64_t seed, double sigma) {
  return select_l(eigenvalues, v.as_real(), null_reps, seed, sigma);
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
                    int max_iterations) {
  if (k < 1) throw Error("parameter", "k must be positive");
  if (k > points.rows()) {
    throw Error("data", "cannot form " + std::to_string(k) + " clusters from " +
                            std::to_string(points.rows()) + " points");
  }
  std::optional<KMeansResult> best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    auto run = kmeans_once(points, k, rng, max_iterations);
    if (run && (!best || run->inertia < best->inertia)) best = std::move(run);
  }
  if (!best) {
    throw Error("data", "k-means could not produce " + std::to_string(k) +
                            " nonempty clusters in any restart");
  }
  canonicalize(*best);
  return std::move(*best);
}

Clustering cluster(const Eigen::MatrixXd& eigenvectors, int l, int k0, std::uint64_t seed,
                   int restarts, bool row_normalize) {
  const Index n = eigenvectors.rows();
  if (l < 1 || l > n - 1) throw Error("parameter", "embedding dimension must lie in 1..n-1");
  if (k0 < 2) throw Error("parameter", "k0 must be at least 2");
  if (k0 > n) {
    throw Error("data", "k0 = " + std::to_string(k0) + " exceeds the " + std::to_string(n) +
                            " active legislators");
  }
  Clustering out;
  out.embedding = eigenvectors.middleCols(1, l);
  if (row_normalize) {
    for (Index i = 0; i < n; ++i) {
      const double norm = out.embedding.row(i).norm();
      if (norm > 0.0) out.embedding.row(i) /= norm;
    }
  }
  auto km = kmeans(out.embedding, k0, seed, restarts);
  out.rows.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.rows[static_cast<std::size_t>(i)] = i;
  out.labels = std::move(km.labels);
  out.centroids = std::move(km.centroids);
  out.inertia = km.inertia;
  return out;
}

} // namespace pdm
