#pragma once

#include "pdm/graph_spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pdm {

class VoteMatrix;

enum class InformationCriterion { aic, bic };

struct K0Config {
  int min_components = 2;
  int max_components = 20;
  double tie_window = 0.05;
  InformationCriterion criterion = InformationCriterion::aic;
  int em_restarts = 5;
  int em_max_iterations = 500;
  // Component variances are floored at this fraction of the sample
  // variance. Without it EM rewards narrow spikes on a handful of nearly
  // equal Fiedler entries and the criterion drifts towards many components.
  double variance_floor = 1e-3;
};

struct ClusterParams {
  int k0 = 0;
  int l = 0;
  std::vector<std::pair<int, double>> aic_curve; // (components, criterion value)
  double null_fiedler_min = 0.0;
  int null_reps = 25;
};

/// Partition of a layer's active legislators. `rows` are indices into the
/// layer's data matrix; `labels[k]` is the cluster of `rows[k]`, canonically
/// numbered by first appearance.
struct Clustering {
  std::vector<Index> rows;
  std::vector<int> labels;
  Eigen::MatrixXd centroids; // k0 x l
  Eigen::MatrixXd embedding; // rows.size() x l
  double inertia = 0.0;

  int k() const noexcept { return static_cast<int>(centroids.rows()); }
};

// ---- one-dimensional Gaussian mixtures -------------------------------------

struct GaussianMixture1d {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  double log_likelihood = 0.0;
  int iterations = 0;
};

/// EM with k-means++ initialisation and `restarts` seeded starts; the best
/// likelihood wins. Component variances are floored at `variance_floor`
/// times the data variance. Returns nullopt when no start yields a usable
/// fit: fewer distinct values than components, or a component left with
/// less than two points' worth of mass (singular).
std::optional<GaussianMixture1d> fit_gaussian_mixture(std::span<const double> x, int components,
                                                      std::uint64_t seed, int restarts = 5,
                                                      int max_iterations = 500,
                                                      double variance_floor = 1e-3);

double information_criterion(const GaussianMixture1d& fit, std::size_t n,
                             InformationCriterion criterion);

/// The selection rule on an already computed criterion curve. If the minimum
/// is at least `window` (relative) below every other value, its component
/// count wins; otherwise the lower median of the counts within the window.
/// Curves with any non-positive value are shifted by (min - 1) first.
int choose_k0(const std::vector<std::pair<int, double>>& curve, double window = 0.05);

struct K0Selection {
  int k0 = 0;
  std::vector<std::pair<int, double>> curve;
  std::vector<std::string> diagnostics;
};

K0Selection select_k0(const Eigen::VectorXd& fiedler, std::uint64_t seed,
                      const K0Config& config = {});

// ---- embedding dimension from null models ----------------------------------

struct LSelection {
  int l = 0;
  double null_fiedler_min = 0.0;
  std::vector<double> null_fiedler_values;
};

/// Each column of `data` permuted independently (margins kept, legislator
/// affinity destroyed), `null_reps` times; l counts the eigenvalues of the
/// real spectrum, past index 0 and above kEigenTolerance, that lie strictly
/// below the smallest null Fiedler value.
LSelection select_l(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& data, int null_reps,
                    std::uint64_t seed, double sigma = kDefaultSigma);
LSelection select_l(const Eigen::VectorXd& eigenvalues, const VoteMatrix& v, int null_reps,
                    std::uint64_t seed, double sigma = kDefaultSigma);

// ---- k-means ---------------------------------------------------------------

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeds, `restarts` seeded runs, lowest
/// inertia kept. A run that ends with an empty cluster is discarded; throws
/// when every run is discarded.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts = 20,
                    int max_iterations = 300);

/// Coordinates (v_1(i), ..., v_l(i)) from the first l nontrivial
/// eigenvectors, then k-means with k0 centres.
Clustering cluster(const Eigen::MatrixXd& eigenvectors, int l, int k0, std::uint64_t seed,
                   int restarts = 20, bool row_normalize = false);

} // namespace pdm
