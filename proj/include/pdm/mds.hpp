#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pdm {

inline constexpr int kMaxMdsDimension = 10;
inline constexpr double kStressCutoff = 0.1;

/// Euclidean distances between rows.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& rows);

/// Kruskal stress-1: sqrt(sum (d_ij - delta_ij)^2 / sum d_ij^2) over i < j,
/// with d the target dissimilarities and delta the embedded distances.
double kruskal_stress(const Eigen::MatrixXd& dist, const Eigen::MatrixXd& coords);

/// Torgerson scaling: top `dim` eigenvectors of the double-centred squared
/// distances, scaled by sqrt(eigenvalue); columns past the positive part of
/// the spectrum are zero.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& dist, int dim);

struct SmacofOptions {
  int max_iterations = 300;
  double relative_tolerance = 1e-7;
  int restarts = 4; // classical start plus restarts - 1 random starts
};

struct MdsFit {
  Eigen::MatrixXd coords;
  double stress = 0.0;
  int iterations = 0;
};

/// SMACOF from a given configuration. Throws pdm::Error("numerical") if an
/// iteration ever increases the stress (majorization guarantees it cannot).
MdsFit smacof(const Eigen::MatrixXd& dist, Eigen::MatrixXd start, const SmacofOptions& options = {});

/// Metric MDS in `dim` dimensions, best of the seeded restarts. An optional
/// warm start (e.g. the previous dimension's solution padded with zeros) is
/// added to the candidate set.
MdsFit mds_stress(const Eigen::MatrixXd& dist, int dim, std::uint64_t seed,
                  const SmacofOptions& options = {},
                  const std::optional<Eigen::MatrixXd>& warm_start = std::nullopt);

struct DimensionEstimate {
  std::vector<std::pair<int, double>> stress_by_dim; // dims 1..10
  double estimated_dim = 1.0;
  bool above_max = false; // stress(10) > 0.1; estimated_dim is then 10
  Eigen::MatrixXd coords_2d;
};

/// Linear interpolation of the (dim, stress) curve at `cutoff`.
/// Returns (estimate, above_max).
std::pair<double, bool> interpolate_dimension(const std::vector<std::pair<int, double>>& stress_by_dim,
                                              double cutoff = kStressCutoff);

DimensionEstimate estimate_dimension(const Eigen::MatrixXd& dist, std::uint64_t seed,
                                     const SmacofOptions& options = {});

} // namespace pdm
