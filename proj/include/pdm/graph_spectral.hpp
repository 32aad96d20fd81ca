#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace pdm {

using Index = Eigen::Index;

inline constexpr double kEigenTolerance = 1e-8;
inline constexpr double kDefaultSigma = 1.0;
// Rows whose sample standard deviation does not exceed this carry no
// correlation signal and are left out of the graph.
inline constexpr double kDegenerateStd = 1e-10;

struct CorrelationResult {
  Eigen::MatrixXd corr;          // over active rows only
  std::vector<Index> active;     // input row indices, ascending
  std::vector<Index> degenerate; // constant rows
};

/// Pearson correlation between rows (divisor m - 1). Constant rows are
/// reported in `degenerate` and excluded.
CorrelationResult correlation(const Eigen::MatrixXd& rows);

struct AffinityResult {
  Eigen::MatrixXd distance; // sin(arccos(S) / 2)
  Eigen::MatrixXd affinity; // exp(-d^2 / sigma^2), zero diagonal
};

AffinityResult spherical_affinity(const Eigen::MatrixXd& corr, double sigma = kDefaultSigma);

struct LaplacianResult {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd degree;     // column sums of the retained affinity block
  std::vector<Index> active;  // indices into the input affinity
  std::vector<Index> isolated;
};

/// L = I - D^{-1/2} S1 D^{-1/2}. Nodes with zero column sum are dropped
/// (repeatedly, since dropping one changes the others' sums).
LaplacianResult laplacian(const Eigen::MatrixXd& affinity);

struct EigenPairs {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXd vectors; // orthonormal columns
};

/// Full symmetric eigendecomposition. Each eigenvector is signed so its
/// largest-magnitude entry (first one on ties) is positive.
EigenPairs eigendecompose(const Eigen::MatrixXd& symmetric);

Eigen::VectorXd eigenvalues_only(const Eigen::MatrixXd& symmetric);

/// Everything built from one data matrix: correlation, affinity, Laplacian
/// and its spectrum, restricted to the informative rows.
struct SpectralGraph {
  Eigen::MatrixXd corr;
  Eigen::MatrixXd affinity;
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd degree;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double sigma = kDefaultSigma;
  std::vector<Index> active_rows; // input row indices the graph is built on
  std::vector<Index> no_signal_rows;
  std::vector<std::string> diagnostics;

  Index size() const noexcept { return static_cast<Index>(active_rows.size()); }
  Eigen::VectorXd fiedler_vector() const { return eigenvectors.col(1); }
  double fiedler_value() const { return eigenvalues(1); }
};

/// Throws pdm::Error("data") when fewer than two informative rows remain.
SpectralGraph build_spectral_graph(const Eigen::MatrixXd& rows, double sigma = kDefaultSigma);

/// The Laplacian spectrum alone (no eigenvectors); used for null models.
/// Returns an empty vector if fewer than two informative rows remain.
Eigen::VectorXd laplacian_spectrum(const Eigen::MatrixXd& rows, double sigma = kDefaultSigma);

/// Smallest eigenvalue strictly above kEigenTolerance, or +inf if none.
double smallest_nonzero(const Eigen::VectorXd& ascending);

} // namespace pdm
