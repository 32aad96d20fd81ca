#pragma once

#include "pdm/cluster_select.hpp"
#include "pdm/graph_spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace pdm {

class VoteMatrix;

/// Unit m-vector: the normalised mean vote of one cluster.
struct Motivation {
  Eigen::VectorXd vector;
  int source_cluster = 0;
  int layer = 1;
  // False when the motivation was dropped from the projection basis because
  // it is (numerically) dependent on the others; its weights are then zero.
  bool in_basis = true;
};

struct MotivationSet {
  std::vector<Motivation> motivations;
  std::vector<std::string> diagnostics;
};

/// Centroid of each cluster's member rows of `data`, normalised. A cluster
/// whose centroid is exactly zero yields no motivation (diagnostic only).
MotivationSet motivations_from_clusters(const Eigen::MatrixXd& data, const Clustering& clustering,
                                        int layer);

inline constexpr double kGramConditionLimit = 1e8;

struct Projection {
  Eigen::VectorXd weights;
  Eigen::VectorXd approx;
};

/// Joint least-squares projection of one row onto span{M_j}. Throws
/// pdm::Error("numerical") when the Gram matrix condition number exceeds
/// `condition_limit`; that means the clustering parameters need adjusting.
Projection project(const Eigen::VectorXd& row, const std::vector<Motivation>& motivations,
                   double condition_limit = kGramConditionLimit);

/// Condition number of the Gram matrix M^T M of the given motivations.
double gram_condition(const std::vector<Motivation>& motivations);

/// A = W M^T. Shared by decomposition and re-scoring so both produce the same bits.
Eigen::MatrixXd approximation_from(const Eigen::MatrixXd& weights,
                                   const std::vector<Motivation>& motivations, Index m);

struct LayerModel {
  int layer_index = 1;
  ClusterParams params;
  Clustering clustering;         // rows are indices into the vote matrix
  std::vector<Motivation> motivations;
  Eigen::MatrixXd weights;       // n x k, zero rows for legislators outside the layer
  Eigen::MatrixXd approximation; // n x m
  std::vector<Index> null_rows;  // rows whose residual was indistinguishable from noise
  std::vector<Index> no_signal_rows;
  std::vector<std::string> diagnostics;

  // Cluster label per legislator, -1 when not clustered in this layer.
  std::vector<int> assignment(Index n) const;
};

enum class StopReason { residual_random, max_layers, no_significant_dims };

const char* to_string(StopReason r) noexcept;
StopReason stop_reason_from_string(const std::string& s);

struct Decomposition {
  std::vector<LayerModel> layers;
  Eigen::MatrixXd residual;
  StopReason stop_reason = StopReason::no_significant_dims;
  std::vector<std::string> diagnostics;

  /// Sum of the first `count` layer approximations (all layers by default).
  Eigen::MatrixXd approximation(int count = -1) const;
};

struct PdmConfig {
  double sigma = kDefaultSigma;
  int null_reps = 25;
  K0Config k0;
  int kmeans_restarts = 20;
  bool row_normalize = false;
  int max_layers = 2;
  // Per-row residual test for layers >= 2: rows whose residual norm falls
  // below this quantile of column-permuted null row norms are not clustered.
  bool exclude_null_rows = true;
  double null_row_quantile = 0.05;
  double gram_condition_limit = kGramConditionLimit;
  std::uint64_t seed = 0;
};

/// True iff the residual shows no significant spectral dimension against
/// column-permuted versions of itself (select_l returns 0). An all-zero
/// residual is random by definition.
bool residual_is_random(const Eigen::MatrixXd& residual, int null_reps, std::uint64_t seed,
                        double sigma = kDefaultSigma);

Decomposition decompose(const Eigen::MatrixXd& data, const PdmConfig& config);
Decomposition decompose(const VoteMatrix& v, const PdmConfig& config);

} // namespace pdm
