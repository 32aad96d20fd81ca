#pragma once

#include "pdm/rollcall.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace pdm {

struct SimConfig {
  int n_members = 100;
  int n_votes = 500;
  double alpha = 1.0; // +inf gives loyalty 1 for everyone
  double beta = 1.0;
  int n_trials = 1;
  std::uint64_t seed = 0;
};

struct SimResult {
  VoteMatrix vote_matrix;
  Eigen::VectorXd loyalty;
  Eigen::VectorXi party; // +1 for the first half of the members, -1 for the rest
  Eigen::VectorXd fiedler; // per member; NaN for a member left out of the graph
  // corr(v1, loyalty * party); signed, eigenvectors are oriented by the
  // largest-magnitude entry so only the absolute value is meaningful.
  double fiedler_loyalty_corr = 0.0;
  // Mean over the two parties of the population variance of their v1 entries.
  double within_party_variance = 0.0;
};

/// Two-party roll calls. Per vote, party A's line is +1 or -1 with equal
/// probability and party B's is the opposite; a member votes the line when
/// u < loyalty (u uniform), otherwise the other way. Loyalty ~ Beta(alpha, 1),
/// drawn as U^(1/alpha). Only beta = 1 is supported.
SimResult simulate(const SimConfig& config);

struct AlphaSummary {
  double alpha = 0.0;
  double mean_abs_corr = 0.0;
  double mean_within_party_variance = 0.0;
};

struct TrialRecord {
  double alpha = 0.0;
  int trial = 0;
  double abs_corr = 0.0;
  double within_party_variance = 0.0;
};

struct PlotPoint {
  double alpha = 0.0;
  int member = 0;
  double fiedler = 0.0;
  int party = 0;
  double loyalty = 0.0;
};

struct ExperimentSummary {
  std::vector<TrialRecord> trials;
  std::vector<AlphaSummary> per_alpha;
  double mean_abs_corr = 0.0;
  double variance_abs_corr = 0.0;
  // Spearman correlation of per-alpha means against alpha.
  double corr_trend = 0.0;
  double localization_trend = 0.0;
  std::vector<PlotPoint> plot;
};

/// Runs n_trials simulations per alpha. Trial t at grid index a uses seed
/// derive_seed(derive_seed(seed, a), t). Plot data is trial 0 at four alphas
/// spread evenly over the grid (fewer if the grid is shorter).
ExperimentSummary run_experiment(const std::vector<double>& alpha_grid, int n_trials,
                                 std::uint64_t seed, int n_members = 100, int n_votes = 500);

/// "start:stop:step", inclusive of stop within rounding. Throws
/// pdm::Error("parameter") on malformed input or a non-positive alpha.
std::vector<double> parse_alpha_grid(const std::string& spec);

} // namespace pdm
