#pragma once

#include "pdm/boost_explain.hpp"
#include "pdm/evaluate.hpp"
#include "pdm/mds.hpp"
#include "pdm/pdm_engine.hpp"
#include "pdm/rollcall.hpp"
#include "pdm/sim_rollcall.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pdm {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Settings that a stored decomposition must carry so it can be re-scored.
struct RunSettings {
  std::uint64_t seed = 0;
  double minority_threshold = kDefaultMinorityThreshold;
  double sigma = kDefaultSigma;
  int null_reps = 25;
  int max_layers = 2;
};

Json decomposition_to_json(const Decomposition& d, const VoteMatrix& v, const RunSettings& settings);

struct StoredDecomposition {
  RunSettings settings;
  std::vector<std::string> legislator_ids;
  std::vector<std::string> vote_ids;
  Decomposition decomposition; // layer approximations rebuilt from weights and motivations
};

/// Throws pdm::Error("parse") on a malformed document or schema mismatch.
StoredDecomposition decomposition_from_json(const Json& j);

// ---- evaluation ----------------------------------------------------------

struct EvalTable {
  std::vector<EvalReport> models; // PDM layers and the minority model
  RandomModelSummary random;
};

Json eval_to_json(const EvalTable& t);
/// model,percent_correct,apre,n_cast,errors,min_percent_correct,max_percent_correct
std::string eval_to_csv(const EvalTable& t);

// ---- separating votes ----------------------------------------------------

Json separating_votes_to_json(const SeparatingVotes& s, const VoteMatrix& v, int layer);
/// Votes as rows, clusters as columns, integer percents; blank when a
/// cluster cast no votes on that roll call.
std::string separating_votes_to_csv(const SeparatingVotes& s, const VoteMatrix& v);

// ---- MDS -----------------------------------------------------------------

struct DimsRow {
  std::string series;
  DimensionEstimate estimate;
};

std::string dims_to_csv(const std::vector<DimsRow>& rows);

/// id,party,region,cluster,x,y for the given legislator rows.
std::string mds_plot_csv(const VoteMatrix& v, const std::vector<Index>& rows,
                         const std::vector<int>& assignment, const Eigen::MatrixXd& coords_2d);

// ---- simulation ----------------------------------------------------------

/// alpha,trial,correlation,within_party_variance
std::string sim_summary_csv(const ExperimentSummary& s);
/// alpha,member,fiedler,party,loyalty
std::string sim_plot_csv(const ExperimentSummary& s);
/// alpha,mean_abs_correlation,mean_within_party_variance
std::string sim_per_alpha_csv(const ExperimentSummary& s);
Json sim_to_json(const ExperimentSummary& s, std::uint64_t seed, int n_trials);

} // namespace pdm
