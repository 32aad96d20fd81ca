#pragma once

#include "pdm/cluster_select.hpp"
#include "pdm/rollcall.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdm {

/// Decision stump on one vote column: predicts +1 (cluster A) when
/// polarity * (x > threshold ? 1 : -1) is positive. Thresholds are the
/// midpoints of the value alphabet, -0.5 and 0.5.
struct Stump {
  Index column = 0;
  double threshold = 0.0;
  int polarity = 1;

  int predict(int value) const noexcept {
    return polarity * (static_cast<double>(value) > threshold ? 1 : -1);
  }
};

struct RankedVote {
  Index column = 0;
  std::string vote_id;
  double weight = 0.0; // sum of alpha_t over rounds choosing this column
  int rounds = 0;
};

struct BoostRun {
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  std::vector<double> errors;   // weighted error per round
  std::vector<RankedVote> ranking; // every column chosen at least once, best first
  double training_error = 0.0;  // under the initial (class-balanced) weights
  double error_bound = 1.0;     // prod_t 2 sqrt(eps_t (1 - eps_t))
  bool perfect = false;         // halted on a zero-error stump
  std::optional<std::string> diagnostic;
};

inline constexpr int kDefaultBoostRounds = 50;
inline constexpr int kDefaultTopK = 10;

/// Binary AdaBoost, cluster A labelled +1 and B labelled -1. Initial
/// weights give each class half the mass. Stump ties go to the lower
/// column, then threshold -0.5 before 0.5, then polarity +1 before -1.
BoostRun adaboost_pair(const VoteMatrix& v, std::span<const Index> members_a,
                       std::span<const Index> members_b, int rounds = kDefaultBoostRounds);

struct PairSeparation {
  int cluster_a = 0;
  int cluster_b = 0;
  BoostRun run;
};

struct SeparatingVotes {
  std::vector<PairSeparation> pairs;
  std::vector<Index> selected_columns; // union of per-pair top_k, in vote order
  // yea_table[c][k]: rounded percent of cluster c's cast votes that are yea
  // on selected_columns[k]; nullopt when nobody in c cast a vote.
  std::vector<std::vector<std::optional<int>>> yea_table;
  std::vector<std::string> warnings;
};

/// One-vs-one boosting for every unordered cluster pair. `assignment` holds
/// one label per legislator of `v`, -1 for legislators outside the layer.
SeparatingVotes explain_clusters(const VoteMatrix& v, const std::vector<int>& assignment, int k,
                                 int rounds = kDefaultBoostRounds, int top_k = kDefaultTopK);

/// Percent yea among members' cast votes on one column, rounded to integer.
std::optional<int> yea_percent(const VoteMatrix& v, std::span<const Index> members, Index column);

} // namespace pdm
