#pragma once

#include "pdm/rollcall.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdm {

using Predictions = VoteValues; // entries in {+1, -1}

/// Side that won vote j among cast votes; a tie counts as +1.
int majority_side(const VoteMatrix& v, Eigen::Index j);

/// sign(approx); an exact zero takes the vote's majority side.
Predictions predict_signs(const Eigen::MatrixXd& approx, const VoteMatrix& v);

struct EvalReport {
  std::string model_name;
  double percent_correct = 0.0;
  std::optional<double> apre; // null when every vote is unanimous
  std::map<std::string, long> per_vote_errors;
  long n_cast = 0;
  long errors = 0;
  long minority_total = 0;
  std::vector<std::string> diagnostics;
};

/// Scores predictions against the cast (+1/-1) entries of v only.
EvalReport score(const Predictions& pred, const VoteMatrix& v, std::string model_name = "");

/// Everyone predicted to vote with the winning side.
Predictions minority_model(const VoteMatrix& v);

/// Per vote, the column's entries permuted uniformly across legislators.
/// Abstentions in the permuted column are filled with +1 with probability
/// yeas / (yeas + nays), else -1.
Predictions random_model(const VoteMatrix& v, std::uint64_t seed);

struct RandomModelSummary {
  int instances = 0;
  std::optional<double> mean_apre;
  double min_percent_correct = 0.0;
  double max_percent_correct = 0.0;
  std::vector<EvalReport> reports;
};

inline constexpr int kRandomModelInstances = 10;

RandomModelSummary random_model_summary(const VoteMatrix& v, std::uint64_t seed,
                                        int instances = kRandomModelInstances);

} // namespace pdm
