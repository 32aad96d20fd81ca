#include "pdm/boost_explain.hpp"

#include "pdm/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pdm {

namespace {

// alpha for a zero-error stump: ln(1e8) / 2
const double kPerfectAlpha = 0.5 * std::log(1e8);
constexpr double kChance = 0.5 - 1e-12;

} // namespace

BoostRun adaboost_pair(const VoteMatrix& v, std::span<const Index> members_a,
                       std::span<const Index> members_b, int rounds) {
  if (members_a.empty() || members_b.empty()) throw Error("parameter", "both clusters must be nonempty");
  if (rounds < 1) throw Error("parameter", "rounds must be at least 1");
  std::set<Index> a_set(members_a.begin(), members_a.end());
  for (Index i : members_b) {
    if (a_set.count(i)) throw Error("parameter", "clusters must be disjoint");
  }

  std::vector<Index> rows(members_a.begin(), members_a.end());
  rows.insert(rows.end(), members_b.begin(), members_b.end());
  const std::size_t n = rows.size();
  std::vector<int> label(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_a = i < members_a.size();
    label[i] = in_a ? 1 : -1;
    w[i] = in_a ? 0.5 / static_cast<double>(members_a.size())
                : 0.5 / static_cast<double>(members_b.size());
  }
  const std::vector<double> initial = w;

  BoostRun run;
  std::map<Index, RankedVote> by_column;
  static constexpr double kThresholds[] = {-0.5, 0.5};
  static constexpr int kPolarities[] = {1, -1};

  for (int t = 0; t < rounds; ++t) {
    Stump best;
    double best_err = 2.0;
    for (Index j = 0; j < v.m(); ++j) {
      for (double thr : kThresholds) {
        // error of polarity +1; polarity -1 has error 1 - e
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const int pred = static_cast<double>(v(rows[i], j)) > thr ? 1 : -1;
          if (pred != label[i]) e += w[i];
        }
        for (int pol : kPolarities) {
          const double err = pol == 1 ? e : 1.0 - e;
          if (err < best_err - 1e-15) {
            best_err = err;
            best = {j, thr, pol};
          }
        }
      }
    }
    best_err = std::clamp(best_err, 0.0, 1.0);
    if (best_err >= kChance) {
      run.diagnostic = t == 0 ? "inseparable: no stump beats chance"
                              : "stopped: no stump beats chance under the current weights";
      break;
    }
    const bool perfect = best_err <= 0.0;
    const double alpha = perfect ? kPerfectAlpha : 0.5 * std::log((1.0 - best_err) / best_err);
    run.stumps.push_back(best);
    run.alphas.push_back(alpha);
    run.errors.push_back(best_err);
    run.error_bound *= 2.0 * std::sqrt(best_err * (1.0 - best_err));
    auto& rv = by_column[best.column];
    rv.column = best.column;
    rv.vote_id = v.vote_ids()[static_cast<std::size_t>(best.column)];
    rv.weight += alpha;
    rv.rounds += 1;
    if (perfect) {
      run.perfect = true;
      break;
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-alpha * label[i] * best.predict(v(rows[i], best.column)));
      z += w[i];
    }
    for (double& wi : w) wi /= z;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t t = 0; t < run.stumps.size(); ++t) {
      f += run.alphas[t] * run.stumps[t].predict(v(rows[i], run.stumps[t].column));
    }
    if (!(f * label[i] > 0.0)) run.training_error += initial[i];
  }

  for (auto& [col, rv] : by_column) run.ranking.push_back(rv);
  std::stable_sort(run.ranking.begin(), run.ranking.end(),
                   [](const RankedVote& a, const RankedVote& b) { return a.weight > b.weight; });
  return run;
}

std::optional<int> yea_percent(const VoteMatrix& v, std::span<const Index> members, Index column) {
  int yea = 0;
  int cast = 0;
  for (Index i : members) {
    const int x = v(i, column);
    if (x == 1) ++yea;
    if (x != 0) ++cast;
  }
  if (cast == 0) return std::nullopt;
  return static_cast<int>(std::lround(100.0 * yea / cast));
}

SeparatingVotes explain_clusters(const VoteMatrix& v, const std::vector<int>& assignment, int k,
                                 int rounds, int top_k) {
  if (k < 2) throw Error("parameter", "need at least two clusters to explain");
  if (static_cast<Index>(assignment.size()) != v.n()) {
    throw Error("parameter", "assignment length does not match the vote matrix");
  }
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] < 0) continue;
    if (assignment[i] >= k) throw Error("parameter", "cluster label out of range");
    members[static_cast<std::size_t>(assignment[i])].push_back(static_cast<Index>(i));
  }

  SeparatingVotes out;
  for (int c = 0; c < k; ++c) {
    const auto size = members[static_cast<std::size_t>(c)].size();
    if (size == 0) throw Error("data", "cluster " + std::to_string(c) + " is empty");
    if (size == 1) out.warnings.push_back("cluster " + std::to_string(c) + " has a single member");
  }

  std::set<Index> selected;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      PairSeparation p{a, b, adaboost_pair(v, members[static_cast<std::size_t>(a)],
                                           members[static_cast<std::size_t>(b)], rounds)};
      if (p.run.diagnostic) {
        out.warnings.push_back("clusters " + std::to_string(a) + "/" + std::to_string(b) + ": " +
                               *p.run.diagnostic);
      }
      const auto take = std::min(p.run.ranking.size(), static_cast<std::size_t>(std::max(top_k, 0)));
      for (std::size_t r = 0; r < take; ++r) selected.insert(p.run.ranking[r].column);
      out.pairs.push_back(std::move(p));
    }
  }
  out.selected_columns.assign(selected.begin(), selected.end());
  out.yea_table.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    for (Index col : out.selected_columns) {
      out.yea_table[static_cast<std::size_t>(c)].push_back(
          yea_percent(v, members[static_cast<std::size_t>(c)], col));
    }
  }
  return out;
}

} // namespace pdm
