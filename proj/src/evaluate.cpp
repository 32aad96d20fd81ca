#include "pdm/evaluate.hpp"

#include "pdm/error.hpp"
#include "pdm/rng.hpp"

#include <algorithm>

namespace pdm {

int majority_side(const VoteMatrix& v, Eigen::Index j) {
  return v.yeas(j) >= v.nays(j) ? 1 : -1;
}

Predictions predict_signs(const Eigen::MatrixXd& approx, const VoteMatrix& v) {
  if (approx.rows() != v.n() || approx.cols() != v.m()) {
    throw Error("parameter", "approximation shape does not match the vote matrix");
  }
  Predictions out(v.n(), v.m());
  for (Eigen::Index j = 0; j < v.m(); ++j) {
    const int fallback = majority_side(v, j);
    for (Eigen::Index i = 0; i < v.n(); ++i) {
      const double a = approx(i, j);
      out(i, j) = a > 0.0 ? 1 : (a < 0.0 ? -1 : fallback);
    }
  }
  return out;
}

EvalReport score(const Predictions& pred, const VoteMatrix& v, std::string model_name) {
  if (pred.rows() != v.n() || pred.cols() != v.m()) {
    throw Error("parameter", "prediction shape does not match the vote matrix");
  }
  EvalReport r;
  r.model_name = std::move(model_name);
  for (Eigen::Index j = 0; j < v.m(); ++j) {
    long errs = 0;
    for (Eigen::Index i = 0; i < v.n(); ++i) {
      const int actual = v(i, j);
      if (actual == 0) continue;
      ++r.n_cast;
      if (pred(i, j) != actual) ++errs;
    }
    r.errors += errs;
    r.minority_total += std::min(v.yeas(j), v.nays(j));
    r.per_vote_errors[v.vote_ids()[static_cast<std::size_t>(j)]] = errs;
  }
  r.percent_correct =
      r.n_cast > 0 ? 100.0 * static_cast<double>(r.n_cast - r.errors) / static_cast<double>(r.n_cast) : 0.0;
  if (r.n_cast == 0) r.diagnostics.push_back("no cast votes to score");
  if (r.minority_total > 0) {
    r.apre = static_cast<double>(r.minority_total - r.errors) / static_cast<double>(r.minority_total);
  } else {
    r.diagnostics.push_back("APRE undefined: every vote is unanimous");
  }
  return r;
}

Predictions minority_model(const VoteMatrix& v) {
  Predictions out(v.n(), v.m());
  for (Eigen::Index j = 0; j < v.m(); ++j) out.col(j).setConstant(majority_side(v, j));
  return out;
}

Predictions random_model(const VoteMatrix& v, std::uint64_t seed) {
  Predictions out(v.n(), v.m());
  std::vector<int> column(static_cast<std::size_t>(v.n()));
  for (Eigen::Index j = 0; j < v.m(); ++j) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(j));
    for (Eigen::Index i = 0; i < v.n(); ++i) column[static_cast<std::size_t>(i)] = v(i, j);
    std::shuffle(column.begin(), column.end(), rng);
    const int cast = v.yeas(j) + v.nays(j);
    const double p_yea = cast > 0 ? static_cast<double>(v.yeas(j)) / cast : 0.5;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < v.n(); ++i) {
      int x = column[static_cast<std::size_t>(i)];
      if (x == 0) x = unif(rng) < p_yea ? 1 : -1;
      out(i, j) = x;
    }
  }
  return out;
}

RandomModelSummary random_model_summary(const VoteMatrix& v, std::uint64_t seed, int instances) {
  if (instances < 1) throw Error("parameter", "need at least one random-model instance");
  RandomModelSummary s;
  s.instances = instances;
  double apre_sum = 0.0;
  bool apre_defined = true;
  for (int k = 0; k < instances; ++k) {
    auto r = score(random_model(v, derive_seed(seed, static_cast<std::uint64_t>(k))), v, "random");
    if (r.apre) apre_sum += *r.apre;
    else apre_defined = false;
    s.reports.push_back(std::move(r));
  }
  const auto [lo, hi] = std::minmax_element(
      s.reports.begin(), s.reports.end(),
      [](const EvalReport& a, const EvalReport& b) { return a.percent_correct < b.percent_correct; });
  s.min_percent_correct = lo->percent_correct;
  s.max_percent_correct = hi->percent_correct;
  if (apre_defined) s.mean_apre = apre_sum / instances;
  return s;
}

} // namespace pdm
