#include "pdm/mds.hpp"

#include "pdm/error.hpp"
#include "pdm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace pdm {

namespace {

using Index = Eigen::Index;

void validate(const Eigen::MatrixXd& dist) {
  if (dist.rows() != dist.cols()) throw Error("parameter", "distance matrix is not square");
  if (dist.size() == 0) throw Error("parameter", "distance matrix is empty");
  if (!dist.allFinite()) throw Error("parameter", "distance matrix has non-finite entries");
  const double scale = std::max(1.0, dist.cwiseAbs().maxCoeff());
  if ((dist - dist.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error("parameter", "distance matrix is not symmetric");
  }
  if (dist.minCoeff() < 0.0) throw Error("parameter", "distance matrix has negative entries");
}

double raw_stress(const Eigen::MatrixXd& dist, const Eigen::MatrixXd& embedded) {
  return (dist - embedded).squaredNorm() / 2.0;
}

} // namespace

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& rows) {
  const Index n = rows.rows();
  const Eigen::MatrixXd cols = rows.transpose();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  // Direct differences rather than the Gram expansion, so small distances
  // keep full relative precision.
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      d(i, j) = (cols.col(i) - cols.col(j)).norm();
      d(j, i) = d(i, j);
    }
  }
  return d;
}

double kruskal_stress(const Eigen::MatrixXd& dist, const Eigen::MatrixXd& coords) {
  const double denom = dist.squaredNorm();
  if (!(denom > 0.0)) return 0.0;
  const Eigen::MatrixXd embedded = pairwise_distances(coords);
  return std::sqrt((dist - embedded).squaredNorm() / denom);
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& dist, int dim) {
  const Index n = dist.rows();
  const Eigen::MatrixXd d2 = dist.array().square();
  const Eigen::VectorXd row_mean = d2.rowwise().mean();
  const Eigen::RowVectorXd col_mean = d2.colwise().mean();
  const double grand = d2.mean();
  Eigen::MatrixXd b = -0.5 * ((d2.colwise() - row_mean).rowwise() - col_mean);
  b.array() -= 0.5 * grand;
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, dim);
  for (int k = 0; k < dim && k < n; ++k) {
    const Index idx = n - 1 - k; // descending
    const double lambda = es.eigenvalues()(idx);
    if (lambda <= 0.0) break;
    coords.col(k) = es.eigenvectors().col(idx) * std::sqrt(lambda);
  }
  return coords;
}

MdsFit smacof(const Eigen::MatrixXd& dist, Eigen::MatrixXd x, const SmacofOptions& options) {
  const Index n = dist.rows();
  const double total = dist.squaredNorm() / 2.0;
  MdsFit fit;
  Eigen::MatrixXd embedded = pairwise_distances(x);
  double prev = raw_stress(dist, embedded);
  int iter = 0;
  if (total > 0.0 && n > 1) {
    Eigen::MatrixXd next(x.cols(), n);
    for (; iter < options.max_iterations; ++iter) {
      // Guttman transform, summed as ratios times differences: the B(X) X form
      // cancels huge terms when two points nearly coincide.
      const Eigen::MatrixXd cur = x.transpose();
      next.setZero();
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          if (i != j && embedded(i, j) > 0.0) next.col(i) += (dist(i, j) / embedded(i, j)) * (cur.col(i) - cur.col(j));
        }
      }
      x = next.transpose() / static_cast<double>(n);
      embedded = pairwise_distances(x);
      const double current = raw_stress(dist, embedded);
      if (current > prev * (1.0 + 1e-10) + 1e-14 * total) {
        throw Error("numerical", "SMACOF stress increased between iterations");
      }
      const bool done = prev <= 0.0 || (prev - current) / prev < options.relative_tolerance;
      prev = current;
      if (done) {
        ++iter;
        break;
      }
    }
  }
  fit.coords = std::move(x);
  fit.iterations = iter;
  fit.stress = total > 0.0 ? std::sqrt(prev / total) : 0.0;
  return fit;
}

MdsFit mds_stress(const Eigen::MatrixXd& dist, int dim, std::uint64_t seed,
                  const SmacofOptions& options, const std::optional<Eigen::MatrixXd>& warm_start) {
  validate(dist);
  if (dim < 1 || dim > kMaxMdsDimension) throw Error("parameter", "MDS dimension must lie in 1..10");
  const Index n = dist.rows();

  std::optional<MdsFit> best;
  auto consider = [&](Eigen::MatrixXd start) {
    auto fit = smacof(dist, std::move(start), options);
    if (!best || fit.stress < best->stress) best = std::move(fit);
  };

  consider(classical_mds(dist, dim));
  const double scale = n > 1 ? std::sqrt(dist.squaredNorm() / static_cast<double>(n * (n - 1))) : 1.0;
  for (int r = 1; r < options.restarts; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal(0.0, scale > 0.0 ? scale : 1.0);
    Eigen::MatrixXd start(n, dim);
    for (Index j = 0; j < dim; ++j) {
      for (Index i = 0; i < n; ++i) start(i, j) = normal(rng);
    }
    consider(std::move(start));
  }
  if (warm_start && warm_start->rows() == n && warm_start->cols() <= dim) {
    Eigen::MatrixXd start = Eigen::MatrixXd::Zero(n, dim);
    start.leftCols(warm_start->cols()) = *warm_start;
    consider(std::move(start));
  }
  return std::move(*best);
}

std::pair<double, bool> interpolate_dimension(const std::vector<std::pair<int, double>>& stress_by_dim,
                                              double cutoff) {
  if (stress_by_dim.empty()) throw Error("parameter", "empty stress curve");
  if (stress_by_dim.front().second <= cutoff) return {static_cast<double>(stress_by_dim.front().first), false};
  for (std::size_t k = 0; k + 1 < stress_by_dim.size(); ++k) {
    const auto [d0, s0] = stress_by_dim[k];
    const auto [d1, s1] = stress_by_dim[k + 1];
    if (s0 > cutoff && s1 <= cutoff) {
      return {d0 + (s0 - cutoff) / (s0 - s1) * (d1 - d0), false};
    }
  }
  return {static_cast<double>(stress_by_dim.back().first), true};
}

DimensionEstimate estimate_dimension(const Eigen::MatrixXd& dist, std::uint64_t seed,
                                     const SmacofOptions& options) {
  validate(dist);
  DimensionEstimate out;
  std::optional<Eigen::MatrixXd> previous;
  for (int d = 1; d <= kMaxMdsDimension; ++d) {
    auto fit = mds_stress(dist, d, derive_seed(seed, static_cast<std::uint64_t>(d)), options, previous);
    out.stress_by_dim.emplace_back(d, fit.stress);
    if (d == 2) out.coords_2d = fit.coords;
    previous = std::move(fit.coords);
  }
  std::tie(out.estimated_dim, out.above_max) = interpolate_dimension(out.stress_by_dim);
  return out;
}

} // namespace pdm
