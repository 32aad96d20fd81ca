#include "pdm/graph_spectral.hpp"

#include "pdm/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdm {

namespace {

Eigen::MatrixXd select_square(const Eigen::MatrixXd& a, const std::vector<Index>& idx) {
  const auto k = static_cast<Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < k; ++r) out(r, c) = a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

void check_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error("contract", "matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error("contract", "matrix is not symmetric");
  }
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Index k = 0; k < vectors.cols(); ++k) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, k));
      // 1e-12 slack so roundoff-level differences do not decide the sign.
      if (a > best + 1e-12) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, k) < 0) vectors.col(k) = -vectors.col(k);
  }
}

struct Reduced {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd degree;
  Eigen::MatrixXd corr;
  Eigen::MatrixXd affinity;
  std::vector<Index> active;
  std::vector<Index> degenerate;
  std::vector<Index> isolated;
};

Reduced reduce(const Eigen::MatrixXd& rows, double sigma) {
  Reduced r;
  auto c = correlation(rows);
  r.degenerate = c.degenerate;
  if (c.active.size() < 2) {
    r.active = c.active;
    return r;
  }
  auto aff = spherical_affinity(c.corr, sigma);
  auto lap = laplacian(aff.affinity);
  for (Index k : lap.isolated) r.isolated.push_back(c.active[static_cast<std::size_t>(k)]);
  for (Index k : lap.active) r.active.push_back(c.active[static_cast<std::size_t>(k)]);
  r.corr = select_square(c.corr, lap.active);
  r.affinity = select_square(aff.affinity, lap.active);
  r.laplacian = std::move(lap.laplacian);
  r.degree = std::move(lap.degree);
  return r;
}

} // namespace

CorrelationResult correlation(const Eigen::MatrixXd& rows) {
  const Index n = rows.rows();
  const Index m = rows.cols();
  CorrelationResult out;
  Eigen::MatrixXd z(n, m);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    if (m < 2) {
      out.degenerate.push_back(i);
      continue;
    }
    const Eigen::RowVectorXd centered = rows.row(i).array() - rows.row(i).mean();
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(m - 1));
    if (!(sd > kDegenerateStd)) {
      out.degenerate.push_back(i);
      continue;
    }
    z.row(k++) = centered / sd;
    out.active.push_back(i);
  }
  z.conservativeResize(k, m);
  out.corr = (z * z.transpose()) / static_cast<double>(m - 1);
  out.corr = 0.5 * (out.corr + out.corr.transpose()).eval();
  for (Index i = 0; i < k; ++i) out.corr(i, i) = 1.0;
  return out;
}

AffinityResult spherical_affinity(const Eigen::MatrixXd& corr, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("parameter", "sigma must be positive");
  AffinityResult out;
  out.distance = corr.unaryExpr([](double s) {
    return std::sin(std::acos(std::clamp(s, -1.0, 1.0)) / 2.0);
  });
  const double s2 = sigma * sigma;
  out.affinity = out.distance.unaryExpr([s2](double d) { return std::exp(-d * d / s2); });
  out.affinity.diagonal().setZero();
  return out;
}

LaplacianResult laplacian(const Eigen::MatrixXd& affinity) {
  std::vector<Index> active(static_cast<std::size_t>(affinity.cols()));
  for (Index i = 0; i < affinity.cols(); ++i) active[static_cast<std::size_t>(i)] = i;

  LaplacianResult out;
  Eigen::MatrixXd block = affinity;
  for (;;) {
    const Eigen::VectorXd sums = block.colwise().sum().transpose();
    std::vector<Index> keep;
    for (Index i = 0; i < sums.size(); ++i) {
      if (sums(i) > 0.0) {
        keep.push_back(i);
      } else {
        out.isolated.push_back(active[static_cast<std::size_t>(i)]);
      }
    }
    if (static_cast<Index>(keep.size()) == block.cols()) {
      out.degree = sums;
      break;
    }
    std::vector<Index> next;
    for (Index k : keep) next.push_back(active[static_cast<std::size_t>(k)]);
    active = std::move(next);
    block = select_square(block, keep);
  }
  out.active = std::move(active);

  const Eigen::VectorXd inv_sqrt = out.degree.array().rsqrt();
  Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * block * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  out.laplacian = 0.5 * (lap + lap.transpose());
  return out;
}

EigenPairs eigendecompose(const Eigen::MatrixXd& symmetric) {
  check_symmetric(symmetric);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error("numerical", "eigendecomposition failed");
  EigenPairs out{solver.eigenvalues(), solver.eigenvectors()};
  fix_signs(out.vectors);
  return out;
}

Eigen::VectorXd eigenvalues_only(const Eigen::MatrixXd& symmetric) {
  check_symmetric(symmetric);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("numerical", "eigendecomposition failed");
  return solver.eigenvalues();
}

SpectralGraph build_spectral_graph(const Eigen::MatrixXd& rows, double sigma) {
  auto r = reduce(rows, sigma);
  if (r.active.size() < 2) {
    throw Error("data", "fewer than two legislators carry correlation signal");
  }
  SpectralGraph g;
  g.sigma = sigma;
  g.corr = std::move(r.corr);
  g.affinity = std::move(r.affinity);
  g.laplacian = std::move(r.laplacian);
  g.degree = std::move(r.degree);
  auto eig = eigendecompose(g.laplacian);
  g.eigenvalues = std::move(eig.values);
  g.eigenvectors = std::move(eig.vectors);
  g.active_rows = std::move(r.active);
  g.no_signal_rows = r.degenerate;
  g.no_signal_rows.insert(g.no_signal_rows.end(), r.isolated.begin(), r.isolated.end());
  std::sort(g.no_signal_rows.begin(), g.no_signal_rows.end());
  if (!r.degenerate.empty()) {
    g.diagnostics.push_back(std::to_string(r.degenerate.size()) +
                            " constant row(s) excluded from the graph");
  }
  if (!r.isolated.empty()) {
    g.diagnostics.push_back(std::to_string(r.isolated.size()) +
                            " isolated node(s) excluded from the graph");
  }
  return g;
}

Eigen::VectorXd laplacian_spectrum(const Eigen::MatrixXd& rows, double sigma) {
  auto r = reduce(rows, sigma);
  if (r.active.size() < 2) return {};
  return eigenvalues_only(r.laplacian);
}

double smallest_nonzero(const Eigen::VectorXd& ascending) {
  for (Index k = 0; k < ascending.size(); ++k) {
    if (ascending(k) > kEigenTolerance) return ascending(k);
  }
  return std::numeric_limits<double>::infinity();
}

} // namespace pdm
