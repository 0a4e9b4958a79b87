#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "vinedist/errors.hpp"

namespace vinedist {

struct Embedding {
  Eigen::MatrixXd coords;     // one row per item
  Eigen::VectorXd eigenvalues;  // kept eigenvalues, descending
  double stress = 0.0;         // Kruskal stress-1 of the embedded distances
};

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d[static_cast<std::size_t>(i)].size() != d.size())
      throw Error(ErrorKind::InvalidArgument, "distance matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

/// Torgerson scaling: double-centre the squared distances and keep the top
/// eigenpairs. Negative eigenvalues are clamped to zero.
inline Embedding classical_mds(const Eigen::MatrixXd& d, int ndim = 2) {
  const Eigen::Index n = d.rows();
  if (n == 0 || d.cols() != n) throw Error(ErrorKind::InvalidArgument, "distance matrix is not square");
  const Eigen::Index k = std::min<Eigen::Index>(ndim, n);
  const Eigen::MatrixXd sq = d.array().square();
  const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / double(n));
  const Eigen::MatrixXd b = -0.5 * j * sq * j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);

  Embedding e;
  e.coords.resize(n, k);
  e.eigenvalues.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index src = n - 1 - c;  // eigenvalues come ascending
    const double lambda = std::max(0.0, es.eigenvalues()(src));
    e.eigenvalues(c) = lambda;
    e.coords.col(c) = es.eigenvectors().col(src) * std::sqrt(lambda);
  }

  double num = 0.0, den = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b2 = a + 1; b2 < n; ++b2) {
      const double emb = (e.coords.row(a) - e.coords.row(b2)).norm();
      num += (d(a, b2) - emb) * (d(a, b2) - emb);
      den += d(a, b2) * d(a, b2);
    }
  e.stress = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return e;
}

inline Embedding classical_mds(const std::vector<std::vector<double>>& d, int ndim = 2) {
  return classical_mds(to_matrix(d), ndim);
}

}  // namespace vinedist
