#include "drr/mixing.hpp"

#include <stdexcept>

namespace drr {

MixingMatrix metropolis_weights(const Graph& g) {
  const int n = g.n;
  MixingMatrix m;
  m.w = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges) {
    const double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    m.w(i, j) = wij;
    m.w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.adjacency[i]) off += m.w(i, j);
    if (off > 1.0) throw std::runtime_error("metropolis: off-diagonal mass exceeds 1");
    m.w(i, i) = 1.0 - off;
  }
  m.rho = spectral_gap(m.w);
  return m;
}

double spectral_gap(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  // W symmetric: spectral norm of W - J equals the largest |eigenvalue| after
  // the eigenvalue 1 on span{1} is projected out.
  Eigen::MatrixXd shifted =
      w - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shifted, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_gap: eigendecomposition failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace drr
