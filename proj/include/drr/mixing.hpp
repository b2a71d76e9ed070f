#pragma once

#include <Eigen/Dense>

#include "drr/graph.hpp"

namespace drr {

// Symmetric doubly stochastic mixing matrix W conforming to a graph:
// w_ij > 0 only if (i,j) is an edge or i == j.
struct MixingMatrix {
  Eigen::MatrixXd w;
  double rho = 0.0;  // || W - (1/n) 1 1^T ||_2, spectral norm on 1-perp

  int n() const { return static_cast<int>(w.rows()); }
};

// Metropolis-Hastings weights: w_ij = 1 / (1 + max(deg_i, deg_j)) for edges,
// diagonal filled to make rows sum to one. Symmetric by construction
// (identical expression for both triangles), entries nonnegative.
MixingMatrix metropolis_weights(const Graph& g);

// Spectral norm of W - (1/n) 1 1^T via symmetric eigendecomposition.
double spectral_gap(const Eigen::MatrixXd& w);

}  // namespace drr
