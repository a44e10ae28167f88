#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "clustopt/graph.hpp"

namespace clustopt {

struct SpectralOptions {
  // Problems of this dimension or smaller always use dense solvers.
  std::size_t dense_limit = 2000;
  // Hard cap on any eigenproblem dimension.
  std::size_t size_limit = 20000;
  // Iterative path: block size, relative residual target and iteration cap.
  std::size_t block_size = 8;
  double tolerance = 1e-11;
  std::size_t max_iterations = 2000;
};

// Linearization data of the gradient-tracking flow around its equilibrium.
struct JacobianSpec {
  Eigen::SparseMatrix<double> laplacian;
  double alpha = 0.0;
  Eigen::VectorXd hessian_diag;
};

struct SpectralReport {
  double lambda2_laplacian = 0.0;
  double rate = 0.0;
  double alpha = 0.0;
  std::size_t n = 0;
};

// Ascending eigenvalues. Throws NotSymmetric if |m - m^T| exceeds 1e-12
// relative to the largest entry, SizeLimitExceeded above size_limit.
Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& m, std::size_t size_limit = 20000);

// All eigenvalues through Hessenberg reduction and shifted QR.
Eigen::VectorXcd eig_general(const Eigen::MatrixXd& m, std::size_t size_limit = 20000);

// Second-smallest eigenvalue of the weighted Laplacian; exactly 0 for a
// disconnected graph or one with fewer than two nodes.
double lambda2_laplacian(const Graph& g, const SpectralOptions& opts = {});

// Block matrix [[-L, -alpha I], [-H L, -L - alpha H]] for state (x, y).
Eigen::MatrixXd build_jacobian(const JacobianSpec& spec);
Eigen::SparseMatrix<double> build_sparse_jacobian(const JacobianSpec& spec);

// 1e-9 * (1 + ||L||_inf)
double default_zero_tol(const Eigen::SparseMatrix<double>& laplacian);

// -max Re(lambda) over Jacobian eigenvalues with |Re(lambda)| >= zero_tol.
// Positive means the optimality gap decays; larger is faster.
//
// Above the dense limit the eigenvalues nearest the origin are found by
// shift-invert subspace iteration and the rightmost nonzero one among them is
// returned, which is exact when that eigenvalue is also the one nearest zero.
double convergence_rate(const JacobianSpec& spec, double zero_tol,
                        const SpectralOptions& opts = {});

JacobianSpec make_jacobian_spec(const Graph& g, double alpha,
                                const Eigen::VectorXd& hessian_diag);

}  // namespace clustopt
