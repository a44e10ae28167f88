#include "clustopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "clustopt/error.hpp"

namespace clustopt {

namespace {

void check_size(Eigen::Index dim, std::size_t size_limit) {
  if (static_cast<std::size_t>(dim) > size_limit) {
    throw Error(Errc::SizeLimitExceeded,
                "eigenproblem of dimension " + std::to_string(dim) + " exceeds cap " +
                    std::to_string(size_limit));
  }
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& block) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
  return qr.householderQ() * Eigen::MatrixXd::Identity(block.rows(), block.cols());
}

Eigen::MatrixXd starting_block(Eigen::Index rows, Eigen::Index cols) {
  // Fixed stream: results must not depend on caller rng state.
  Rng rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd block(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) block(i, j) = dist(rng);
  }
  return block;
}

void remove_mean(Eigen::MatrixXd& block) {
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    block.col(j).array() -= block.col(j).mean();
  }
}

double inf_norm(const Eigen::SparseMatrix<double>& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      rows(it.row()) += std::abs(it.value());
    }
  }
  return m.rows() == 0 ? 0.0 : rows.maxCoeff();
}

// Smallest eigenvalue of L on the complement of the constant vector, by
// shift-invert subspace iteration with Rayleigh-Ritz extraction.
double iterative_lambda2(const Eigen::SparseMatrix<double>& lap,
                         const SpectralOptions& opts) {
  const Eigen::Index n = lap.rows();
  const double norm = std::max(inf_norm(lap), 1.0);
  Eigen::SparseMatrix<double> shifted = lap;
  const double shift = 1e-6 * norm;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "Laplacian factorization failed");
  }

  const auto k = static_cast<Eigen::Index>(std::min<std::size_t>(opts.block_size,
                                                                 static_cast<std::size_t>(n - 1)));
  Eigen::MatrixXd q = starting_block(n, k);
  remove_mean(q);
  q = orthonormalize(q);
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::MatrixXd z = solver.solve(q);
    remove_mean(z);
    q = orthonormalize(z);
    Eigen::MatrixXd lq = lap * q;
    Eigen::MatrixXd projected = q.transpose() * lq;
    projected = 0.5 * (projected + projected.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(projected);
    const double theta = ritz.eigenvalues()(0);
    Eigen::VectorXd x = q * ritz.eigenvectors().col(0);
    const double residual = (lap * x - theta * x).norm();
    if (residual <= opts.tolerance * norm) return std::max(theta, 0.0);
  }
  throw Error(Errc::ConvergenceFailure, "lambda2 subspace iteration did not converge");
}

double select_rate(const Eigen::VectorXcd& eigenvalues, double zero_tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    const double re = eigenvalues(k).real();
    if (std::abs(re) >= zero_tol) best = std::max(best, re);
  }
  if (!std::isfinite(best)) {
    throw Error(Errc::AllZero, "every Jacobian eigenvalue is structurally zero");
  }
  return -best;
}

// Ritz values of J nearest the origin via shift-invert subspace iteration.
double iterative_rate(const Eigen::SparseMatrix<double>& jac, double zero_tol,
                      const SpectralOptions& opts) {
  const Eigen::Index dim = jac.rows();
  const double norm = std::max(inf_norm(jac), 1.0);
  Eigen::SparseMatrix<double> shifted = jac;
  const double shift = 1e-6 * norm;
  for (Eigen::Index i = 0; i < dim; ++i) shifted.coeffRef(i, i) -= shift;
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.analyzePattern(shifted);
  solver.factorize(shifted);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "Jacobian factorization failed");
  }

  const auto k = static_cast<Eigen::Index>(
      std::min<std::size_t>(opts.block_size + 2, static_cast<std::size_t>(dim)));
  Eigen::MatrixXd q = orthonormalize(starting_block(dim, k));
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::MatrixXd z = solver.solve(q);
    q = orthonormalize(z);
    Eigen::MatrixXd jq = jac * q;
    Eigen::MatrixXd projected = q.transpose() * jq;
    Eigen::EigenSolver<Eigen::MatrixXd> ritz(projected, true);
    const Eigen::VectorXcd& theta = ritz.eigenvalues();

    Eigen::Index chosen = -1;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      if (std::abs(theta(j).real()) < zero_tol) continue;
      if (chosen < 0 || theta(j).real() > theta(chosen).real()) chosen = j;
    }
    if (chosen < 0) continue;
    Eigen::VectorXcd x = q.cast<std::complex<double>>() * ritz.eigenvectors().col(chosen);
    Eigen::VectorXcd jx = jac.cast<std::complex<double>>() * x;
    const double residual = (jx - theta(chosen) * x).norm() / x.norm();
    if (residual <= opts.tolerance * norm) return -theta(chosen).real();
  }
  throw Error(Errc::ConvergenceFailure, "rate subspace iteration did not converge");
}

}  // namespace

Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& m, std::size_t size_limit) {
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "matrix is not square");
  check_size(m.rows(), size_limit);
  if (m.size() == 0) return {};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(Errc::NotSymmetric, "matrix is not symmetric within 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

Eigen::VectorXcd eig_general(const Eigen::MatrixXd& m, std::size_t size_limit) {
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "matrix is not square");
  check_size(m.rows(), size_limit);
  if (m.size() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "QR iteration did not converge");
  }
  return solver.eigenvalues();
}

double lambda2_laplacian(const Graph& g, const SpectralOptions& opts) {
  const std::size_t n = g.num_nodes();
  if (n < 2 || !is_connected(g)) return 0.0;
  check_size(static_cast<Eigen::Index>(n), opts.size_limit);
  if (n <= opts.dense_limit) {
    return std::max(eig_symmetric(laplacian(g), opts.size_limit)(1), 0.0);
  }
  return iterative_lambda2(sparse_laplacian(g), opts);
}

Eigen::SparseMatrix<double> build_sparse_jacobian(const JacobianSpec& spec) {
  const Eigen::Index n = spec.laplacian.rows();
  if (spec.laplacian.cols() != n || spec.hessian_diag.size() != n) {
    throw Error(Errc::DimensionMismatch, "Jacobian blocks disagree in dimension");
  }
  if (!(spec.alpha > 0.0)) throw Error(Errc::InvalidParams, "alpha must be positive");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * static_cast<std::size_t>(spec.laplacian.nonZeros()) +
                   3 * static_cast<std::size_t>(n));
  const Eigen::VectorXd& h = spec.hessian_diag;
  for (Eigen::Index col = 0; col < spec.laplacian.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(spec.laplacian, col); it; ++it) {
      const Eigen::Index i = it.row();
      const Eigen::Index j = it.col();
      triplets.emplace_back(i, j, -it.value());
      triplets.emplace_back(n + i, j, -h(i) * it.value());
      triplets.emplace_back(n + i, n + j, -it.value());
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    triplets.emplace_back(i, n + i, -spec.alpha);
    triplets.emplace_back(n + i, n + i, -spec.alpha * h(i));
  }
  Eigen::SparseMatrix<double> jac(2 * n, 2 * n);
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

Eigen::MatrixXd build_jacobian(const JacobianSpec& spec) {
  return Eigen::MatrixXd(build_sparse_jacobian(spec));
}

double default_zero_tol(const Eigen::SparseMatrix<double>& laplacian) {
  return 1e-9 * (1.0 + inf_norm(laplacian));
}

double convergence_rate(const JacobianSpec& spec, double zero_tol,
                        const SpectralOptions& opts) {
  if (!(zero_tol > 0.0)) throw Error(Errc::InvalidParams, "zero_tol must be positive");
  const auto dim = static_cast<std::size_t>(2 * spec.laplacian.rows());
  check_size(static_cast<Eigen::Index>(dim), opts.size_limit);
  if (dim <= opts.dense_limit) {
    return select_rate(eig_general(build_jacobian(spec), opts.size_limit), zero_tol);
  }
  return iterative_rate(build_sparse_jacobian(spec), zero_tol, opts);
}

JacobianSpec make_jacobian_spec(const Graph& g, double alpha,
                                const Eigen::VectorXd& hessian_diag) {
  return {sparse_laplacian(g), alpha, hessian_diag};
}

}  // namespace clustopt
