// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_EIGENSOLVER_HPP
#define SUBWAVE_EIGENSOLVER_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace subwave
{

struct EigenPairs
{
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  double max_residual = 0.0;
  int iterations = 0;
};

// Smallest eigenpairs of K x = lambda M x with K, M symmetric positive
// definite. num <= 0 requests the full spectrum. Small problems use a dense
// solver; larger ones use shift-invert subspace iteration with a fixed
// pseudo-random start block. Throws SolverError when residuals stall above
// tol after max_iterations.
EigenPairs SmallestEigenpairs(const Eigen::SparseMatrix<double> &k,
                              const Eigen::SparseMatrix<double> &m, int num,
                              double tol = 1e-10, int max_iterations = 2000,
                              int dense_limit = 1200);

}  // namespace subwave

#endif  // SUBWAVE_EIGENSOLVER_HPP
