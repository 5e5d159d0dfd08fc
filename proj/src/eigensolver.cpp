// SPDX-License-Identifier: Apache-2.0

#include "subwave/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "subwave/linsolve.hpp"

namespace subwave
{

namespace
{

double ResidualOf(const Eigen::SparseMatrix<double> &k, const Eigen::SparseMatrix<double> &m,
                  const Eigen::VectorXd &x, double lambda)
{
  const Eigen::VectorXd kx = k * x;
  const Eigen::VectorXd r = kx - lambda * (m * x);
  return r.norm() / std::max(kx.norm(), 1e-300);
}

EigenPairs DenseSolve(const Eigen::SparseMatrix<double> &k, const Eigen::SparseMatrix<double> &m,
                      int num)
{
  const Eigen::MatrixXd kd = Eigen::MatrixXd(k), md = Eigen::MatrixXd(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kd, md);
  if (es.info() != Eigen::Success)
  {
    throw SolverError("dense generalized eigensolver failed");
  }
  const int n = static_cast<int>(k.rows());
  const int take = (num <= 0 || num > n) ? n : num;
  EigenPairs out;
  out.values = es.eigenvalues().head(take);
  out.vectors = es.eigenvectors().leftCols(take);
  for (int j = 0; j < take; ++j)
  {
    out.max_residual = std::max(out.max_residual, ResidualOf(k, m, out.vectors.col(j), out.values[j]));
  }
  return out;
}

}  // namespace

EigenPairs SmallestEigenpairs(const Eigen::SparseMatrix<double> &k,
                              const Eigen::SparseMatrix<double> &m, int num, double tol,
                              int max_iterations, int dense_limit)
{
  const int n = static_cast<int>(k.rows());
  if (n == 0)
  {
    return {};
  }
  if (num <= 0 || n <= dense_limit || 2 * num >= n)
  {
    return DenseSolve(k, m, num);
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
  if (ldlt.info() != Eigen::Success)
  {
    throw SolverError("eigensolver: factorisation of the stiffness matrix failed");
  }
  const int p = std::min(n, std::max(2 * num, num + 8));
  Eigen::MatrixXd x(n, p);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (int j = 0; j < p; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      x(i, j) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
  }

  EigenPairs out;
  Eigen::VectorXd theta;
  for (int it = 1; it <= max_iterations; ++it)
  {
    Eigen::MatrixXd y = ldlt.solve(m * x);
    // M-orthonormalise, then Rayleigh-Ritz.
    const Eigen::MatrixXd gram = y.transpose() * (m * y);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (gram + gram.transpose()));
    if (llt.info() != Eigen::Success)
    {
      throw SolverError("eigensolver: subspace lost rank");
    }
    y = llt.matrixU().solve<Eigen::OnTheRight>(y);
    Eigen::MatrixXd kr = y.transpose() * (k * y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (kr + kr.transpose()));
    x = y * es.eigenvectors();
    theta = es.eigenvalues();
    double worst = 0.0;
    for (int j = 0; j < num; ++j)
    {
      worst = std::max(worst, ResidualOf(k, m, x.col(j), theta[j]));
    }
    out.iterations = it;
    out.max_residual = worst;
    if (worst < tol)
    {
      break;
    }
    if (it == max_iterations)
    {
      throw SolverError("eigensolver did not converge: residual " + std::to_string(worst) +
                        " after " + std::to_string(it) + " iterations");
    }
  }
  out.values = theta.head(num);
  out.vectors = x.leftCols(num);
  return out;
}

}  // namespace subwave
