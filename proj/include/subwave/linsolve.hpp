// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_LINSOLVE_HPP
#define SUBWAVE_LINSOLVE_HPP

#include <complex>
#include <memory>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace subwave
{

class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Sparse direct LU factorisation (UMFPACK).
template <typename Scalar>
class SparseLu
{
public:
  using Matrix = Eigen::SparseMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SparseLu();
  explicit SparseLu(const Matrix &a);
  ~SparseLu();
  SparseLu(SparseLu &&) noexcept;
  SparseLu &operator=(SparseLu &&) noexcept;

  // Throws SolverError when the matrix is numerically singular.
  void Factor(const Matrix &a);
  Vector Solve(const Vector &b) const;
  // Reciprocal condition estimate reported by the factorisation.
  double RcondEstimate() const;
  Eigen::Index rows() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

extern template class SparseLu<double>;
extern template class SparseLu<std::complex<double>>;

}  // namespace subwave

#endif  // SUBWAVE_LINSOLVE_HPP
