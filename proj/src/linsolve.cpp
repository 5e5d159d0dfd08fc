// SPDX-License-Identifier: Apache-2.0

#include "subwave/linsolve.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <umfpack.h>

namespace subwave
{

namespace
{

// UMFPACK entry points by scalar type (complex values packed, Az = nullptr).
struct RealOps
{
  static int Symbolic(int n, const int *p, const int *i, const double *x, void **s, double *c,
                      double *info)
  {
    return umfpack_di_symbolic(n, n, p, i, x, s, c, info);
  }
  static int Numeric(const int *p, const int *i, const double *x, void *s, void **num, double *c,
                     double *info)
  {
    return umfpack_di_numeric(p, i, x, s, num, c, info);
  }
  static int Solve(const int *p, const int *i, const double *x, double *out, const double *b,
                   void *num, double *c, double *info)
  {
    return umfpack_di_solve(UMFPACK_A, p, i, x, out, b, num, c, info);
  }
  static void FreeSymbolic(void **s) { umfpack_di_free_symbolic(s); }
  static void FreeNumeric(void **n) { umfpack_di_free_numeric(n); }
  static void Defaults(double *c) { umfpack_di_defaults(c); }
};

struct ComplexOps
{
  static int Symbolic(int n, const int *p, const int *i, const double *x, void **s, double *c,
                      double *info)
  {
    return umfpack_zi_symbolic(n, n, p, i, x, nullptr, s, c, info);
  }
  static int Numeric(const int *p, const int *i, const double *x, void *s, void **num, double *c,
                     double *info)
  {
    return umfpack_zi_numeric(p, i, x, nullptr, s, num, c, info);
  }
  static int Solve(const int *p, const int *i, const double *x, double *out, const double *b,
                   void *num, double *c, double *info)
  {
    return umfpack_zi_solve(UMFPACK_A, p, i, x, nullptr, out, nullptr, b, nullptr, num, c, info);
  }
  static void FreeSymbolic(void **s) { umfpack_zi_free_symbolic(s); }
  static void FreeNumeric(void **n) { umfpack_zi_free_numeric(n); }
  static void Defaults(double *c) { umfpack_zi_defaults(c); }
};

template <typename Scalar>
using OpsFor = std::conditional_t<std::is_same_v<Scalar, double>, RealOps, ComplexOps>;

}  // namespace

template <typename Scalar>
struct SparseLu<Scalar>::Impl
{
  using Ops = OpsFor<Scalar>;
  Matrix a;
  void *numeric = nullptr;
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  Eigen::Index n = 0;

  Impl() { Ops::Defaults(control); }
  ~Impl()
  {
    if (numeric)
    {
      Ops::FreeNumeric(&numeric);
    }
  }
  const double *Values() const { return reinterpret_cast<const double *>(a.valuePtr()); }
};

template <typename Scalar>
SparseLu<Scalar>::SparseLu() : impl_(std::make_unique<Impl>())
{
}

template <typename Scalar>
SparseLu<Scalar>::SparseLu(const Matrix &a) : SparseLu()
{
  Factor(a);
}

template <typename Scalar>
SparseLu<Scalar>::~SparseLu() = default;

template <typename Scalar>
SparseLu<Scalar>::SparseLu(SparseLu &&) noexcept = default;

template <typename Scalar>
SparseLu<Scalar> &SparseLu<Scalar>::operator=(SparseLu &&) noexcept = default;

template <typename Scalar>
void SparseLu<Scalar>::Factor(const Matrix &a)
{
  using Ops = typename Impl::Ops;
  if (a.rows() != a.cols())
  {
    throw SolverError("sparse LU: matrix is not square");
  }
  if (impl_->numeric)
  {
    Ops::FreeNumeric(&impl_->numeric);
  }
  impl_->a = a;
  impl_->a.makeCompressed();
  impl_->n = a.rows();
  const int n = static_cast<int>(a.rows());
  const int *p = impl_->a.outerIndexPtr();
  const int *i = impl_->a.innerIndexPtr();
  void *symbolic = nullptr;
  int status = Ops::Symbolic(n, p, i, impl_->Values(), &symbolic, impl_->control, impl_->info);
  if (status != UMFPACK_OK)
  {
    throw SolverError("sparse LU: symbolic analysis failed (status " + std::to_string(status) + ")");
  }
  status = Ops::Numeric(p, i, impl_->Values(), symbolic, &impl_->numeric, impl_->control,
                        impl_->info);
  Ops::FreeSymbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix)
  {
    throw SolverError("sparse LU: matrix is singular");
  }
  if (status != UMFPACK_OK)
  {
    throw SolverError("sparse LU: numeric factorisation failed (status " + std::to_string(status) +
                      ")");
  }
}

template <typename Scalar>
typename SparseLu<Scalar>::Vector SparseLu<Scalar>::Solve(const Vector &b) const
{
  using Ops = typename Impl::Ops;
  if (!impl_->numeric)
  {
    throw SolverError("sparse LU: solve before factorisation");
  }
  if (b.size() != impl_->n)
  {
    throw SolverError("sparse LU: right-hand side has the wrong size");
  }
  Vector x(impl_->n);
  double info[UMFPACK_INFO];
  const int status = Ops::Solve(impl_->a.outerIndexPtr(), impl_->a.innerIndexPtr(),
                                impl_->Values(), reinterpret_cast<double *>(x.data()),
                                reinterpret_cast<const double *>(b.data()), impl_->numeric,
                                impl_->control, info);
  if (status != UMFPACK_OK || !x.allFinite())
  {
    throw SolverError("sparse LU: solve failed (status " + std::to_string(status) + ")");
  }
  return x;
}

template <typename Scalar>
double SparseLu<Scalar>::RcondEstimate() const
{
  return impl_->info[UMFPACK_RCOND];
}

template <typename Scalar>
Eigen::Index SparseLu<Scalar>::rows() const
{
  return impl_->n;
}

template class SparseLu<double>;
template class SparseLu<std::complex<double>>;

}  // namespace subwave
