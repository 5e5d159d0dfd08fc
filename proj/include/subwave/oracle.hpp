// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_ORACLE_HPP
#define SUBWAVE_ORACLE_HPP

#include <complex>
#include <vector>

#include "subwave/geometry.hpp"

namespace subwave
{

// Plane-wave scattering by a homogeneous disk |x| < R with coefficients
// (a0 I, mu0) inside and (I, 1) outside: continuity of u and of the
// conormal flux across |x| = R.
class MieDisk
{
public:
  using cplx = std::complex<double>;

  MieDisk(double k, double radius, double a0, cplx mu0, double incidence_angle = 0.0,
          int n_max = 0);

  cplx Total(const Point &x) const;
  cplx Scattered(const Point &x) const;  // outside the disk
  cplx FarField(double theta) const;
  // int_{|x|<R} |u|^2.
  double InteriorEnergy() const;
  // int_0^{2 pi} |u_inf|^2.
  double FarFieldEnergy() const;
  cplx interior_wavenumber() const { return gamma_; }
  int n_max() const { return n_max_; }
  // Coefficients for mode n (interior, scattered).
  cplx interior_coefficient(int n) const { return a_[n + n_max_]; }
  cplx scattered_coefficient(int n) const { return b_[n + n_max_]; }

private:
  double k_, radius_, a0_, phi_;
  cplx mu0_, gamma_;
  int n_max_;
  std::vector<cplx> a_, b_;
};

}  // namespace subwave

#endif  // SUBWAVE_ORACLE_HPP
