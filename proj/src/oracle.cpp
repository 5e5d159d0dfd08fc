// SPDX-License-Identifier: Apache-2.0

#include "subwave/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "subwave/special.hpp"

namespace subwave
{

namespace
{

using cplx = std::complex<double>;
constexpr cplx kI(0.0, 1.0);

cplx IPow(int n)
{
  static const cplx p[4] = {1.0, kI, -1.0, -kI};
  return p[((n % 4) + 4) % 4];
}

// Value of an integer-order sequence at signed order n (f_{-n} = (-1)^n f_n).
cplx Signed(const std::vector<cplx> &seq, int n)
{
  const int m = n < 0 ? -n : n;
  return (n < 0 && (m & 1)) ? -seq[m] : seq[m];
}

// Derivatives from C_{n-1} - C_{n+1} = 2 C_n'.
cplx SignedPrime(const std::vector<cplx> &seq, int n)
{
  return 0.5 * (Signed(seq, n - 1) - Signed(seq, n + 1));
}

}  // namespace

MieDisk::MieDisk(double k, double radius, double a0, cplx mu0, double incidence_angle, int n_max)
    : k_(k), radius_(radius), a0_(a0), phi_(incidence_angle), mu0_(mu0)
{
  if (!(k > 0.0 && radius > 0.0 && a0 > 0.0))
  {
    throw std::invalid_argument("disk oracle: k, radius and a0 must be positive");
  }
  gamma_ = k * std::sqrt(mu0 / a0);
  n_max_ = n_max > 0 ? n_max
                     : static_cast<int>(std::ceil(std::max(k, std::abs(gamma_)) * radius)) + 20;
  const auto jk = special::BesselJSequence(n_max_ + 1, k * radius);
  const auto hk = special::Hankel1Sequence(n_max_ + 1, k * radius);
  const auto jg = special::BesselJSequence(n_max_ + 1, gamma_ * radius);
  a_.resize(2 * n_max_ + 1);
  b_.resize(2 * n_max_ + 1);
  for (int n = -n_max_; n <= n_max_; ++n)
  {
    // [J(gR), -H(kR); a0 g J'(gR), -k H'(kR)] [a; b] = i^n [J(kR); k J'(kR)].
    const cplx m11 = Signed(jg, n), m12 = -Signed(hk, n);
    const cplx m21 = a0 * gamma_ * SignedPrime(jg, n), m22 = -k * SignedPrime(hk, n);
    const cplx r1 = IPow(n) * Signed(jk, n), r2 = IPow(n) * k * SignedPrime(jk, n);
    const cplx det = m11 * m22 - m12 * m21;
    a_[n + n_max_] = (r1 * m22 - m12 * r2) / det;
    b_[n + n_max_] = (m11 * r2 - r1 * m21) / det;
  }
}

MieDisk::cplx MieDisk::Scattered(const Point &x) const
{
  const double rho = x.norm();
  const double th = std::atan2(x.y(), x.x()) - phi_;
  const auto h = special::Hankel1Sequence(n_max_, k_ * rho);
  cplx s = 0.0;
  for (int n = -n_max_; n <= n_max_; ++n)
  {
    s += b_[n + n_max_] * Signed(h, n) * std::polar(1.0, n * th);
  }
  return s;
}

MieDisk::cplx MieDisk::Total(const Point &x) const
{
  const double rho = x.norm();
  const double th = std::atan2(x.y(), x.x()) - phi_;
  if (rho < radius_)
  {
    const auto j = special::BesselJSequence(n_max_, gamma_ * rho);
    cplx s = 0.0;
    for (int n = -n_max_; n <= n_max_; ++n)
    {
      s += a_[n + n_max_] * Signed(j, n) * std::polar(1.0, n * th);
    }
    return s;
  }
  const Point d(std::cos(phi_), std::sin(phi_));
  return std::exp(kI * k_ * d.dot(x)) + Scattered(x);
}

MieDisk::cplx MieDisk::FarField(double theta) const
{
  cplx s = 0.0;
  for (int n = -n_max_; n <= n_max_; ++n)
  {
    s += b_[n + n_max_] * IPow(-n) * std::polar(1.0, n * (theta - phi_));
  }
  return std::sqrt(2.0 / (std::numbers::pi * k_)) * std::polar(1.0, -0.25 * std::numbers::pi) * s;
}

double MieDisk::InteriorEnergy() const
{
  using boost::math::quadrature::gauss;
  double total = 0.0;
  const int panels = 8;
  for (int n = -n_max_; n <= n_max_; ++n)
  {
    const int m = n < 0 ? -n : n;
    double radial = 0.0;
    for (int p = 0; p < panels; ++p)
    {
      const double lo = radius_ * p / panels, hi = radius_ * (p + 1) / panels;
      radial += gauss<double, 20>::integrate(
          [&](double rho) { return std::norm(special::BesselJ(m, gamma_ * rho)) * rho; }, lo, hi);
    }
    total += std::norm(a_[n + n_max_]) * radial;
  }
  return 2.0 * std::numbers::pi * total;
}

double MieDisk::FarFieldEnergy() const
{
  double s = 0.0;
  for (const cplx &b : b_)
  {
    s += std::norm(b);
  }
  return 2.0 * std::numbers::pi * (2.0 / (std::numbers::pi * k_)) * s;
}

}  // namespace subwave
