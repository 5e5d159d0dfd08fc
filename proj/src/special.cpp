// SPDX-License-Identifier: Apache-2.0

#include "subwave/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace subwave::special
{

namespace
{

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kMaxImagUpper = 8.0;    // cancellation limit for H^(1) = J + iY
// Below the real axis the forward sweep loses about exp(2|Im z|) * 1e-16 in
// relative accuracy for orders above |z|; beyond this the result is unusable.
constexpr double kMaxImagLower = 15.0;
constexpr double kRescale = 1e200;

void CheckArgument(cplx z)
{
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
  {
    throw std::domain_error("Bessel argument is not finite");
  }
  if (z.imag() > kMaxImagUpper || z.imag() < -kMaxImagLower)
  {
    throw std::range_error("Hankel evaluation out of range: Im(z) = " +
                           std::to_string(z.imag()));
  }
}

// J alone has no cancellation; only overflow of exp(|Im z|) limits it.
void CheckBesselJArgument(cplx z)
{
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
  {
    throw std::domain_error("Bessel argument is not finite");
  }
  if (std::abs(z.imag()) > 600.0)
  {
    throw std::range_error("Bessel J evaluation out of range: Im(z) = " +
                           std::to_string(z.imag()));
  }
}

// J_0..J_K by Miller's backward recurrence. The normalisation uses the
// generating-function identity exp(-i z) = J_0 + 2 sum (-i)^n J_n in the upper
// half plane and exp(i z) = J_0 + 2 sum i^n J_n in the lower one, so the
// normalising sum never cancels.
std::vector<cplx> MillerTable(int nmin, cplx z)
{
  const double az = std::abs(z);
  const double top = std::max<double>(nmin, az);
  int m = static_cast<int>(top) + 20 + static_cast<int>(std::sqrt(60.0 * (top + 1.0)));
  m += m % 2;
  std::vector<cplx> j(m + 2, cplx(0.0));
  j[m + 1] = 0.0;
  j[m] = 1e-300;
  const cplx two_over_z = 2.0 / z;
  for (int k = m; k >= 1; --k)
  {
    j[k - 1] = static_cast<double>(k) * two_over_z * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > kRescale)
    {
      for (int i = k - 1; i <= m + 1; ++i)
      {
        j[i] /= kRescale;
      }
    }
  }
  const bool upper = z.imag() >= 0.0;
  const cplx c = upper ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  const cplx target = upper ? std::exp(cplx(0.0, -1.0) * z) : std::exp(cplx(0.0, 1.0) * z);
  cplx sum = 0.0;
  cplx ck = 1.0;
  for (int k = 1; k <= m; ++k)
  {
    ck *= c;
    sum += ck * j[k];
  }
  sum = j[0] + 2.0 * sum;
  const cplx scale = target / sum;
  for (auto &v : j)
  {
    v *= scale;
  }
  j.pop_back();
  return j;
}

// Power series, used for small |z| where the recurrence start is awkward.
std::vector<cplx> SeriesTable(int kmax, cplx z)
{
  std::vector<cplx> j(kmax + 1, cplx(0.0));
  const cplx q = -0.25 * z * z;
  cplx lead = 1.0;  // (z/2)^n / n!
  for (int n = 0; n <= kmax; ++n)
  {
    if (n > 0)
    {
      lead *= 0.5 * z / static_cast<double>(n);
    }
    if (std::abs(lead) < 1e-300)
    {
      break;
    }
    cplx term = lead;
    cplx sum = term;
    for (int k = 1; k < 200; ++k)
    {
      term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum))
      {
        break;
      }
    }
    j[n] = sum;
  }
  return j;
}

std::vector<cplx> JTable(int nmin, cplx z)
{
  if (std::abs(z) < 0.5)
  {
    return SeriesTable(std::max(nmin, 30), z);
  }
  return MillerTable(nmin, z);
}

// Y_0 and Y_1 from Neumann-type expansions in J_n.
std::pair<cplx, cplx> Y01(const std::vector<cplx> &j, cplx z)
{
  const cplx lg = LogResonanceSheet(0.5 * z) + kEulerGamma;
  const int kmax = static_cast<int>(j.size()) - 1;
  cplx s0 = 0.0;
  cplx s1 = 0.0;
  for (int k = 1; 2 * k <= kmax; ++k)
  {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sign * j[2 * k] / static_cast<double>(k);
    const cplx jp = (2 * k + 1 <= kmax) ? j[2 * k + 1] : cplx(0.0);
    s1 += sign * (j[2 * k - 1] - jp) / static_cast<double>(k);
  }
  const double f = 2.0 / std::numbers::pi;
  const cplx y0 = f * (lg * j[0] - 2.0 * s0);
  const cplx y1 = f * (-j[0] / z + lg * j[1] + s1);
  return {y0, y1};
}

double ParitySign(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

cplx LogResonanceSheet(cplx z)
{
  double arg = std::arg(z);
  if (arg <= -0.5 * std::numbers::pi)
  {
    arg += 2.0 * std::numbers::pi;
  }
  return {std::log(std::abs(z)), arg};
}

cplx SqrtResonanceSheet(cplx z)
{
  if (z == cplx(0.0))
  {
    return 0.0;
  }
  return std::exp(0.5 * LogResonanceSheet(z));
}

std::vector<cplx> BesselJSequence(int nmax, cplx z)
{
  if (nmax < 0)
  {
    throw std::invalid_argument("BesselJSequence: nmax < 0");
  }
  if (z == cplx(0.0))
  {
    std::vector<cplx> j(nmax + 1, cplx(0.0));
    j[0] = 1.0;
    return j;
  }
  CheckBesselJArgument(z);
  auto j = JTable(nmax + 1, z);
  j.resize(nmax + 1);
  return j;
}

std::vector<cplx> Hankel1Sequence(int nmax, cplx z)
{
  if (nmax < 0)
  {
    throw std::invalid_argument("Hankel1Sequence: nmax < 0");
  }
  if (z == cplx(0.0))
  {
    throw std::range_error("Hankel function is singular at z = 0");
  }
  CheckArgument(z);
  const auto j = JTable(std::max(nmax, 2), z);
  const auto [y0, y1] = Y01(j, z);
  const cplx i(0.0, 1.0);
  std::vector<cplx> h(nmax + 1);
  h[0] = j[0] + i * y0;
  if (nmax >= 1)
  {
    h[1] = j[1] + i * y1;
  }
  for (int n = 1; n < nmax; ++n)
  {
    h[n + 1] = (2.0 * n / z) * h[n] - h[n - 1];
    if (!std::isfinite(std::abs(h[n + 1])))
    {
      throw std::range_error("Hankel recurrence overflow at order " + std::to_string(n + 1));
    }
  }
  return h;
}

cplx BesselJ(int n, cplx z)
{
  const int m = std::abs(n);
  const cplx v = BesselJSequence(m, z)[m];
  return (n < 0) ? ParitySign(m) * v : v;
}

cplx BesselY(int n, cplx z)
{
  const int m = std::abs(n);
  const auto h = Hankel1Sequence(m, z);
  const auto j = BesselJSequence(m, z);
  const cplx v = (h[m] - j[m]) / cplx(0.0, 1.0);
  return (n < 0) ? ParitySign(m) * v : v;
}

cplx Hankel1(int n, cplx z)
{
  const int m = std::abs(n);
  const cplx v = Hankel1Sequence(m, z)[m];
  return (n < 0) ? ParitySign(m) * v : v;
}

cplx BesselJPrime(int n, cplx z)
{
  if (n == 0)
  {
    return -BesselJ(1, z);
  }
  return 0.5 * (BesselJ(n - 1, z) - BesselJ(n + 1, z));
}

cplx Hankel1Prime(int n, cplx z)
{
  if (n == 0)
  {
    return -Hankel1(1, z);
  }
  return 0.5 * (Hankel1(n - 1, z) - Hankel1(n + 1, z));
}

std::vector<cplx> Hankel1LogDerivativeSequence(int nmax, cplx z)
{
  const auto h = Hankel1Sequence(std::max(nmax, 1), z);
  std::vector<cplx> out(nmax + 1);
  out[0] = -z * h[1] / h[0];
  for (int n = 1; n <= nmax; ++n)
  {
    out[n] = z * h[n - 1] / h[n] - static_cast<double>(n);
  }
  return out;
}

}  // namespace subwave::special
