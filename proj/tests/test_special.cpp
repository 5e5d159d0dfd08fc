// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include "subwave/special.hpp"

using namespace subwave::special;

namespace
{

struct Reference
{
  int n;
  cplx z;
  cplx j;
  cplx h;
};

// Arbitrary-precision evaluations (30 digits) rounded to double.
const Reference kReference[] = {
    {0, {2.5, 0.3}, {-0.059587237071299568, -0.15056720206366807}, {-0.014466937592312715, 0.36735722473297202}},
    {1, {2.5, 0.3}, {0.51151690232095852, -0.075214474583502101}, {0.37870360313459406, 0.084164643782611594}},
    {5, {2.5, 0.3}, {0.017489543701547571, 0.010299124346817006}, {-1.6898520130711207, -3.2285315456107861}},
    {12, {2.5, 0.3}, {4.8777420943365935e-9, 2.8981387961626837e-8}, {-909003.84760960614, -158126.74101764892}},
    {0, {3.5, -1.8}, {-1.2257301695070155, 0.24817174368627275}, {-2.400983179783311, 0.5379665673072946}},
    {1, {3.5, -1.8}, {0.13236509489192816, 1.1414521112548412}, {0.22594307443884976, 2.3409048235352602}},
    {5, {3.5, -1.8}, {-0.042433759389735613, -0.16582027823533271}, {0.3181726242061846, -0.36563623303917808}},
    {12, {3.5, -1.8}, {4.0071183051553376e-6, 4.367331228945879e-6}, {-3541.6716108309407, -2955.5980376355814}},
    {0, {0.7, -0.2}, {0.88944512564356954, 0.06612637717468128}, {1.1061506609866545, -0.09778799571009011}},
    {1, {0.7, -0.2}, {0.33390960915708298, -0.082643566957686776}, {0.59234615610347942, -1.1288575667130239}},
    {5, {0.7, -0.2}, {9.9217779571655131e-6, -5.1314333432524282e-5}, {1205.8453805875729, -240.63086744884308}},
    {12, {0.7, -0.2}, {-1.0992403375702847e-14, 2.1438841339126715e-15}, {-451817194874.51973, 2328788101090.4802}},
    {0, {12.0, -4.0}, {2.2227384099735764, -5.7230670655388316}, {4.4452761391298068, -11.450224183057587}},
    {1, {12.0, -4.0}, {-5.5751687280909388, -2.4133055696703625}, {-11.146201359910887, -4.8269657886087909}},
    {5, {12.0, -4.0}, {-1.0574070148566612, -4.4779051315133212}, {-2.1115019892803994, -8.9606006494084619}},
    {12, {12.0, -4.0}, {-0.01754811019892836, -0.71784257219615015}, {0.00030672823538797382, -1.4633815469617692}},
    {0, {1.2, 6.0}, {30.378963855858087, -59.159383555059273}, {0.00075512552055996463, -0.00021353395772742517}},
    {1, {1.2, 6.0}, {54.742833579104403, 26.780237826937706}, {-0.00021875842331630678, -0.00081678579801973383}},
    {5, {1.2, 6.0}, {8.4507534615807937, 0.64813642831184132}, {0.00019828038721242847, -0.0047879052788141381}},
    {12, {1.2, 6.0}, {-0.0023542051515995668, -0.0013108693487319575}, {3.9779340519383789, 7.8744664773123535}},
};

double Rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Bessel J and Hankel H1 match high-precision references at complex arguments")
{
  for (const auto &r : kReference)
  {
    CAPTURE(r.n);
    CAPTURE(r.z);
    CHECK(Rel(BesselJ(r.n, r.z), r.j) < 1e-11);
    CHECK(Rel(Hankel1(r.n, r.z), r.h) < 5e-11);
  }
}

TEST_CASE("real-argument values agree with Boost.Math")
{
  for (int n : {0, 1, 2, 7, 20})
  {
    for (double x : {0.05, 0.9, 3.3, 11.0, 27.5})
    {
      CAPTURE(n);
      CAPTURE(x);
      const double j = boost::math::cyl_bessel_j(n, x);
      const double y = boost::math::cyl_neumann(n, x);
      CHECK(std::abs(BesselJ(n, x) - j) <= 1e-12 * std::max(1.0, std::abs(j)));
      CHECK(std::abs(BesselY(n, x).real() - y) <= 1e-11 * std::max(1.0, std::abs(y)));
      CHECK(std::abs(BesselY(n, x).imag()) < 1e-14 * std::max(1.0, std::abs(y)));
    }
  }
}

TEST_CASE("Wronskian J_n Y_n' - J_n' Y_n = 2 / (pi z)")
{
  for (cplx z : {cplx(0.4, -0.1), cplx(3.0, -2.0), cplx(9.0, 0.5), cplx(5.5, -6.0)})
  {
    for (int n : {0, 1, 4, 9})
    {
      const cplx j = BesselJ(n, z), jp = BesselJPrime(n, z);
      const cplx h = Hankel1(n, z), hp = Hankel1Prime(n, z);
      // J H' - J' H = i W(J, Y) = 2i / (pi z).
      const cplx w = j * hp - jp * h;
      const cplx expected(0.0, 2.0 / (std::numbers::pi * 1.0));
      CAPTURE(z);
      CAPTURE(n);
      CHECK(std::abs(w * z - expected) < 1e-10 * std::max(1.0, std::abs(j * hp)));
    }
  }
}

TEST_CASE("derivative identities")
{
  const cplx z(2.2, -0.7);
  CHECK(std::abs(BesselJPrime(0, z) + BesselJ(1, z)) < 1e-14);
  CHECK(std::abs(Hankel1Prime(0, z) + Hankel1(1, z)) < 1e-13);
  // Central difference check of H_3'.
  const double d = 1e-5;
  const cplx fd = (Hankel1(3, z + d) - Hankel1(3, z - d)) / (2.0 * d);
  CHECK(std::abs(fd - Hankel1Prime(3, z)) < 1e-8 * std::abs(Hankel1Prime(3, z)));
}

TEST_CASE("log-derivative sequence equals z H_n' / H_n")
{
  const cplx z(4.0, -1.0);
  const auto d = Hankel1LogDerivativeSequence(10, z);
  REQUIRE(d.size() == 11);
  for (int n = 0; n <= 10; ++n)
  {
    CHECK(Rel(d[n], z * Hankel1Prime(n, z) / Hankel1(n, z)) < 1e-12);
  }
}

TEST_CASE("resonance-sheet logarithm has its cut on the negative imaginary axis")
{
  // Continuous across the negative real axis.
  const cplx above = LogResonanceSheet(cplx(-2.0, 1e-12));
  const cplx below = LogResonanceSheet(cplx(-2.0, -1e-12));
  CHECK(std::abs(above - below) < 1e-10);
  CHECK(std::abs(LogResonanceSheet(cplx(1.0, -1.0)) - std::log(cplx(1.0, -1.0))) < 1e-15);
  const cplx s = SqrtResonanceSheet(cplx(-4.0, 0.0));
  CHECK(std::abs(s - cplx(0.0, 2.0)) < 1e-14);
}

TEST_CASE("out-of-range arguments throw")
{
  CHECK_THROWS_AS(Hankel1(0, cplx(1.0, 9.0)), std::range_error);
  CHECK_THROWS_AS(Hankel1(0, cplx(1.0, -16.0)), std::range_error);
  CHECK_NOTHROW(BesselJ(2, cplx(1.0, 40.0)));
  CHECK_THROWS_AS(BesselJ(0, cplx(1.0, 700.0)), std::range_error);
}
