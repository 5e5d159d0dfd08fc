// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include "subwave/fem.hpp"
#include "subwave/meshgen.hpp"
#include "subwave/microcell.hpp"

using namespace subwave;

namespace
{

constexpr double kPi = std::numbers::pi;

const InclusionShape &Square()
{
  static const InclusionShape s = InclusionShape::Rectangle({0.25, 0.25}, {0.75, 0.75});
  return s;
}

const InclusionShape &Disk()
{
  static const InclusionShape s = InclusionShape::Disk({0.5, 0.5}, 0.25);
  return s;
}

struct Fixture
{
  Mesh square_mesh = MeshUnitCell(Square(), 0.025);
  DirichletSpectrum square = ComputeDirichletSpectrum(square_mesh, 8);
};

// Sine-product mean over the square of side a: nonzero iff both indices odd.
double SineMean(int m, int n, double a)
{
  auto one = [&](int k) { return k % 2 ? 2.0 * a / (k * kPi) : 0.0; };
  return (2.0 / a) * one(m) * one(n);
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "square inclusion spectrum and mean classes")
{
  // lambda^2 = 4 pi^2 (m^2 + n^2) on a square of side 1/2.
  const double expected[] = {8 * kPi * kPi, 20 * kPi * kPi, 20 * kPi * kPi, 32 * kPi * kPi,
                             40 * kPi * kPi, 40 * kPi * kPi};
  for (int j = 0; j < 6; ++j)
  {
    CHECK(std::abs(square.eigenvalues[j] - expected[j]) / expected[j] < 2.5e-2);
  }
  // (1,1) nonzero mean with the sine-product value; (1,2),(2,1) zero mean;
  // (2,2) zero mean. The mesh splits the (1,3),(3,1) pair slightly; the
  // split pair is (1,3) +- (3,1), of which only the sum has a mean.
  CHECK(square.classes[0] == ModeClass::kNonzeroMean);
  CHECK(std::abs(std::abs(square.means[0]) - SineMean(1, 1, 0.5)) < 5e-3);
  CHECK(square.classes[1] == ModeClass::kZeroMean);
  CHECK(square.classes[2] == ModeClass::kZeroMean);
  CHECK(square.eigenspace[1] == square.eigenspace[2]);
  CHECK(square.classes[3] == ModeClass::kZeroMean);
  CHECK((square.classes[4] == ModeClass::kNonzeroMean) != (square.classes[5] == ModeClass::kNonzeroMean));
  CHECK(std::abs(square.eigenvalues[5] - square.eigenvalues[4]) / square.eigenvalues[4] < 5e-3);
  const double pair = square.means[4] * square.means[4] + square.means[5] * square.means[5];
  CHECK(std::abs(pair - 2.0 * SineMean(1, 3, 0.5) * SineMean(1, 3, 0.5)) < 5e-3);
}

TEST_CASE_FIXTURE(Fixture, "classify sigma")
{
  const auto c1 = ClassifySigma(square, square.frequency(0));
  CHECK(c1.cls == SigmaClass::kNonzeroMean);
  CHECK(ClassifySigma(square, 0.0).cls == SigmaClass::kOutside);
  CHECK(ClassifySigma(square, -square.frequency(1)).cls == SigmaClass::kZeroMean);
}

TEST_CASE("disk spectrum against Bessel zeros")
{
  const DirichletSpectrum s = ComputeDirichletSpectrum(MeshUnitCell(Disk(), 0.02), 3);
  const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
  const double j11 = boost::math::cyl_bessel_j_zero(1.0, 1);
  CHECK(std::abs(s.frequency(0) - j01 / 0.25) / (j01 / 0.25) < 5e-3);
  CHECK(std::abs(s.frequency(1) - j11 / 0.25) / (j11 / 0.25) < 5e-3);
  CHECK(ClassifySigma(s, s.frequency(1)).cls == SigmaClass::kZeroMean);
  CHECK(ClassifySigma(s, s.frequency(0)).cls == SigmaClass::kNonzeroMean);
}

TEST_CASE("beta and mu0 series")
{
  const Mesh cell = MeshUnitCell(Square(), 0.05);
  const DirichletSpectrum s = ComputeDirichletSpectrum(cell, 0);

  SUBCASE("empty spectrum")
  {
    const DirichletSpectrum none;
    CHECK(Beta(none, cplx(3.0, -1.0)).value == cplx(0.0));
    CHECK(Mu0(none, 7.0).value == cplx(1.0));
  }
  SUBCASE("beta(0) equals minus the torsion integral")
  {
    // Direct solve of -Laplace w = 1 on D with w = 0 on its boundary.
    const auto in_d = fem::RegionWeight(cell, [](RegionTag t) { return t == RegionTag::kInclusion; });
    const auto out_d = fem::RegionWeight(cell, [](RegionTag t) { return t != RegionTag::kInclusion; });
    std::vector<char> boundary(cell.NumVertices(), 0), inside(cell.NumVertices(), 0);
    for (std::size_t t = 0; t < cell.NumTriangles(); ++t)
    {
      for (int v : cell.triangles[t])
      {
        (out_d[t] > 0 ? boundary : inside)[v] = 1;
      }
    }
    std::vector<int> dof(cell.NumVertices(), -1);
    int n = 0;
    for (std::size_t v = 0; v < dof.size(); ++v)
    {
      if (inside[v] && !boundary[v])
      {
        dof[v] = n++;
      }
    }
    const fem::SpMat K = fem::Stiffness(cell, in_d), M = fem::Mass(cell, in_d);
    std::vector<Eigen::Triplet<double>> tk;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < K.outerSize(); ++k)
    {
      for (fem::SpMat::InnerIterator it(K, k); it; ++it)
      {
        if (dof[it.row()] >= 0 && dof[it.col()] >= 0)
        {
          tk.emplace_back(dof[it.row()], dof[it.col()], it.value());
        }
      }
      for (fem::SpMat::InnerIterator it(M, k); it; ++it)
      {
        if (dof[it.row()] >= 0)
        {
          rhs[dof[it.row()]] += it.value();
        }
      }
    }
    fem::SpMat Kr(n, n);
    Kr.setFromTriplets(tk.begin(), tk.end());
    const Eigen::VectorXd w = Eigen::SimplicialLDLT<fem::SpMat>(Kr).solve(rhs);
    const double torsion = rhs.dot(w);
    CHECK(std::abs(Beta(s, 0.0).value.real() + torsion) < 1e-9 * torsion);
  }
  SUBCASE("symmetries and pole guard")
  {
    const cplx z(5.0, -0.7);
    CHECK(std::abs(Beta(s, -z).value - Beta(s, z).value) < 1e-14);
    CHECK(std::abs(Beta(s, std::conj(z)).value - std::conj(Beta(s, z).value)) < 1e-14);
    CHECK_THROWS_AS(Beta(s, s.frequency(0) + 1e-10), PoleError);
    CHECK_THROWS_AS(Mu0(s, s.frequency(0) + 1e-10), PoleError);
    // Zero-mean frequencies are not poles of mu0.
    CHECK_NOTHROW(Mu0(s, s.frequency(1)));
  }
  SUBCASE("Im z > 0: Im(z^2 mu0) has the sign of Im(z^2)")
  {
    for (cplx z : {cplx(3.0, 0.5), cplx(9.0, 0.1), cplx(12.0, 2.0), cplx(0.5, 4.0), cplx(-7.0, 0.3)})
    {
      const cplx z2 = z * z;
      CAPTURE(z);
      CHECK((z2 * Mu0(s, z).value).imag() * z2.imag() > 0.0);
    }
  }
  SUBCASE("mu0 at zero and just above the first pole")
  {
    CHECK(Mu0(s, 0.0).value == cplx(1.0));
    CHECK(Mu0(s, s.frequency(0) * (1.0 + 1e-6)).value.real() < -1e3);
  }
}

TEST_CASE("corrector and effective tensor")
{
  SUBCASE("no inclusion")
  {
    const CorrectorResult cr = SolveCorrector(MeshUnitCell(InclusionShape::None(), 0.1));
    CHECK((cr.a0 - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cr.chi[0].cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cr.chi[1].cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("centered disk: isotropic, with the positivity gap, converging")
  {
    std::vector<double> a;
    for (double h : {0.08, 0.04, 0.02})
    {
      const CorrectorResult cr = SolveCorrector(MeshUnitCell(Disk(), h));
      CHECK(std::abs(cr.a0(0, 1)) < 1e-8);
      CHECK(std::abs(cr.a0(1, 0)) < 1e-8);
      CHECK(std::abs(cr.a0(0, 0) - cr.a0(1, 1)) < 1e-8);
      CHECK(1.0 - cr.a0(0, 0) >= kPi / 16.0);
      a.push_back(cr.a0(0, 0));
    }
    // Second-order Richardson value against the finest solve.
    const double extrapolated = (4.0 * a[2] - a[1]) / 3.0;
    CHECK(std::abs(a[2] - extrapolated) < 2e-3);
    CHECK(std::abs(a[1] - a[2]) < std::abs(a[0] - a[1]));
  }
}

TEST_CASE("cell function")
{
  const Mesh cell = MeshUnitCell(Disk(), 0.05);
  const DirichletSpectrum s = ComputeDirichletSpectrum(cell, 0);
  SUBCASE("k = 0 gives the constant 1")
  {
    const CellFunction f = LambdaCell(cell, 0.0);
    CHECK((f.values.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(f.mean - 1.0) < 1e-12);
  }
  SUBCASE("mean matches the series below the first pole")
  {
    for (double k : {1.0, 4.0, 8.0})
    {
      const CellFunction f = LambdaCell(cell, k, &s);
      CHECK(f.values.imag().cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(f.mean - Mu0(s, k).value) < 1e-6);
    }
  }
  SUBCASE("mean blows up approaching the first pole from below")
  {
    double prev = 0.0;
    for (double gap : {1e-1, 1e-2, 1e-3})
    {
      const double m = std::abs(LambdaCell(cell, s.frequency(0) - gap).mean);
      CHECK(m > prev);
      prev = m;
    }
    CHECK(prev > 100.0);
  }
}

TEST_CASE("dispersion scan")
{
  const DirichletSpectrum s = ComputeDirichletSpectrum(MeshUnitCell(Disk(), 1.0 / 12.0), 0);
  const double l1 = s.frequency(0);
  SUBCASE("below the first pole")
  {
    const DispersionReport r = DispersionScan(s, 0.5, 0.9 * l1, 200);
    CHECK(r.poles.empty());
    CHECK(r.zeros.empty());
    CHECK(r.gaps.empty());
    for (std::size_t i = 1; i < r.samples.size(); ++i)
    {
      CHECK(r.samples[i].second > r.samples[i - 1].second);
    }
  }
  SUBCASE("across the first pole")
  {
    const DispersionReport r = DispersionScan(s, 0.5, 1.1 * l1, 400);
    REQUIRE(r.gaps.size() == 1);
    CHECK(r.gaps[0].first == doctest::Approx(l1).epsilon(1e-12));
    CHECK(std::abs(Mu0(s, r.gaps[0].second).value) < 1e-8);
    CHECK(Mu0(s, 0.5 * (r.gaps[0].first + r.gaps[0].second)).value.real() < 0.0);
  }
  SUBCASE("poles are the nonzero-mean frequencies only")
  {
    const DispersionReport r = DispersionScan(s, 0.5, 30.0, 300);
    std::set<int> spaces;
    for (std::size_t j = 0; j < s.size(); ++j)
    {
      if (s.classes[j] == ModeClass::kNonzeroMean && s.frequency(j) < 30.0)
      {
        spaces.insert(s.eigenspace[j]);
      }
    }
    CHECK(r.poles.size() == spaces.size());
    for (double p : r.poles)
    {
      CHECK(ClassifySigma(s, p).cls == SigmaClass::kNonzeroMean);
    }
  }
}
