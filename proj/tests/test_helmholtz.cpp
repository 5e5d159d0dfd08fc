// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include "subwave/fem.hpp"
#include "subwave/helmholtz.hpp"
#include "subwave/meshgen.hpp"
#include "subwave/oracle.hpp"

using namespace subwave;

namespace
{

ScatterScene Scene(const MacroDomain &omega, const Lattice &lattice, const InclusionShape &shape,
                   double r, double h, double k)
{
  ScatterScene sc;
  sc.omega = omega;
  sc.lattice = lattice;
  sc.shape = shape;
  sc.r = r;
  sc.incident = IncidentWave::Plane(k, {1.0, 0.0});
  sc.mesh = std::make_shared<Mesh>(MeshScene(omega, lattice, shape, r, h));
  return sc;
}

double MaxScattered(const FieldSolution &sol, const ScatterScene &sc)
{
  double m = 0.0;
  for (std::size_t i = 0; i < sc.mesh->NumVertices(); ++i)
  {
    m = std::max(m, std::abs(sol.u[i] - sc.incident.Value(sc.mesh->vertices[i])));
  }
  return m;
}

}  // namespace

TEST_CASE("DtN coefficients")
{
  const DtnOperator d = BuildDtn(2.0, 1.0, 6);
  const cplx h0(boost::math::cyl_bessel_j(0, 2.0), boost::math::cyl_neumann(0, 2.0));
  const cplx h1(boost::math::cyl_bessel_j(1, 2.0), boost::math::cyl_neumann(1, 2.0));
  CHECK(std::abs(d.Coefficient(0) - (-h1 / h0)) < 1e-13);
  for (int n = 1; n <= 6; ++n)
  {
    CHECK(d.Coefficient(n) == d.Coefficient(-n));
  }
  // Real frequency: outgoing maps have Re d_n < 0 and Im d_n > 0.
  const DtnOperator e = BuildDtn(1.3, 4.0, 20);
  for (int n = 0; n <= 20; ++n)
  {
    CHECK(e.Coefficient(n).real() < 0.0);
    CHECK(e.Coefficient(n).imag() > 0.0);
  }
}

TEST_CASE("DtN block is dissipative for real k on random traces")
{
  const Mesh mesh = MeshScene(MacroDomain::Disk(0.5), Lattice(0.1, {}), InclusionShape::None(), 1.0, 0.1);
  const CircleTrace tr = ExtractCircleTrace(mesh, 1.0);
  const Eigen::MatrixXcd B = DtnBlock(tr, BuildDtn(1.0, 5.0, DefaultDtnModes(1.0, 5.0)));
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial)
  {
    Eigen::VectorXcd v(B.rows());
    for (int i = 0; i < v.size(); ++i)
    {
      v[i] = cplx(g(rng), g(rng));
    }
    CHECK((v.adjoint() * B * v)(0).real() <= 1e-12);
  }
}

TEST_CASE("system matrix: symmetric, real apart from the DtN block")
{
  const MacroDomain om = MacroDomain::Rectangle({-0.5, -0.5}, {0.5, 0.5});
  const InclusionShape disk = InclusionShape::Disk({0.5, 0.5}, 0.25);
  const Lattice lat = BuildLattice(om, 0.25);
  auto mesh = std::make_shared<Mesh>(MeshScene(om, lat, disk, 1.0, 0.03));
  const HelmholtzOperator op = HelmholtzOperator::Fine(mesh, 0.25, 1.0);
  const Eigen::SparseMatrix<cplx> A = op.Assemble(3.0);
  const Eigen::SparseMatrix<cplx> At = A.transpose();
  CHECK((Eigen::MatrixXcd(A) - Eigen::MatrixXcd(At)).cwiseAbs().maxCoeff() < 1e-12);
  std::vector<char> on_trace(mesh->NumVertices(), 0);
  for (int v : op.trace().nodes)
  {
    on_trace[v] = 1;
  }
  double off_trace_imag = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
  {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(A, k); it; ++it)
    {
      if (!(on_trace[it.row()] && on_trace[it.col()]))
      {
        off_trace_imag = std::max(off_trace_imag, std::abs(it.value().imag()));
      }
    }
  }
  CHECK(off_trace_imag == 0.0);
}

TEST_CASE("trivial media scatter nothing")
{
  const InclusionShape none = InclusionShape::None();
  SUBCASE("effective with a0 = I, mu0 = 1")
  {
    const EffectiveMedium med = BuildEffectiveMedium(none, 0.1, 0);
    const ScatterScene sc = Scene(MacroDomain::Disk(0.5), Lattice(0.1, {}), none, 1.0, 0.03, 3.0);
    const FieldSolution sol = SolveEffective(sc, med, 3.0);
    CHECK(MaxScattered(sol, sc) < 2e-2);
    CHECK((sol.u - SolveFree(sc).u).cwiseAbs().maxCoeff() < 1e-10);
    const FarField ff = ComputeFarField(sol, sc, 0.9, UniformAngles(32));
    for (cplx v : ff.values)
    {
      CHECK(std::abs(v) < 5e-2);
    }
  }
  SUBCASE("fine with an empty lattice")
  {
    const InclusionShape disk = InclusionShape::Disk({0.5, 0.5}, 0.25);
    const ScatterScene sc = Scene(MacroDomain::Disk(0.5), Lattice(0.125, {}), disk, 1.0, 0.03, 3.0);
    CHECK(MaxScattered(SolveFine(sc, 3.0), sc) < 2e-2);
  }
}

TEST_CASE("far field of the analytic disk solution")
{
  const MieDisk mie(4.0, 0.5, 0.7, 1.3);
  auto us = [&](const Point &x) { return mie.Scattered(x); };
  const auto theta = UniformAngles(64);
  const FarField a = FarFieldFromCircle(us, 0.6, 4.0, theta);
  const FarField b = FarFieldFromCircle(us, 1.7, 4.0, theta);
  double spread = 0.0, gap = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
  {
    spread = std::max(spread, std::abs(a.values[i] - b.values[i]));
    gap = std::max(gap, std::abs(a.values[i] - mie.FarField(theta[i])));
  }
  CHECK(spread < 1e-8);
  CHECK(gap < 1e-8);
  const FarField zero = FarFieldFromCircle([](const Point &) { return cplx(0.0); }, 0.8, 4.0, theta);
  for (cplx v : zero.values)
  {
    CHECK(v == cplx(0.0));
  }
}

TEST_CASE("effective disk against the transmission series")
{
  const EffectiveMedium med = BuildEffectiveMedium(InclusionShape::Disk({0.5, 0.5}, 0.25), 0.08, 0);
  const double k = 4.0;
  const ScatterScene sc = Scene(MacroDomain::Disk(0.5), Lattice(0.1, {}), med.shape, 1.0, 0.02, k);
  const FieldSolution sol = SolveEffective(sc, med, k);
  const MieDisk mie(k, 0.5, med.a0(0, 0), med.Mu0(k));
  const std::vector<double> all(sc.mesh->NumTriangles(), 1.0);
  auto exact = [&](const Point &x) { return mie.Total(x); };
  const double rel = std::sqrt(fem::L2ErrorSquared(*sc.mesh, sol.u, exact, all) /
                               fem::L2NormSquared(*sc.mesh, fem::Interpolate(*sc.mesh, exact), all));
  CHECK(rel < 2e-2);
  CHECK(sol.residual < 1e-10);
  // The splitting uses the interpolated incident field, so the two solutions
  // agree only up to discretisation error.
  CHECK(sol.diagnostics.split_matrix_mismatch < 1e-10);
  CHECK(sol.diagnostics.split_solution_mismatch < 3e-2);
}

TEST_CASE("band-gap interior energy is below the matched positive-mu0 reference")
{
  for (double mu : {-0.5, -2.0, -8.0})
  {
    const MieDisk neg(10.0, 0.5, 0.68, mu), pos(10.0, 0.5, 0.68, -mu);
    CHECK(neg.InteriorEnergy() < pos.InteriorEnergy());
  }
}

TEST_CASE("fine field approaches the effective field outside Omega")
{
  const EffectiveMedium med = BuildEffectiveMedium(InclusionShape::Disk({0.5, 0.5}, 0.25), 1.0 / 8.0, 0);
  const MacroDomain om = MacroDomain::Disk(0.5);
  std::vector<double> gaps;
  for (double eps : {0.25, 0.125})
  {
    ScatterScene sc;
    sc.omega = om;
    sc.lattice = BuildLattice(om, eps);
    sc.shape = med.shape;
    sc.r = 1.0;
    sc.incident = IncidentWave::Plane(3.0, {1.0, 0.0});
    SceneMeshOptions mo;
    mo.h = eps / 8.0;
    sc.mesh = std::make_shared<Mesh>(MeshScene(om, sc.lattice, *med.cell_mesh, med.shape, 1.0, mo));
    const FieldSolution fine = SolveFine(sc, 3.0), eff = SolveEffective(sc, med, 3.0);
    const auto w = fem::RegionWeight(*sc.mesh, [](RegionTag t) { return t == RegionTag::kExterior; });
    gaps.push_back(std::sqrt(fem::L2NormSquared(*sc.mesh, fine.u - eff.u, w)));
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[1] < 0.2);
}
