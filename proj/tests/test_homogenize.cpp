// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <string>

#include <doctest.h>

#include "subwave/fem.hpp"
#include "subwave/homogenize.hpp"
#include "subwave/meshgen.hpp"

using namespace subwave;

namespace
{

Eigen::Vector2cd Smooth(const Point &x)
{
  return {cplx(std::sin(2.0 * x.x()) * std::cos(x.y()), 0.5), cplx(x.x() * x.y(), std::exp(x.y()))};
}

struct SceneFixture
{
  EffectiveMedium medium;
  ScatterScene scene;

  SceneFixture(const InclusionShape &shape, const MacroDomain &omega, double eps, double h)
      : medium(BuildEffectiveMedium(shape, 1.0 / 8.0, 0))
  {
    scene.omega = omega;
    scene.lattice = BuildLattice(omega, eps);
    scene.shape = shape;
    scene.r = 1.0;
    scene.incident = IncidentWave::Plane(3.0, {1.0, 0.0});
    SceneMeshOptions mo;
    mo.h = h;
    scene.mesh = std::make_shared<Mesh>(MeshScene(omega, scene.lattice, *medium.cell_mesh, shape, 1.0, mo));
  }
};

}  // namespace

TEST_CASE("smoothing preserves constants and affine fields")
{
  const Point x(0.3, -0.2);
  for (double eps : {0.5, 0.1, 0.01})
  {
    const auto c = SmoothingConvolve([](const Point &) { return Eigen::Vector2cd(cplx(2.0, -1.0), 3.0); }, x, eps);
    CHECK(std::abs(c[0] - cplx(2.0, -1.0)) < 1e-12);
    CHECK(std::abs(c[1] - cplx(3.0)) < 1e-12);
    auto affine = [](const Point &p) { return Eigen::Vector2cd(1.0 + 2.0 * p.x() - p.y(), cplx(p.y(), p.x())); };
    CHECK((SmoothingConvolve(affine, x, eps) - affine(x)).norm() < 1e-12);
  }
  double sum = 0.0;
  for (double w : Mollifier::Standard().weights)
  {
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("smoothing error decays at least linearly for a smooth field")
{
  std::vector<std::pair<double, double>> pts;
  const Point x(0.2, 0.4);
  for (double eps : {0.2, 0.1, 0.05, 0.025})
  {
    pts.emplace_back(eps, (SmoothingConvolve(Smooth, x, eps) - Smooth(x)).norm());
  }
  CHECK(FitRate(pts).slope >= 0.9);
}

TEST_CASE("boundary cutoff")
{
  const MacroDomain om = MacroDomain::Rectangle({-0.5, -0.5}, {0.5, 0.5});
  const double eps = 1.0 / 32.0;
  CHECK(BoundaryCutoff(om, eps, {0.5 - 3.0 * eps, 0.0}) == doctest::Approx(1.0));
  CHECK(BoundaryCutoff(om, eps, {0.5 - 1.5 * eps, 0.0}) == 0.0);
  CHECK(BoundaryCutoff(om, eps, {0.0, 0.0}) == 1.0);
  CHECK(BoundaryCutoff(om, eps, {0.7, 0.0}) == 0.0);
  // The quintic ramp over a width eps has peak slope 15 / (8 eps).
  double max_slope = 0.0;
  const double dx = eps / 2000.0;
  for (double d = 1.5 * eps; d < 3.5 * eps; d += dx)
  {
    const double a = BoundaryCutoff(om, eps, {0.5 - d, 0.0});
    const double b = BoundaryCutoff(om, eps, {0.5 - d - dx, 0.0});
    max_slope = std::max(max_slope, std::abs(b - a) / dx);
  }
  CHECK(max_slope <= 1.875 / eps * (1.0 + 1e-6));
  CHECK(max_slope >= 1.8 / eps);
  CHECK(Inradius(om) == doctest::Approx(0.5));
  CHECK(Inradius(MacroDomain::Disk(0.7)) == doctest::Approx(0.7));
}

TEST_CASE("reconstruction without inclusions returns u0")
{
  SceneFixture f(InclusionShape::None(), MacroDomain::Disk(0.5), 0.125, 0.03);
  const FieldSolution u0 = SolveEffective(f.scene, f.medium, 3.0);
  const Reconstruction rec = Reconstruct(u0, f.medium, f.scene);
  CHECK((rec.combined - u0.u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reconstruction structure")
{
  const MacroDomain om = MacroDomain::Disk(0.5);
  SceneFixture f(InclusionShape::Disk({0.5, 0.5}, 0.25), om, 0.125, 0.125 / 8.0);
  const FieldSolution u0 = SolveEffective(f.scene, f.medium, 3.0);
  const Reconstruction rec = Reconstruct(u0, f.medium, f.scene);
  const Mesh &m = *f.scene.mesh;
  double outside_gap = 0.0, corrector_off_support = 0.0;
  for (std::size_t i = 0; i < m.NumVertices(); ++i)
  {
    if (!om.ContainsClosed(m.vertices[i], 1e-12))
    {
      outside_gap = std::max(outside_gap, std::abs(rec.combined[i] - u0.u[i]));
    }
    if (rec.cutoff[i] == 0.0)
    {
      corrector_off_support = std::max(corrector_off_support, std::abs(rec.corrector[i]));
    }
  }
  CHECK(outside_gap == 0.0);
  CHECK(corrector_off_support == 0.0);
  CHECK((rec.combined - rec.base - rec.corrector).cwiseAbs().maxCoeff() < 1e-14);

  SUBCASE("the reconstruction itself has zero error")
  {
    FieldSolution same = u0;
    same.u = rec.combined;
    const ErrorRow row = ComputeErrorRow(same, u0, rec, f.scene);
    CHECK(row.l2_recon == 0.0);
    CHECK(row.heps == 0.0);
  }
  SUBCASE("weighted norm dominates the L2 error")
  {
    const FieldSolution fine = SolveFine(f.scene, 3.0);
    const ErrorRow row = ComputeErrorRow(fine, u0, rec, f.scene);
    CHECK(row.heps >= row.l2_recon);
    CHECK(row.l2_recon > 0.0);
    CHECK(row.e_functional > 0.0);
  }
}

TEST_CASE("rate fits")
{
  std::vector<std::pair<double, double>> lin, half;
  for (double e : {0.25, 0.125, 0.0625, 0.03125})
  {
    lin.emplace_back(e, 3.0 * e);
    half.emplace_back(e, 0.7 * std::sqrt(e));
  }
  CHECK(FitRate(lin).slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(FitRate(lin).residual < 1e-12);
  CHECK(FitRate(half).slope == doctest::Approx(0.5).epsilon(1e-12));
  lin.emplace_back(0.01, 0.0);
  const RateFit f = FitRate(lin);
  CHECK(f.notes.size() == 1);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(FitRate({{0.1, 1.0}, {0.05, 0.0}, {0.025, 0.3}}));
  CHECK_THROWS(FitRate({{-0.1, 1.0}, {0.05, 0.5}, {0.025, 0.3}}));
}

TEST_CASE("error report round trip")
{
  std::vector<ErrorRow> rows(2);
  rows[0] = {0.125, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  rows[1] = {0.0625, 1.0 / 3.0, 2e-7, 3.5, 4.25, 5.125, 6.0625};
  const std::string path = "test_error_report.csv";
  WriteErrorReportCsv(rows, path);
  const auto back = ReadErrorReportCsv(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == 2);
  // Twelve significant digits on disk.
  CHECK(back[1].epsilon == rows[1].epsilon);
  CHECK(back[1].l2_ball == doctest::Approx(rows[1].l2_ball).epsilon(1e-11));
  CHECK(back[1].l2_recon == doctest::Approx(rows[1].l2_recon).epsilon(1e-11));
  CHECK(back[0].farfield_sup == doctest::Approx(rows[0].farfield_sup).epsilon(1e-11));
}
