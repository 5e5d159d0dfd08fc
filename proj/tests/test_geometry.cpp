// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "subwave/geometry.hpp"
#include "subwave/mesh.hpp"
#include "subwave/meshgen.hpp"

using namespace subwave;

namespace
{

std::string ErrorText(const std::function<void()> &f)
{
  try
  {
    f();
  }
  catch (const std::exception &e)
  {
    return e.what();
  }
  return "";
}

double RegionArea(const Mesh &m, RegionTag tag)
{
  double a = 0.0;
  for (std::size_t t = 0; t < m.NumTriangles(); ++t)
  {
    a += m.regions[t] == tag ? m.TriangleArea(t) : 0.0;
  }
  return a;
}

}  // namespace

TEST_CASE("lattice of the unit square tiles exactly")
{
  const MacroDomain sq = MacroDomain::Rectangle({0.0, 0.0}, {1.0, 1.0});
  const Lattice l4 = BuildLattice(sq, 0.25);
  CHECK(l4.size() == 16);
  for (int i = 0; i < 4; ++i)
  {
    for (int j = 0; j < 4; ++j)
    {
      CHECK(l4.Has({i, j}));
    }
  }
  CHECK(BuildLattice(sq, 1.0 / 3.0).size() == 9);
}

TEST_CASE("lattice of the unit disk at eps = 1/2")
{
  const Lattice l = BuildLattice(MacroDomain::Disk(1.0), 0.5);
  CHECK(l.size() == 4);
  for (LatticeIndex m : {LatticeIndex{-1, -1}, LatticeIndex{-1, 0}, LatticeIndex{0, -1}, LatticeIndex{0, 0}})
  {
    CHECK(l.Has(m));
  }
}

TEST_CASE("lattice extensivity on a rectangle")
{
  const MacroDomain om = MacroDomain::Rectangle({-0.53, -0.31}, {0.47, 0.58});
  double prev = 0.0;
  for (double eps : {0.25, 0.125, 0.0625})
  {
    const double covered = BuildLattice(om, eps).size() * eps * eps;
    CHECK(covered <= om.Area() + 1e-12);
    CHECK(covered >= prev);
    prev = covered;
  }
  CHECK(prev > 0.75 * om.Area());
}

TEST_CASE("degenerate and touching inclusions are rejected")
{
  CHECK(ErrorText([] { InclusionShape::Disk({0.5, 0.5}, 0.0); }).find("degenerate inclusion") != std::string::npos);
  CHECK_THROWS_AS(InclusionShape::Disk({0.5, 0.5}, 0.5), GeometryError);
  CHECK_THROWS_AS(InclusionShape::Rectangle({0.0, 0.2}, {0.5, 0.6}), GeometryError);
  // Bow tie.
  CHECK_THROWS_AS(InclusionShape::Polygon({{0.2, 0.2}, {0.8, 0.8}, {0.8, 0.2}, {0.2, 0.8}}), GeometryError);
}

TEST_CASE("coefficient at points")
{
  const InclusionShape disk = InclusionShape::Disk({0.5, 0.5}, 0.25);
  const MacroDomain om = MacroDomain::Rectangle({0.0, 0.0}, {1.0, 1.0});
  const double eps = 0.25;
  const Lattice l = BuildLattice(om, eps);
  CHECK(CoefficientAt({1.5, 0.5}, l, disk) == 1.0);
  CHECK(CoefficientAt({eps * 0.5, eps * 0.5}, l, disk) == eps * eps);
  CHECK(CoefficientAt({eps, eps}, l, disk) == 1.0);
}

TEST_CASE("unit cell meshes")
{
  SUBCASE("disk: both regions and the inclusion area")
  {
    const double h = 0.05;
    const Mesh m = MeshUnitCell(InclusionShape::Disk({0.5, 0.5}, 0.25), h);
    m.Validate();
    CHECK(RegionArea(m, RegionTag::kInclusion) > 0.0);
    CHECK(RegionArea(m, RegionTag::kMatrix) > 0.0);
    CHECK(std::abs(RegionArea(m, RegionTag::kInclusion) - std::numbers::pi * 0.0625) <= 2 * h * h);
    CHECK(std::abs(RegionArea(m, RegionTag::kInclusion) + RegionArea(m, RegionTag::kMatrix) - 1.0) < 1e-12);
    CHECK_FALSE(m.periodic_pairs.empty());
    for (const auto &[i, j] : m.periodic_pairs)
    {
      const Point d = m.vertices[j] - m.vertices[i];
      CHECK(std::abs(std::abs(d.x()) + std::abs(d.y()) - 1.0) < 1e-12);
    }
  }
  SUBCASE("rectangle: straight edges are exact")
  {
    const Mesh m = MeshUnitCell(InclusionShape::Rectangle({0.25, 0.25}, {0.75, 0.75}), 0.1);
    CHECK(std::abs(RegionArea(m, RegionTag::kInclusion) - 0.25) < 1e-12);
  }
  SUBCASE("deterministic hash and text round trip")
  {
    const Mesh a = MeshUnitCell(InclusionShape::Disk({0.5, 0.5}, 0.2), 0.06);
    const Mesh b = MeshUnitCell(InclusionShape::Disk({0.5, 0.5}, 0.2), 0.06);
    CHECK(MeshHash(a) == MeshHash(b));
    std::stringstream ss;
    WriteMesh(a, ss);
    const Mesh c = ReadMesh(ss);
    CHECK(MeshHash(c) == MeshHash(a));
  }
}

TEST_CASE("scene meshes")
{
  const InclusionShape disk = InclusionShape::Disk({0.5, 0.5}, 0.25);
  SUBCASE("no lattice: matrix and exterior only")
  {
    const Mesh m = MeshScene(MacroDomain::Disk(0.5), Lattice(0.1, {}), disk, 1.0, 0.08);
    for (RegionTag t : m.regions)
    {
      CHECK(t != RegionTag::kInclusion);
    }
    CHECK(RegionArea(m, RegionTag::kExterior) > 0.0);
  }
  SUBCASE("16 inclusion components of the right area")
  {
    const MacroDomain om = MacroDomain::Rectangle({-0.5, -0.5}, {0.5, 0.5});
    const double eps = 0.25, h = 0.02;
    const Lattice l = BuildLattice(om, eps);
    const Mesh m = MeshScene(om, l, disk, 2.0, h);
    std::map<int, double> area;
    for (std::size_t t = 0; t < m.NumTriangles(); ++t)
    {
      if (m.regions[t] == RegionTag::kInclusion)
      {
        area[m.triangle_cell[t]] += m.TriangleArea(t);
      }
    }
    CHECK(area.size() == 16);
    for (const auto &[cell, a] : area)
    {
      CHECK(cell >= 0);
      CHECK(std::abs(a - eps * eps * std::numbers::pi * 0.0625) <= 2 * h * h);
    }
  }
  SUBCASE("truncation circle must enclose Omega")
  {
    const auto text = ErrorText([&] { MeshScene(MacroDomain::Disk(0.5), Lattice(0.1, {}), disk, 0.5, 0.05); });
    CHECK(text.find("truncation circle must enclose") != std::string::npos);
  }
}
