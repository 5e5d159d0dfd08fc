// SPDX-License-Identifier: Apache-2.0

#include "subwave/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "subwave/mesher.hpp"

namespace subwave
{

namespace
{

constexpr double kOnCurveTol = 1e-10;

std::string Num(double v)
{
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double Perimeter(const InclusionShape &shape)
{
  switch (shape.kind())
  {
    case InclusionShape::Kind::kNone:
      return 0.0;
    case InclusionShape::Kind::kDisk:
      return 2.0 * std::numbers::pi * shape.radius();
    case InclusionShape::Kind::kRectangle:
      return 2.0 * ((shape.hi() - shape.lo()).x() + (shape.hi() - shape.lo()).y());
    case InclusionShape::Kind::kPolygon:
    {
      double p = 0.0;
      const auto &v = shape.vertices();
      for (std::size_t i = 0; i < v.size(); ++i)
      {
        p += (v[(i + 1) % v.size()] - v[i]).norm();
      }
      return p;
    }
  }
  return 0.0;
}

// Boundary vertex classification of a unit-cell mesh: for each side (bottom,
// right, top, left) the vertices sorted along the side, corners included.
struct CellSides
{
  int n = 0;  // subdivisions per side
  std::array<std::vector<int>, 4> side;
};

CellSides CollectSides(const Mesh &cell)
{
  CellSides s;
  auto on = [](double v, double target) { return std::abs(v - target) <= 1e-14; };
  for (int v = 0; v < static_cast<int>(cell.vertices.size()); ++v)
  {
    const Point &p = cell.vertices[v];
    if (on(p.y(), 0.0))
    {
      s.side[0].push_back(v);
    }
    if (on(p.x(), 1.0))
    {
      s.side[1].push_back(v);
    }
    if (on(p.y(), 1.0))
    {
      s.side[2].push_back(v);
    }
    if (on(p.x(), 0.0))
    {
      s.side[3].push_back(v);
    }
  }
  auto by_x = [&](int a, int b) { return cell.vertices[a].x() < cell.vertices[b].x(); };
  auto by_y = [&](int a, int b) { return cell.vertices[a].y() < cell.vertices[b].y(); };
  std::sort(s.side[0].begin(), s.side[0].end(), by_x);
  std::sort(s.side[1].begin(), s.side[1].end(), by_y);
  std::sort(s.side[2].begin(), s.side[2].end(), by_x);
  std::sort(s.side[3].begin(), s.side[3].end(), by_y);
  s.n = static_cast<int>(s.side[0].size()) - 1;
  for (const auto &side : s.side)
  {
    if (static_cast<int>(side.size()) != s.n + 1 || s.n < 1)
    {
      throw MeshError("cell mesh is not periodic: side vertex counts differ");
    }
  }
  return s;
}

}  // namespace

Mesh MeshUnitCell(const InclusionShape &shape, double h)
{
  if (!(h > 0.0) || h >= 0.5)
  {
    throw GeometryError("cell mesh size must lie in (0, 0.5), got " + Num(h));
  }
  if (!shape.empty() && shape.WallDistance() < 2.0 * h)
  {
    throw GeometryError("degenerate inclusion: wall distance " + Num(shape.WallDistance()) +
                        " is below 2h = " + Num(2.0 * h) + " for " + shape.Describe());
  }
  const int n = std::max(3, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
  mesher::Pslg pslg;
  // Counter-clockwise square boundary with coordinates j / n on every side so
  // that opposite sides match exactly.
  auto frac = [n](int j) { return static_cast<double>(j) / n; };
  for (int j = 0; j < n; ++j)
  {
    pslg.points.emplace_back(frac(j), 0.0);
  }
  for (int j = 0; j < n; ++j)
  {
    pslg.points.emplace_back(1.0, frac(j));
  }
  for (int j = n; j > 0; --j)
  {
    pslg.points.emplace_back(frac(j), 1.0);
  }
  for (int j = n; j > 0; --j)
  {
    pslg.points.emplace_back(0.0, frac(j));
  }
  const int nsq = static_cast<int>(pslg.points.size());
  for (int i = 0; i < nsq; ++i)
  {
    pslg.segments.push_back({i, (i + 1) % nsq});
  }
  // A quarter-turn symmetric cell gets a symmetric mesh: discrete modes then
  // inherit the symmetry classes of the continuous ones and A0 stays exactly
  // isotropic. A centred disk is filled with rings of 8k points so that all
  // angular orders below 8 average to zero.
  const bool symmetric = shape.QuarterTurnSymmetric();
  const bool rings = symmetric && shape.kind() == InclusionShape::Kind::kDisk;
  const auto inner = shape.BoundaryPolygon(h, rings ? 8 : 1);
  const int ni = static_cast<int>(inner.size());
  for (int i = 0; i < ni; ++i)
  {
    pslg.points.push_back(inner[i]);
    pslg.segments.push_back({nsq + i, nsq + (i + 1) % ni});
  }
  if (symmetric)
  {
    // Without a centre vertex the innermost orbit of four points is cocircular
    // with an empty circle and the Delaunay diagonal is ambiguous.
    pslg.points.emplace_back(0.5, 0.5);
  }
  if (rings)
  {
    const double R = shape.radius();
    const Point c = shape.center();
    const int nrings = std::max(1, static_cast<int>(std::lround(R / h)));
    for (int k = 1; k < nrings; ++k)
    {
      const double rho = R * k / nrings;
      const int nk = 8 * std::max(1, static_cast<int>(std::lround(2.0 * std::numbers::pi * rho / (8.0 * h))));
      // Irregular per-ring twist: no reflection symmetry, so no cocircular ties.
      const double u = std::fmod(0.5 + std::numbers::sqrt2 * k + std::numbers::sqrt3 * k * k, 1.0);
      const double twist = 2.0 * std::numbers::pi / nk * u;
      for (int j = 0; j < nk; ++j)
      {
        const double t = twist + 2.0 * std::numbers::pi * j / nk;
        pslg.points.emplace_back(c.x() + rho * std::cos(t), c.y() + rho * std::sin(t));
      }
    }
  }

  mesher::Options opt;
  opt.size = [h](const Point &) { return h; };
  opt.admit = [&shape, rings](const Point &p)
  {
    if (rings && shape.Contains(p))
    {
      return false;
    }
    return p.x() > 0.0 && p.x() < 1.0 && p.y() > 0.0 && p.y() < 1.0;
  };
  opt.classify = [&shape](const Point &c)
  {
    if (!(c.x() > 0.0 && c.x() < 1.0 && c.y() > 0.0 && c.y() < 1.0))
    {
      return -1;
    }
    return shape.Contains(c) ? static_cast<int>(RegionTag::kInclusion)
                             : static_cast<int>(RegionTag::kMatrix);
  };
  opt.min_size = h;
  opt.max_size = h;
  if (symmetric)
  {
    opt.symmetry = 4;
    opt.symmetry_center = Point(0.5, 0.5);
  }
  const auto res = mesher::Triangulate(pslg, opt);

  Mesh mesh;
  mesh.vertices = res.points;
  mesh.triangles = res.triangles;
  for (int r : res.regions)
  {
    mesh.regions.push_back(static_cast<RegionTag>(r));
  }
  for (int i = 0; i < nsq; ++i)
  {
    mesh.edges.push_back({i, (i + 1) % nsq});
    mesh.edge_tags.push_back(BoundaryTag::kCellBoundary);
  }
  for (int i = 0; i < ni; ++i)
  {
    mesh.edges.push_back({nsq + i, nsq + (i + 1) % ni});
    mesh.edge_tags.push_back(BoundaryTag::kInterfaceInclusion);
  }
  // Periodic pairs: left -> right and bottom -> top, corners included.
  std::map<int, int> left, right, bottom, top;
  for (int v = 0; v < nsq; ++v)
  {
    const Point &p = mesh.vertices[v];
    const int jx = static_cast<int>(std::lround(p.x() * n));
    const int jy = static_cast<int>(std::lround(p.y() * n));
    if (p.x() == 0.0)
    {
      left[jy] = v;
    }
    if (p.x() == 1.0)
    {
      right[jy] = v;
    }
    if (p.y() == 0.0)
    {
      bottom[jx] = v;
    }
    if (p.y() == 1.0)
    {
      top[jx] = v;
    }
  }
  for (const auto &[j, v] : left)
  {
    mesh.periodic_pairs.emplace_back(v, right.at(j));
  }
  for (const auto &[j, v] : bottom)
  {
    mesh.periodic_pairs.emplace_back(v, top.at(j));
  }
  if (!shape.empty())
  {
    bool has_inclusion = false;
    for (auto r : mesh.regions)
    {
      has_inclusion = has_inclusion || r == RegionTag::kInclusion;
    }
    if (!has_inclusion)
    {
      throw MeshError("meshing failure: inclusion region lost for " + shape.Describe());
    }
  }
  mesh.Canonicalize();
  mesh.Validate();
  return mesh;
}

Mesh MeshScene(const MacroDomain &omega, const Lattice &lattice, const Mesh &cell_mesh,
               const InclusionShape &shape, double r, const SceneMeshOptions &options)
{
  const double h = options.h;
  const double h_far = (options.h_far > 0.0) ? std::max(options.h_far, h) : 4.0 * h;
  if (!(h > 0.0))
  {
    throw GeometryError("scene mesh size must be positive");
  }
  const double circum = omega.Circumradius();
  if (!(r > circum))
  {
    throw GeometryError("truncation circle must enclose Omega: r = " + Num(r) +
                        " but the circumradius is " + Num(circum));
  }
  const double eps = lattice.epsilon();
  const bool tiled = !lattice.empty();
  if (tiled && !shape.empty())
  {
    const double need_perimeter = eps * Perimeter(shape) / 6.0;
    const double need_wall = 0.5 * eps * shape.WallDistance();
    const double need = std::min(need_perimeter, need_wall);
    if (h > need * (1.0 + 1e-12))
    {
      throw GeometryError("h too coarse for eps = " + Num(eps) + ": need h <= " + Num(need) +
                          ", got " + Num(h));
    }
  }

  Mesh mesh;
  std::map<std::pair<long, long>, int> boundary_key;

  // Union-boundary segments of the tiled region, as global vertex pairs.
  std::vector<std::array<int, 2>> union_segments;
  if (tiled)
  {
    const CellSides sides = CollectSides(cell_mesh);
    const int n = sides.n;
    std::vector<char> on_side(cell_mesh.vertices.size(), 0);
    for (const auto &side : sides.side)
    {
      for (int v : side)
      {
        on_side[v] = 1;
      }
    }
    for (std::size_t v = 0; v < cell_mesh.vertices.size(); ++v)
    {
      if (!on_side[v])
      {
        continue;
      }
      const Point &p = cell_mesh.vertices[v];
      for (double c : {p.x(), p.y()})
      {
        if (std::abs(c * n - std::round(c * n)) > 1e-9)
        {
          throw MeshError("cell mesh boundary vertices are not on a uniform side grid");
        }
      }
    }
    const auto &idx = lattice.indices();
    std::vector<int> local_to_global(cell_mesh.vertices.size());
    for (std::size_t slot = 0; slot < idx.size(); ++slot)
    {
      const auto &m = idx[slot];
      for (std::size_t v = 0; v < cell_mesh.vertices.size(); ++v)
      {
        const Point &y = cell_mesh.vertices[v];
        const Point x(eps * (m[0] + y.x()), eps * (m[1] + y.y()));
        int gid = -1;
        if (on_side[v])
        {
          const std::pair<long, long> key(static_cast<long>(m[0]) * n + std::lround(y.x() * n),
                                          static_cast<long>(m[1]) * n + std::lround(y.y() * n));
          const auto it = boundary_key.find(key);
          if (it != boundary_key.end())
          {
            gid = it->second;
          }
          else
          {
            gid = static_cast<int>(mesh.vertices.size());
            boundary_key.emplace(key, gid);
          }
        }
        if (gid < 0 || gid == static_cast<int>(mesh.vertices.size()))
        {
          gid = static_cast<int>(mesh.vertices.size());
          mesh.vertices.push_back(x);
          mesh.cell_vertex.push_back(static_cast<int>(v));
          mesh.cell_slot.push_back(static_cast<int>(slot));
        }
        local_to_global[v] = gid;
      }
      for (std::size_t t = 0; t < cell_mesh.triangles.size(); ++t)
      {
        const auto &tri = cell_mesh.triangles[t];
        mesh.triangles.push_back(
            {local_to_global[tri[0]], local_to_global[tri[1]], local_to_global[tri[2]]});
        mesh.regions.push_back(cell_mesh.regions[t]);
        mesh.triangle_cell.push_back(static_cast<int>(slot));
      }
      for (std::size_t e = 0; e < cell_mesh.edges.size(); ++e)
      {
        if (cell_mesh.edge_tags[e] == BoundaryTag::kInterfaceInclusion)
        {
          mesh.edges.push_back({local_to_global[cell_mesh.edges[e][0]],
                                local_to_global[cell_mesh.edges[e][1]]});
          mesh.edge_tags.push_back(BoundaryTag::kInterfaceInclusion);
        }
      }
      const std::array<std::array<int, 2>, 4> dirs = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
      for (int s = 0; s < 4; ++s)
      {
        if (lattice.Has({m[0] + dirs[s][0], m[1] + dirs[s][1]}))
        {
          continue;
        }
        const auto &side = sides.side[s];
        for (std::size_t k = 0; k + 1 < side.size(); ++k)
        {
          union_segments.push_back({local_to_global[side[k]], local_to_global[side[k + 1]]});
        }
      }
    }
  }

  // PSLG of the remainder B_r minus the tiled cells.
  mesher::Pslg pslg;
  std::vector<int> pslg_gid;  // global id for union vertices, -1 otherwise
  std::map<int, int> gid_to_pslg;
  auto add_union_vertex = [&](int gid)
  {
    auto it = gid_to_pslg.find(gid);
    if (it != gid_to_pslg.end())
    {
      return it->second;
    }
    const int id = static_cast<int>(pslg.points.size());
    pslg.points.push_back(mesh.vertices[gid]);
    pslg_gid.push_back(gid);
    gid_to_pslg.emplace(gid, id);
    return id;
  };
  std::map<std::pair<int, int>, bool> union_pairs;
  std::vector<BoundaryTag> pslg_tags;
  auto on_omega = [&](const Point &p)
  { return omega.BoundaryDistance(p) <= kOnCurveTol * std::max(1.0, circum); };
  for (const auto &s : union_segments)
  {
    const int a = add_union_vertex(s[0]);
    const int b = add_union_vertex(s[1]);
    pslg.segments.push_back({a, b});
    const Point mid = 0.5 * (mesh.vertices[s[0]] + mesh.vertices[s[1]]);
    const bool along_omega = on_omega(mesh.vertices[s[0]]) && on_omega(mesh.vertices[s[1]]) &&
                             on_omega(mid);
    pslg_tags.push_back(along_omega ? BoundaryTag::kInterfaceOmega : BoundaryTag::kCellBoundary);
    union_pairs[{std::min(a, b), std::max(a, b)}] = true;
  }
  const int n_union = static_cast<int>(pslg.points.size());

  // Boundary loop of Omega, sharing union vertices that lie on it.
  struct LoopPoint
  {
    double param;
    Point p;
    int pslg_id;  // existing union vertex or -1
    bool corner;
  };
  std::vector<LoopPoint> loop;
  double loop_length = 0.0;
  if (omega.kind() == MacroDomain::Kind::kDisk)
  {
    const double R = omega.radius();
    const double s = std::min(h, h * std::sqrt(R));
    const int nc = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * R / s)));
    loop_length = 2.0 * std::numbers::pi;
    for (int k = 0; k < nc; ++k)
    {
      const double t = 2.0 * std::numbers::pi * k / nc;
      loop.push_back({t, Point(R * std::cos(t), R * std::sin(t)), -1, false});
    }
    for (int i = 0; i < n_union; ++i)
    {
      const Point &p = pslg.points[i];
      if (on_omega(p))
      {
        double t = std::atan2(p.y(), p.x());
        if (t < 0.0)
        {
          t += 2.0 * std::numbers::pi;
        }
        loop.push_back({t, p, i, true});
      }
    }
  }
  else
  {
    const auto corners = omega.Corners();
    const int nc = static_cast<int>(corners.size());
    std::vector<double> start(nc + 1, 0.0);
    for (int c = 0; c < nc; ++c)
    {
      start[c + 1] = start[c] + (corners[(c + 1) % nc] - corners[c]).norm();
    }
    loop_length = start[nc];
    for (int c = 0; c < nc; ++c)
    {
      const Point &a = corners[c];
      const Point &b = corners[(c + 1) % nc];
      const double len = (b - a).norm();
      const int ns = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
      for (int k = 0; k < ns; ++k)
      {
        const double t = static_cast<double>(k) / ns;
        loop.push_back({start[c] + t * len, a + t * (b - a), -1, k == 0});
      }
    }
    for (int i = 0; i < n_union; ++i)
    {
      const Point &p = pslg.points[i];
      if (!on_omega(p))
      {
        continue;
      }
      double best = 1e300, param = 0.0;
      for (int c = 0; c < nc; ++c)
      {
        const Point &a = corners[c];
        const Point &b = corners[(c + 1) % nc];
        const double d = DistanceToSegment(p, a, b);
        if (d < best)
        {
          best = d;
          const double len = (b - a).norm();
          param = start[c] + std::clamp((p - a).dot(b - a) / (len * len), 0.0, 1.0) * len;
        }
      }
      if (param >= loop_length - 1e-14 * loop_length)
      {
        param = 0.0;
      }
      loop.push_back({param, p, i, true});
    }
  }
  // Drop generated loop samples that crowd union geometry.
  if (n_union > 0)
  {
    std::vector<LoopPoint> kept;
    for (const auto &lp : loop)
    {
      if (lp.pslg_id >= 0)
      {
        kept.push_back(lp);
        continue;
      }
      bool coincides = false, crowded = false;
      for (int i = 0; i < n_union; ++i)
      {
        if ((pslg.points[i] - lp.p).norm() <= kOnCurveTol * std::max(1.0, circum))
        {
          coincides = true;
        }
      }
      if (!lp.corner)
      {
        for (const auto &s : pslg.segments)
        {
          if (DistanceToSegment(lp.p, pslg.points[s[0]], pslg.points[s[1]]) < 0.3 * h)
          {
            crowded = true;
            break;
          }
        }
      }
      if (!coincides && !crowded)
      {
        kept.push_back(lp);
      }
    }
    loop = std::move(kept);
  }
  std::stable_sort(loop.begin(), loop.end(),
                   [](const LoopPoint &a, const LoopPoint &b) { return a.param < b.param; });
  std::vector<int> loop_ids;
  for (const auto &lp : loop)
  {
    if (lp.pslg_id >= 0)
    {
      loop_ids.push_back(lp.pslg_id);
    }
    else
    {
      loop_ids.push_back(static_cast<int>(pslg.points.size()));
      pslg.points.push_back(lp.p);
      pslg_gid.push_back(-1);
    }
  }
  for (std::size_t k = 0; k < loop_ids.size(); ++k)
  {
    const int a = loop_ids[k];
    const int b = loop_ids[(k + 1) % loop_ids.size()];
    if (a == b || union_pairs.count({std::min(a, b), std::max(a, b)}))
    {
      continue;
    }
    pslg.segments.push_back({a, b});
    pslg_tags.push_back(BoundaryTag::kInterfaceOmega);
  }

  // Size field graded away from Omega.
  auto outside_distance = [&](const Point &p)
  { return omega.Contains(p) ? 0.0 : omega.BoundaryDistance(p); };
  auto size_at = [&](const Point &p)
  { return std::min(h_far, h + options.grading * outside_distance(p)); };

  // Truncation circle.
  double s_circle = h_far;
  for (int k = 0; k < 720; ++k)
  {
    const double t = 2.0 * std::numbers::pi * k / 720.0;
    s_circle = std::min(s_circle, size_at(Point(r * std::cos(t), r * std::sin(t))));
  }
  s_circle = std::min(s_circle, s_circle * std::sqrt(r));
  const int n_circle = std::max(24, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / s_circle)));
  const int circle0 = static_cast<int>(pslg.points.size());
  for (int k = 0; k < n_circle; ++k)
  {
    const double t = 2.0 * std::numbers::pi * k / n_circle;
    pslg.points.emplace_back(r * std::cos(t), r * std::sin(t));
    pslg_gid.push_back(-1);
  }
  for (int k = 0; k < n_circle; ++k)
  {
    pslg.segments.push_back({circle0 + k, circle0 + (k + 1) % n_circle});
    pslg_tags.push_back(BoundaryTag::kTruncationCircle);
  }

  auto in_lattice = [&](const Point &p)
  { return tiled && lattice.Has(lattice.CellOf(p)); };
  mesher::Options opt;
  opt.size = size_at;
  opt.admit = [&](const Point &p) { return p.norm() < r && !in_lattice(p); };
  opt.classify = [&](const Point &c)
  {
    if (c.norm() >= r || in_lattice(c))
    {
      return -1;
    }
    return omega.Contains(c) ? static_cast<int>(RegionTag::kMatrix)
                             : static_cast<int>(RegionTag::kExterior);
  };
  opt.min_size = h;
  opt.max_size = h_far;
  const auto res = mesher::Triangulate(pslg, opt);

  std::vector<int> to_global(res.points.size(), -1);
  for (std::size_t i = 0; i < res.points.size(); ++i)
  {
    if (static_cast<int>(i) < res.num_pslg_points && pslg_gid[i] >= 0)
    {
      to_global[i] = pslg_gid[i];
      continue;
    }
    to_global[i] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(res.points[i]);
    mesh.cell_vertex.push_back(-1);
    mesh.cell_slot.push_back(-1);
  }
  for (std::size_t t = 0; t < res.triangles.size(); ++t)
  {
    const auto &tri = res.triangles[t];
    mesh.triangles.push_back({to_global[tri[0]], to_global[tri[1]], to_global[tri[2]]});
    mesh.regions.push_back(static_cast<RegionTag>(res.regions[t]));
    mesh.triangle_cell.push_back(-1);
  }
  for (std::size_t s = 0; s < pslg.segments.size(); ++s)
  {
    mesh.edges.push_back({to_global[pslg.segments[s][0]], to_global[pslg.segments[s][1]]});
    mesh.edge_tags.push_back(pslg_tags[s]);
  }
  mesh.Canonicalize();
  mesh.Validate();
  return mesh;
}

Mesh MeshScene(const MacroDomain &omega, const Lattice &lattice, const InclusionShape &shape,
               double r, double h)
{
  SceneMeshOptions opt;
  opt.h = h;
  Mesh cell;
  if (!lattice.empty())
  {
    cell = MeshUnitCell(shape, h / lattice.epsilon());
  }
  return MeshScene(omega, lattice, cell, shape, r, opt);
}

}  // namespace subwave
