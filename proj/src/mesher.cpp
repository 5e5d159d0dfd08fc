// SPDX-License-Identifier: Apache-2.0

#include "subwave/mesher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "subwave/mesh.hpp"

namespace subwave::mesher
{

namespace
{

double Orient(const Point &a, const Point &b, const Point &c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies inside the circumcircle of the counter-clockwise triangle
// abc. Scaled by the squared edge lengths so that the tolerance is relative.
double InCircle(const Point &a, const Point &b, const Point &c, const Point &d)
{
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  const double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                     ad * (bdx * cdy - bdy * cdx);
  const double scale = std::sqrt(ad * bd * cd) + 1e-300;
  return det / scale;
}

std::uint64_t EdgeKey(int a, int b)
{
  if (a > b)
  {
    std::swap(a, b);
  }
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Proper crossing of open segments ab and cd.
bool CrossProperly(const Point &a, const Point &b, const Point &c, const Point &d)
{
  const double d1 = Orient(a, b, c), d2 = Orient(a, b, d);
  const double d3 = Orient(c, d, a), d4 = Orient(c, d, b);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::uint64_t HilbertIndex(std::uint32_t x, std::uint32_t y)
{
  constexpr std::uint32_t n = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2)
  {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0)
    {
      if (rx == 1)
      {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

// Sparse uniform bucket grid for proximity queries.
class BucketGrid
{
public:
  explicit BucketGrid(double cell) : cell_(cell) {}

  std::int64_t Key(std::int64_t i, std::int64_t j) const { return (i << 32) ^ (j & 0xffffffff); }
  std::int64_t Coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  void Insert(const Point &lo, const Point &hi, int id)
  {
    for (auto i = Coord(lo.x()); i <= Coord(hi.x()); ++i)
    {
      for (auto j = Coord(lo.y()); j <= Coord(hi.y()); ++j)
      {
        buckets_[Key(i, j)].push_back(id);
      }
    }
  }

  template <typename F>
  void Visit(const Point &p, double radius, F &&f) const
  {
    for (auto i = Coord(p.x() - radius); i <= Coord(p.x() + radius); ++i)
    {
      for (auto j = Coord(p.y() - radius); j <= Coord(p.y() + radius); ++j)
      {
        const auto it = buckets_.find(Key(i, j));
        if (it == buckets_.end())
        {
          continue;
        }
        for (int id : it->second)
        {
          if (!f(id))
          {
            return;
          }
        }
      }
    }
  }

private:
  double cell_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

class Triangulation
{
public:
  struct Tri
  {
    std::array<int, 3> v;
    std::array<int, 3> n;  // n[i] is across the edge opposite v[i]
  };

  std::vector<Point> pts;
  std::vector<Tri> tris;
  std::vector<int> vtri;
  std::unordered_set<std::uint64_t> constrained;
  int super_begin = 0;
  double scale = 1.0;

  Triangulation(std::vector<Point> points, const Point &lo, const Point &hi)
    : pts(std::move(points))
  {
    const Point c = 0.5 * (lo + hi);
    scale = std::max((hi - lo).maxCoeff(), 1e-300);
    const double big = 20.0 * scale;
    super_begin = static_cast<int>(pts.size());
    for (int k = 0; k < 3; ++k)
    {
      const double t = 0.5 * std::numbers::pi + 2.0 * std::numbers::pi * k / 3.0;
      pts.emplace_back(c.x() + big * std::cos(t), c.y() + big * std::sin(t));
    }
    vtri.assign(pts.size(), -1);
    tris.push_back({{super_begin, super_begin + 1, super_begin + 2}, {-1, -1, -1}});
    for (int k = 0; k < 3; ++k)
    {
      vtri[super_begin + k] = 0;
    }
  }

  bool IsSuper(int v) const { return v >= super_begin && v < super_begin + 3; }

  int AddPoint(const Point &p)
  {
    pts.push_back(p);
    vtri.push_back(-1);
    return static_cast<int>(pts.size()) - 1;
  }

  static int Index(const Tri &t, int v)
  {
    for (int i = 0; i < 3; ++i)
    {
      if (t.v[i] == v)
      {
        return i;
      }
    }
    return -1;
  }

  static int NeighborIndex(const Tri &t, int nb)
  {
    for (int i = 0; i < 3; ++i)
    {
      if (t.n[i] == nb)
      {
        return i;
      }
    }
    return -1;
  }

  void Relink(int tri, int old_nb, int new_nb)
  {
    if (tri < 0)
    {
      return;
    }
    const int i = NeighborIndex(tris[tri], old_nb);
    if (i < 0)
    {
      throw MeshError("triangulation adjacency is inconsistent");
    }
    tris[tri].n[i] = new_nb;
  }

  void Touch(int t)
  {
    for (int v : tris[t].v)
    {
      vtri[v] = t;
    }
  }

  bool IsConstrained(int a, int b) const { return constrained.count(EdgeKey(a, b)) > 0; }

  // Flip the edge opposite v[i] of triangle t. Afterwards the former v[i]
  // sits at index 0 of both t and the former neighbour.
  void Flip(int t, int i)
  {
    const Tri T = tris[t];
    const int u = T.n[i];
    const Tri U = tris[u];
    const int j = NeighborIndex(U, t);
    const int a = T.v[i], b = T.v[(i + 1) % 3], c = T.v[(i + 2) % 3];
    const int d = U.v[j];
    const int nb = T.n[(i + 1) % 3], nc = T.n[(i + 2) % 3];
    const int uc = U.n[(j + 1) % 3], ub = U.n[(j + 2) % 3];
    tris[t] = {{a, b, d}, {uc, u, nc}};
    tris[u] = {{a, d, c}, {ub, nb, t}};
    Relink(uc, u, t);
    Relink(nb, t, u);
    Touch(t);
    Touch(u);
  }

  void Legalize(std::vector<std::pair<int, int>> &stack)
  {
    while (!stack.empty())
    {
      const auto [t, i] = stack.back();
      stack.pop_back();
      const Tri &T = tris[t];
      const int u = T.n[i];
      if (u < 0)
      {
        continue;
      }
      const int b = T.v[(i + 1) % 3], c = T.v[(i + 2) % 3];
      if (IsConstrained(b, c))
      {
        continue;
      }
      const int d = tris[u].v[NeighborIndex(tris[u], t)];
      if (InCircle(pts[T.v[0]], pts[T.v[1]], pts[T.v[2]], pts[d]) > 1e-12)
      {
        Flip(t, i);
        stack.emplace_back(t, 0);
        stack.emplace_back(u, 0);
      }
    }
  }

  // Orientation of p against the directed edge ab, evaluated in a fixed vertex
  // order so both triangles sharing the edge see consistent signs.
  double EdgeSide(int a, int b, const Point &p) const
  {
    return a < b ? Orient(pts[a], pts[b], p) : -Orient(pts[b], pts[a], p);
  }

  int Locate(const Point &p, int start, std::uint64_t &rng) const
  {
    int t = start;
    const std::size_t limit = 8 * tris.size() + 64;
    for (std::size_t step = 0; step < limit; ++step)
    {
      rng = rng * 6364136223846793005ULL + 1442695040888963407ULL;
      const int r = static_cast<int>((rng >> 33) % 3);
      bool moved = false;
      for (int k = 0; k < 3; ++k)
      {
        const int i = (r + k) % 3;
        const Tri &T = tris[t];
        if (T.n[i] >= 0 && EdgeSide(T.v[(i + 1) % 3], T.v[(i + 2) % 3], p) < 0.0)
        {
          t = T.n[i];
          moved = true;
          break;
        }
      }
      if (!moved)
      {
        return t;
      }
    }
    throw MeshError("point location did not terminate");
  }

  // Inserts vertex v (already in pts). Returns an existing vertex id when v
  // coincides with one, otherwise v.
  int Insert(int v, int &hint, std::uint64_t &rng)
  {
    const Point &p = pts[v];
    const int t = Locate(p, hint, rng);
    const Tri T = tris[t];
    const double tol = 1e-12 * scale;
    for (int k = 0; k < 3; ++k)
    {
      if ((pts[T.v[k]] - p).norm() <= tol)
      {
        return T.v[k];
      }
    }
    int on_edge = -1;
    for (int i = 0; i < 3; ++i)
    {
      const Point &a = pts[T.v[(i + 1) % 3]];
      const Point &b = pts[T.v[(i + 2) % 3]];
      const double len = (b - a).norm();
      if (std::abs(Orient(a, b, p)) <= 1e-13 * len * len)
      {
        on_edge = i;
      }
    }
    std::vector<std::pair<int, int>> stack;
    if (on_edge < 0)
    {
      const int a = T.v[0], b = T.v[1], c = T.v[2];
      const int na = T.n[0], nb = T.n[1], nc = T.n[2];
      const int t1 = static_cast<int>(tris.size());
      const int t2 = t1 + 1;
      tris[t] = {{v, b, c}, {na, t1, t2}};
      tris.push_back({{a, v, c}, {t, nb, t2}});
      tris.push_back({{a, b, v}, {t, t1, nc}});
      Relink(nb, t, t1);
      Relink(nc, t, t2);
      Touch(t);
      Touch(t1);
      Touch(t2);
      stack = {{t, 0}, {t1, 1}, {t2, 2}};
    }
    else
    {
      const int i = on_edge;
      const int x = T.v[i], y = T.v[(i + 1) % 3], z = T.v[(i + 2) % 3];
      const int u = T.n[i];
      if (u < 0)
      {
        throw MeshError("point lies on the outer hull");
      }
      const Tri U = tris[u];
      const int j = NeighborIndex(U, t);
      const int w = U.v[j];
      const int ny = T.n[(i + 1) % 3], nz = T.n[(i + 2) % 3];
      const int unz = U.n[(j + 1) % 3], uny = U.n[(j + 2) % 3];
      const int B = static_cast<int>(tris.size());
      const int D = B + 1;
      tris[t] = {{x, y, v}, {D, B, nz}};
      tris.push_back({{x, v, z}, {u, ny, t}});
      tris[u] = {{w, z, v}, {B, D, uny}};
      tris.push_back({{w, v, y}, {t, unz, u}});
      Relink(ny, t, B);
      Relink(unz, u, D);
      Touch(t);
      Touch(B);
      Touch(u);
      Touch(D);
      if (IsConstrained(y, z))
      {
        constrained.erase(EdgeKey(y, z));
        constrained.insert(EdgeKey(y, v));
        constrained.insert(EdgeKey(v, z));
      }
      stack = {{t, 2}, {B, 1}, {u, 2}, {D, 1}};
    }
    Legalize(stack);
    hint = vtri[v];
    return v;
  }

  // Triangles around vertex a, counter-clockwise.
  std::vector<int> Star(int a) const
  {
    std::vector<int> out;
    const int start = vtri[a];
    int t = start;
    do
    {
      out.push_back(t);
      const int k = Index(tris[t], a);
      t = tris[t].n[(k + 1) % 3];
    } while (t >= 0 && t != start && out.size() < 4096);
    if (t < 0)
    {
      // Open fan: walk the other way from the start.
      t = start;
      while (true)
      {
        const int k = Index(tris[t], a);
        const int prev = tris[t].n[(k + 2) % 3];
        if (prev < 0)
        {
          break;
        }
        t = prev;
        out.push_back(t);
      }
    }
    return out;
  }

  bool FindEdge(int a, int b, int &t_out, int &i_out) const
  {
    for (int t : Star(a))
    {
      const int k = Index(tris[t], b);
      if (k >= 0)
      {
        const int ka = Index(tris[t], a);
        t_out = t;
        i_out = 3 - k - ka;
        return true;
      }
    }
    return false;
  }

  void RecoverSegment(int a, int b)
  {
    int t = -1, i = -1;
    if (FindEdge(a, b, t, i))
    {
      constrained.insert(EdgeKey(a, b));
      return;
    }
    const Point &pa = pts[a], &pb = pts[b];
    auto collinear_error = [&](int v)
    {
      throw MeshError("vertex (" + std::to_string(pts[v].x()) + ", " + std::to_string(pts[v].y()) +
                      ") lies on a constrained segment");
    };
    // First crossed edge (x right of ab, y left).
    int x = -1, y = -1, cur = -1;
    for (int s : Star(a))
    {
      const int k = Index(tris[s], a);
      const int p = tris[s].v[(k + 1) % 3], q = tris[s].v[(k + 2) % 3];
      const double op = Orient(pa, pb, pts[p]), oq = Orient(pa, pb, pts[q]);
      if (op < 0.0 && oq > 0.0)
      {
        x = p;
        y = q;
        cur = s;
        break;
      }
      if (op == 0.0 && (pts[p] - pa).dot(pb - pa) > 0.0)
      {
        collinear_error(p);
      }
    }
    if (cur < 0)
    {
      throw MeshError("could not start segment recovery");
    }
    std::deque<std::pair<int, int>> crossing;
    crossing.emplace_back(x, y);
    while (true)
    {
      const Tri &T = tris[cur];
      const int k = 3 - Index(T, x) - Index(T, y);
      const int u = T.n[k];
      if (u < 0)
      {
        throw MeshError("segment recovery left the triangulation");
      }
      const int w = tris[u].v[NeighborIndex(tris[u], cur)];
      if (w == b)
      {
        break;
      }
      const double o = Orient(pa, pb, pts[w]);
      if (o == 0.0)
      {
        collinear_error(w);
      }
      if (o < 0.0)
      {
        x = w;
      }
      else
      {
        y = w;
      }
      crossing.emplace_back(x, y);
      cur = u;
    }
    std::size_t guard = 0;
    const std::size_t guard_limit = 100 * (crossing.size() + 10) * (crossing.size() + 10);
    while (!crossing.empty())
    {
      if (++guard > guard_limit)
      {
        throw MeshError("segment recovery did not converge");
      }
      const auto [p, q] = crossing.front();
      crossing.pop_front();
      int s = -1, ii = -1;
      if (!FindEdge(p, q, s, ii))
      {
        continue;
      }
      const int u = tris[s].n[ii];
      const int opp_s = tris[s].v[ii];
      const int opp_u = tris[u].v[NeighborIndex(tris[u], s)];
      if (CrossProperly(pts[opp_s], pts[opp_u], pts[p], pts[q]))
      {
        Flip(s, ii);
        if (opp_s != a && opp_s != b && opp_u != a && opp_u != b &&
            CrossProperly(pa, pb, pts[opp_s], pts[opp_u]))
        {
          crossing.emplace_back(opp_s, opp_u);
        }
      }
      else
      {
        crossing.emplace_back(p, q);
      }
    }
    if (!FindEdge(a, b, t, i))
    {
      throw MeshError("segment recovery failed");
    }
    constrained.insert(EdgeKey(a, b));
  }

  // Lawson flips until every unconstrained edge is locally Delaunay.
  void RestoreDelaunay()
  {
    for (int sweep = 0; sweep < 200; ++sweep)
    {
      bool changed = false;
      for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      {
        for (int i = 0; i < 3; ++i)
        {
          const Tri &T = tris[t];
          const int u = T.n[i];
          if (u < 0 || u < t)
          {
            continue;
          }
          const int b = T.v[(i + 1) % 3], c = T.v[(i + 2) % 3];
          if (IsConstrained(b, c))
          {
            continue;
          }
          const int d = tris[u].v[NeighborIndex(tris[u], t)];
          if (InCircle(pts[T.v[0]], pts[T.v[1]], pts[T.v[2]], pts[d]) > 1e-10 &&
              CrossProperly(pts[T.v[i]], pts[d], pts[b], pts[c]))
          {
            Flip(t, i);
            changed = true;
          }
        }
      }
      if (!changed)
      {
        return;
      }
    }
  }

  double Area(int t) const
  {
    const auto &v = tris[t].v;
    return 0.5 * Orient(pts[v[0]], pts[v[1]], pts[v[2]]);
  }
};

std::vector<Point> GenerateInteriorPoints(const Pslg &pslg, const Options &opt, const Point &lo,
                                          const Point &hi)
{
  const double hmin = opt.min_size;
  const double hmax = std::max(opt.max_size, hmin);
  int levels = 0;
  while (hmin * std::pow(2.0, levels + 1) <= hmax * (1.0 + 1e-12))
  {
    ++levels;
  }
  const double grid_cell = 2.0 * hmin;
  BucketGrid seg_grid(grid_cell), pt_grid(grid_cell);
  for (std::size_t s = 0; s < pslg.segments.size(); ++s)
  {
    const Point &a = pslg.points[pslg.segments[s][0]];
    const Point &b = pslg.points[pslg.segments[s][1]];
    seg_grid.Insert(a.cwiseMin(b), a.cwiseMax(b), static_cast<int>(s));
  }
  std::vector<Point> accepted = pslg.points;
  for (std::size_t i = 0; i < accepted.size(); ++i)
  {
    pt_grid.Insert(accepted[i], accepted[i], static_cast<int>(i));
  }
  const std::size_t first_new = accepted.size();
  const double row = std::sqrt(3.0) / 2.0;
  for (int level = levels; level >= 0; --level)
  {
    const double s = hmin * std::pow(2.0, level);
    const int nrows = static_cast<int>(std::ceil((hi.y() - lo.y()) / (s * row))) + 1;
    const int ncols = static_cast<int>(std::ceil((hi.x() - lo.x()) / s)) + 1;
    for (int j = 0; j < nrows; ++j)
    {
      const double y = lo.y() + (j + 0.5) * s * row;
      const double off = (j % 2 == 0) ? 0.25 * s : 0.75 * s;
      for (int i = 0; i < ncols; ++i)
      {
        const Point p(lo.x() + i * s + off, y);
        if (opt.symmetry == 4)
        {
          // Fundamental quarter: x' > 0, y' >= 0 about the centre.
          const Point d = p - opt.symmetry_center;
          if (!(d.x() > 0.0 && d.y() >= 0.0))
          {
            continue;
          }
        }
        const double hp = opt.size(p);
        const bool in_band = (level == levels) ? hp >= s * (1.0 - 1e-9)
                                               : (hp >= s * (1.0 - 1e-9) && hp < 2.0 * s * (1.0 - 1e-9));
        if (!in_band || !opt.admit(p))
        {
          continue;
        }
        bool ok = true;
        const double seg_r = 0.6 * hp;
        seg_grid.Visit(p, seg_r,
                       [&](int sid)
                       {
                         const Point &a = pslg.points[pslg.segments[sid][0]];
                         const Point &b = pslg.points[pslg.segments[sid][1]];
                         if (DistanceToSegment(p, a, b) < seg_r)
                         {
                           ok = false;
                         }
                         return ok;
                       });
        if (!ok)
        {
          continue;
        }
        const double pt_r = 0.75 * hp;
        if (opt.symmetry == 4 && std::sqrt(2.0) * (p - opt.symmetry_center).norm() < pt_r)
        {
          continue;
        }
        pt_grid.Visit(p, pt_r,
                      [&](int pid)
                      {
                        if ((accepted[pid] - p).norm() < pt_r)
                        {
                          ok = false;
                        }
                        return ok;
                      });
        if (!ok)
        {
          continue;
        }
        if (opt.symmetry == 4)
        {
          Point d = p - opt.symmetry_center;
          for (int k = 0; k < 4; ++k)
          {
            const Point q = opt.symmetry_center + d;
            pt_grid.Insert(q, q, static_cast<int>(accepted.size()));
            accepted.push_back(q);
            d = Point(-d.y(), d.x());
          }
        }
        else
        {
          pt_grid.Insert(p, p, static_cast<int>(accepted.size()));
          accepted.push_back(p);
        }
      }
    }
  }
  return {accepted.begin() + static_cast<std::ptrdiff_t>(first_new), accepted.end()};
}

}  // namespace

double MinAngleDegrees(const std::vector<Point> &points,
                       const std::vector<std::array<int, 3>> &triangles)
{
  double best = 180.0;
  for (const auto &t : triangles)
  {
    for (int i = 0; i < 3; ++i)
    {
      const Point e1 = points[t[(i + 1) % 3]] - points[t[i]];
      const Point e2 = points[t[(i + 2) % 3]] - points[t[i]];
      const double c = e1.dot(e2) / (e1.norm() * e2.norm());
      best = std::min(best, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

Result Triangulate(const Pslg &pslg, const Options &opt)
{
  if (pslg.points.size() < 3)
  {
    throw MeshError("meshing failure: fewer than three boundary points");
  }
  if (!(opt.min_size > 0.0))
  {
    throw MeshError("meshing failure: non-positive minimum size");
  }
  Point lo = pslg.points.front(), hi = pslg.points.front();
  for (const auto &p : pslg.points)
  {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const auto interior = GenerateInteriorPoints(pslg, opt, lo, hi);
  const int nb = static_cast<int>(pslg.points.size());

  std::vector<Point> all = pslg.points;
  all.insert(all.end(), interior.begin(), interior.end());
  Triangulation tri(all, lo, hi);

  // Spatially coherent insertion order: boundary points first, then interior.
  const double span = std::max((hi - lo).maxCoeff(), 1e-300);
  auto hilbert_order = [&](int begin, int end)
  {
    std::vector<std::pair<std::uint64_t, int>> keys;
    for (int v = begin; v < end; ++v)
    {
      const Point q = (all[v] - lo) / span;
      const auto qx = static_cast<std::uint32_t>(std::clamp(q.x(), 0.0, 1.0) * 65535.0);
      const auto qy = static_cast<std::uint32_t>(std::clamp(q.y(), 0.0, 1.0) * 65535.0);
      keys.emplace_back(HilbertIndex(qx, qy), v);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<int> out;
    for (const auto &k : keys)
    {
      out.push_back(k.second);
    }
    return out;
  };
  std::uint64_t rng = 0x9e3779b97f4a7c15ULL;
  int hint = 0;
  for (int v : hilbert_order(0, nb))
  {
    if (tri.Insert(v, hint, rng) != v)
    {
      throw MeshError("meshing failure: duplicate boundary point (" + std::to_string(all[v].x()) +
                      ", " + std::to_string(all[v].y()) + ")");
    }
  }
  for (const auto &s : pslg.segments)
  {
    tri.RecoverSegment(s[0], s[1]);
  }
  tri.RestoreDelaunay();
  std::vector<char> inserted(all.size(), 1);
  for (int v : hilbert_order(nb, static_cast<int>(all.size())))
  {
    if (tri.Insert(v, hint, rng) != v)
    {
      inserted[v] = 0;
    }
  }
  for (const auto &s : pslg.segments)
  {
    if (!tri.IsConstrained(s[0], s[1]))
    {
      // A constrained edge was split by a generated point; this means the
      // point filter failed to keep clear of segments.
      throw MeshError("meshing failure: generated point split a boundary segment");
    }
  }

  // Jacobi-style Laplacian smoothing of generated points (keeps any symmetry
  // of the point set). A pass that inverts a triangle is rolled back.
  for (int pass = 0; pass < opt.smoothing_passes; ++pass)
  {
    const std::vector<Point> before = tri.pts;
    std::vector<Point> target = tri.pts;
    for (int v = nb; v < static_cast<int>(all.size()); ++v)
    {
      if (!inserted[v])
      {
        continue;
      }
      const auto star = tri.Star(v);
      bool touches_super = star.empty();
      Point avg = Point::Zero();
      for (int t : star)
      {
        const int k = Triangulation::Index(tri.tris[t], v);
        const int w = tri.tris[t].v[(k + 1) % 3];
        touches_super = touches_super || tri.IsSuper(w) || tri.IsSuper(tri.tris[t].v[(k + 2) % 3]);
        avg += tri.pts[w];
      }
      if (!touches_super)
      {
        target[v] = 0.5 * (tri.pts[v] + avg / static_cast<double>(star.size()));
      }
    }
    tri.pts = target;
    bool inverted = false;
    for (int t = 0; t < static_cast<int>(tri.tris.size()) && !inverted; ++t)
    {
      inverted = !(tri.Area(t) > 0.0);
    }
    if (inverted)
    {
      tri.pts = before;
      break;
    }
    tri.RestoreDelaunay();
  }

  // Regions: flood fill across unconstrained edges, majority vote per piece.
  const int nt = static_cast<int>(tri.tris.size());
  std::vector<int> piece(nt, -1);
  int npieces = 0;
  for (int t = 0; t < nt; ++t)
  {
    if (piece[t] >= 0)
    {
      continue;
    }
    std::vector<int> stack = {t};
    piece[t] = npieces;
    while (!stack.empty())
    {
      const int s = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i)
      {
        const int u = tri.tris[s].n[i];
        if (u < 0 || piece[u] >= 0)
        {
          continue;
        }
        if (tri.IsConstrained(tri.tris[s].v[(i + 1) % 3], tri.tris[s].v[(i + 2) % 3]))
        {
          continue;
        }
        piece[u] = npieces;
        stack.push_back(u);
      }
    }
    ++npieces;
  }
  std::vector<std::map<int, int>> votes(npieces);
  for (int t = 0; t < nt; ++t)
  {
    const auto &v = tri.tris[t].v;
    if (tri.IsSuper(v[0]) || tri.IsSuper(v[1]) || tri.IsSuper(v[2]))
    {
      votes[piece[t]][-1] += 1;
      continue;
    }
    const Point c = (tri.pts[v[0]] + tri.pts[v[1]] + tri.pts[v[2]]) / 3.0;
    votes[piece[t]][opt.classify(c)] += 1;
  }
  std::vector<int> code(npieces, -1);
  for (int p = 0; p < npieces; ++p)
  {
    int best = -1;
    for (const auto &[c, n] : votes[p])
    {
      if (best < 0 || n > best)
      {
        best = n;
        code[p] = c;
      }
    }
    // Any piece touching the bounding triangle is outside the PSLG.
    if (votes[p].count(-1) && votes[p].at(-1) > 0)
    {
      code[p] = -1;
    }
  }

  Result res;
  res.num_pslg_points = nb;
  std::vector<int> remap(all.size(), -1);
  for (int v = 0; v < nb; ++v)
  {
    remap[v] = v;
  }
  res.points.assign(tri.pts.begin(), tri.pts.begin() + nb);
  for (int t = 0; t < nt; ++t)
  {
    if (code[piece[t]] < 0)
    {
      continue;
    }
    std::array<int, 3> out{};
    for (int k = 0; k < 3; ++k)
    {
      const int v = tri.tris[t].v[k];
      if (remap[v] < 0)
      {
        remap[v] = static_cast<int>(res.points.size());
        res.points.push_back(tri.pts[v]);
      }
      out[k] = remap[v];
    }
    if (!(tri.Area(t) > 0.0))
    {
      throw MeshError("meshing failure: degenerate triangle near (" +
                      std::to_string(tri.pts[tri.tris[t].v[0]].x()) + ", " +
                      std::to_string(tri.pts[tri.tris[t].v[0]].y()) + ")");
    }
    res.triangles.push_back(out);
    res.regions.push_back(code[piece[t]]);
  }
  return res;
}

}  // namespace subwave::mesher
