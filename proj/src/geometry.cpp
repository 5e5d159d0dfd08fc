// SPDX-License-Identifier: Apache-2.0

#include "subwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace subwave
{

namespace
{

constexpr double kContainTol = 1e-12;
constexpr double kDegenerateRadius = 1e-9;

double Cross(const Point &a, const Point &b) { return a.x() * b.y() - a.y() * b.x(); }

double Orient(const Point &a, const Point &b, const Point &c) { return Cross(b - a, c - a); }

bool OnSegment(const Point &a, const Point &b, const Point &p)
{
  return std::min(a.x(), b.x()) - kContainTol <= p.x() &&
         p.x() <= std::max(a.x(), b.x()) + kContainTol &&
         std::min(a.y(), b.y()) - kContainTol <= p.y() &&
         p.y() <= std::max(a.y(), b.y()) + kContainTol;
}

bool SegmentsIntersect(const Point &a, const Point &b, const Point &c, const Point &d)
{
  const double d1 = Orient(c, d, a), d2 = Orient(c, d, b);
  const double d3 = Orient(a, b, c), d4 = Orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
  {
    return true;
  }
  return (d1 == 0 && OnSegment(c, d, a)) || (d2 == 0 && OnSegment(c, d, b)) ||
         (d3 == 0 && OnSegment(a, b, c)) || (d4 == 0 && OnSegment(a, b, d));
}

// Straight segment a-b split into pieces of length at most h, endpoint b
// excluded.
void AppendSegment(const Point &a, const Point &b, double h, std::vector<Point> &out)
{
  const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h - 1e-9)));
  for (int i = 0; i < n; ++i)
  {
    const double t = static_cast<double>(i) / n;
    out.push_back(a + t * (b - a));
  }
}

}  // namespace

double PolygonSignedArea(const std::vector<Point> &poly)
{
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
  {
    a += Cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

bool PolygonIsSimple(const std::vector<Point> &poly)
{
  const std::size_t n = poly.size();
  if (n < 3)
  {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    if ((poly[i] - poly[(i + 1) % n]).norm() == 0.0)
    {
      return false;
    }
    for (std::size_t j = i + 1; j < n; ++j)
    {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent)
      {
        continue;
      }
      if (SegmentsIntersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
      {
        return false;
      }
    }
  }
  return std::abs(PolygonSignedArea(poly)) > 0.0;
}

bool PointInPolygon(const std::vector<Point> &poly, const Point &p)
{
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
  {
    const Point &a = poly[i], &b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()))
    {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x)
      {
        inside = !inside;
      }
    }
  }
  return inside;
}

double DistanceToSegment(const Point &p, const Point &a, const Point &b)
{
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = (len2 > 0.0) ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double DistanceToPolyline(const std::vector<Point> &closed_poly, const Point &p)
{
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < closed_poly.size(); ++i)
  {
    d = std::min(d, DistanceToSegment(p, closed_poly[i], closed_poly[(i + 1) % closed_poly.size()]));
  }
  return d;
}

// ---------------------------------------------------------------------------
// InclusionShape

InclusionShape InclusionShape::None() { return InclusionShape(); }

InclusionShape InclusionShape::Disk(const Point &center, double radius)
{
  if (!(radius >= kDegenerateRadius) || !center.allFinite())
  {
    throw GeometryError("degenerate inclusion: disk radius " + std::to_string(radius) +
                        " is below 1e-9");
  }
  InclusionShape s;
  s.kind_ = Kind::kDisk;
  s.center_ = center;
  s.radius_ = radius;
  if (s.WallDistance() <= 0.0)
  {
    throw GeometryError("inclusion touches the cell boundary: " + s.Describe());
  }
  return s;
}

InclusionShape InclusionShape::Rectangle(const Point &lo, const Point &hi)
{
  if (!(hi.x() - lo.x() >= kDegenerateRadius) || !(hi.y() - lo.y() >= kDegenerateRadius))
  {
    throw GeometryError("degenerate inclusion: rectangle has non-positive extent");
  }
  InclusionShape s;
  s.kind_ = Kind::kRectangle;
  s.lo_ = lo;
  s.hi_ = hi;
  if (s.WallDistance() <= 0.0)
  {
    throw GeometryError("inclusion touches the cell boundary: " + s.Describe());
  }
  return s;
}

InclusionShape InclusionShape::Polygon(std::vector<Point> vertices)
{
  if (!PolygonIsSimple(vertices))
  {
    throw GeometryError("degenerate inclusion: polygon is not a simple closed curve");
  }
  if (PolygonSignedArea(vertices) < 0.0)
  {
    std::reverse(vertices.begin(), vertices.end());
  }
  if (PolygonSignedArea(vertices) < kDegenerateRadius * kDegenerateRadius)
  {
    throw GeometryError("degenerate inclusion: polygon area below tolerance");
  }
  InclusionShape s;
  s.kind_ = Kind::kPolygon;
  s.vertices_ = std::move(vertices);
  if (s.WallDistance() <= 0.0)
  {
    throw GeometryError("inclusion touches the cell boundary: " + s.Describe());
  }
  return s;
}

bool InclusionShape::Contains(const Point &y) const
{
  switch (kind_)
  {
    case Kind::kNone:
      return false;
    case Kind::kDisk:
      return (y - center_).squaredNorm() < radius_ * radius_;
    case Kind::kRectangle:
      return lo_.x() < y.x() && y.x() < hi_.x() && lo_.y() < y.y() && y.y() < hi_.y();
    case Kind::kPolygon:
      return PointInPolygon(vertices_, y) && DistanceToPolyline(vertices_, y) > 0.0;
  }
  return false;
}

double InclusionShape::Area() const
{
  switch (kind_)
  {
    case Kind::kNone:
      return 0.0;
    case Kind::kDisk:
      return std::numbers::pi * radius_ * radius_;
    case Kind::kRectangle:
      return (hi_.x() - lo_.x()) * (hi_.y() - lo_.y());
    case Kind::kPolygon:
      return PolygonSignedArea(vertices_);
  }
  return 0.0;
}

double InclusionShape::WallDistance() const
{
  auto wall = [](const Point &p)
  { return std::min({p.x(), p.y(), 1.0 - p.x(), 1.0 - p.y()}); };
  switch (kind_)
  {
    case Kind::kNone:
      return std::numeric_limits<double>::infinity();
    case Kind::kDisk:
      return wall(center_) - radius_;
    case Kind::kRectangle:
      return std::min(wall(lo_), wall(hi_));
    case Kind::kPolygon:
    {
      double d = std::numeric_limits<double>::infinity();
      for (const auto &v : vertices_)
      {
        d = std::min(d, wall(v));
      }
      return d;
    }
  }
  return 0.0;
}

std::vector<Point> InclusionShape::BoundaryPolygon(double h, int multiple_of) const
{
  std::vector<Point> out;
  switch (kind_)
  {
    case Kind::kNone:
      break;
    case Kind::kDisk:
    {
      // Chord error R (1 - cos(s / 2R)) <= h^2 / 8 requires s <= h sqrt(R).
      const double s = std::min(h, h * std::sqrt(radius_));
      int n = std::max(6, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius_ / s)));
      if (multiple_of > 1)
      {
        n = multiple_of * ((n + multiple_of - 1) / multiple_of);
      }
      out.reserve(n);
      for (int i = 0; i < n; ++i)
      {
        const double t = 2.0 * std::numbers::pi * i / n;
        out.emplace_back(center_.x() + radius_ * std::cos(t), center_.y() + radius_ * std::sin(t));
      }
      break;
    }
    case Kind::kRectangle:
    {
      const Point c1(hi_.x(), lo_.y()), c3(lo_.x(), hi_.y());
      AppendSegment(lo_, c1, h, out);
      AppendSegment(c1, hi_, h, out);
      AppendSegment(hi_, c3, h, out);
      AppendSegment(c3, lo_, h, out);
      break;
    }
    case Kind::kPolygon:
      for (std::size_t i = 0; i < vertices_.size(); ++i)
      {
        AppendSegment(vertices_[i], vertices_[(i + 1) % vertices_.size()], h, out);
      }
      break;
  }
  return out;
}

bool InclusionShape::QuarterTurnSymmetric() const
{
  switch (kind_)
  {
    case Kind::kNone:
      return true;
    case Kind::kDisk:
      return center_.x() == 0.5 && center_.y() == 0.5;
    case Kind::kRectangle:
      return lo_.x() == lo_.y() && hi_.x() == hi_.y() && lo_.x() + hi_.x() == 1.0;
    case Kind::kPolygon:
      return false;
  }
  return false;
}

double InclusionShape::BoundaryDistance(const Point &y) const
{
  switch (kind_)
  {
    case Kind::kNone:
      return std::numeric_limits<double>::infinity();
    case Kind::kDisk:
      return std::abs((y - center_).norm() - radius_);
    case Kind::kRectangle:
    {
      const std::vector<Point> poly = {lo_, Point(hi_.x(), lo_.y()), hi_, Point(lo_.x(), hi_.y())};
      return DistanceToPolyline(poly, y);
    }
    case Kind::kPolygon:
      return DistanceToPolyline(vertices_, y);
  }
  return 0.0;
}

std::string InclusionShape::Describe() const
{
  std::ostringstream os;
  os.precision(17);
  switch (kind_)
  {
    case Kind::kNone:
      os << "none";
      break;
    case Kind::kDisk:
      os << "disk center=(" << center_.x() << "," << center_.y() << ") radius=" << radius_;
      break;
    case Kind::kRectangle:
      os << "rectangle lo=(" << lo_.x() << "," << lo_.y() << ") hi=(" << hi_.x() << ","
         << hi_.y() << ")";
      break;
    case Kind::kPolygon:
      os << "polygon";
      for (const auto &v : vertices_)
      {
        os << " (" << v.x() << "," << v.y() << ")";
      }
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// MacroDomain

MacroDomain MacroDomain::Disk(double radius)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw GeometryError("macro domain: disk radius must be positive");
  }
  MacroDomain d;
  d.kind_ = Kind::kDisk;
  d.regularity_ = Regularity::kC11;
  d.radius_ = radius;
  return d;
}

MacroDomain MacroDomain::Rectangle(const Point &lo, const Point &hi)
{
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()))
  {
    throw GeometryError("macro domain: rectangle has non-positive extent");
  }
  MacroDomain d;
  d.kind_ = Kind::kRectangle;
  d.regularity_ = Regularity::kLipschitz;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

MacroDomain MacroDomain::Polygon(std::vector<Point> vertices)
{
  if (!PolygonIsSimple(vertices))
  {
    throw GeometryError("macro domain: polygon is not simple");
  }
  if (PolygonSignedArea(vertices) < 0.0)
  {
    std::reverse(vertices.begin(), vertices.end());
  }
  MacroDomain d;
  d.kind_ = Kind::kPolygon;
  d.regularity_ = Regularity::kLipschitz;
  d.vertices_ = std::move(vertices);
  return d;
}

bool MacroDomain::Contains(const Point &x) const
{
  switch (kind_)
  {
    case Kind::kDisk:
      return x.squaredNorm() < radius_ * radius_;
    case Kind::kRectangle:
      return lo_.x() < x.x() && x.x() < hi_.x() && lo_.y() < x.y() && x.y() < hi_.y();
    case Kind::kPolygon:
      return PointInPolygon(vertices_, x) && DistanceToPolyline(vertices_, x) > 0.0;
  }
  return false;
}

bool MacroDomain::ContainsClosed(const Point &x, double tol) const
{
  switch (kind_)
  {
    case Kind::kDisk:
      return x.norm() <= radius_ + tol;
    case Kind::kRectangle:
      return lo_.x() - tol <= x.x() && x.x() <= hi_.x() + tol && lo_.y() - tol <= x.y() &&
             x.y() <= hi_.y() + tol;
    case Kind::kPolygon:
      return PointInPolygon(vertices_, x) || DistanceToPolyline(vertices_, x) <= tol;
  }
  return false;
}

double MacroDomain::Area() const
{
  switch (kind_)
  {
    case Kind::kDisk:
      return std::numbers::pi * radius_ * radius_;
    case Kind::kRectangle:
      return (hi_.x() - lo_.x()) * (hi_.y() - lo_.y());
    case Kind::kPolygon:
      return PolygonSignedArea(vertices_);
  }
  return 0.0;
}

double MacroDomain::BoundaryDistance(const Point &x) const
{
  switch (kind_)
  {
    case Kind::kDisk:
      return std::abs(x.norm() - radius_);
    case Kind::kRectangle:
    {
      const double dx = std::max({lo_.x() - x.x(), 0.0, x.x() - hi_.x()});
      const double dy = std::max({lo_.y() - x.y(), 0.0, x.y() - hi_.y()});
      if (dx > 0.0 || dy > 0.0)
      {
        return std::hypot(dx, dy);
      }
      return std::min({x.x() - lo_.x(), hi_.x() - x.x(), x.y() - lo_.y(), hi_.y() - x.y()});
    }
    case Kind::kPolygon:
      return DistanceToPolyline(vertices_, x);
  }
  return 0.0;
}

double MacroDomain::Circumradius() const
{
  if (kind_ == Kind::kDisk)
  {
    return radius_;
  }
  double r = 0.0;
  for (const auto &c : Corners())
  {
    r = std::max(r, c.norm());
  }
  return r;
}

std::array<Point, 2> MacroDomain::BoundingBox() const
{
  switch (kind_)
  {
    case Kind::kDisk:
      return {Point(-radius_, -radius_), Point(radius_, radius_)};
    case Kind::kRectangle:
      return {lo_, hi_};
    case Kind::kPolygon:
    {
      Point lo = vertices_.front(), hi = vertices_.front();
      for (const auto &v : vertices_)
      {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      return {lo, hi};
    }
  }
  return {Point::Zero(), Point::Zero()};
}

std::vector<Point> MacroDomain::Corners() const
{
  switch (kind_)
  {
    case Kind::kDisk:
      return {};
    case Kind::kRectangle:
      return {lo_, Point(hi_.x(), lo_.y()), hi_, Point(lo_.x(), hi_.y())};
    case Kind::kPolygon:
      return vertices_;
  }
  return {};
}

std::string MacroDomain::Describe() const
{
  std::ostringstream os;
  os.precision(17);
  switch (kind_)
  {
    case Kind::kDisk:
      os << "disk radius=" << radius_;
      break;
    case Kind::kRectangle:
      os << "rectangle lo=(" << lo_.x() << "," << lo_.y() << ") hi=(" << hi_.x() << ","
         << hi_.y() << ")";
      break;
    case Kind::kPolygon:
      os << "polygon";
      for (const auto &v : vertices_)
      {
        os << " (" << v.x() << "," << v.y() << ")";
      }
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Lattice

Lattice::Lattice(double epsilon, std::vector<LatticeIndex> indices)
  : epsilon_(epsilon), indices_(std::move(indices))
{
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

int Lattice::Find(const LatticeIndex &m) const
{
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), m);
  if (it == indices_.end() || *it != m)
  {
    return -1;
  }
  return static_cast<int>(it - indices_.begin());
}

bool Lattice::Has(const LatticeIndex &m) const { return Find(m) >= 0; }

LatticeIndex Lattice::CellOf(const Point &x) const
{
  return {static_cast<int>(std::floor(x.x() / epsilon_)),
          static_cast<int>(std::floor(x.y() / epsilon_))};
}

namespace
{

// Closed cell [a, b] inside the closure of Omega. Corners and edge samples are
// tested against the closed domain; for polygons, no boundary edge may also
// enter the open cell.
bool CellInside(const MacroDomain &omega, const Point &a, const Point &b)
{
  const double tol = kContainTol * std::max(1.0, b.x() - a.x());
  constexpr int kEdgeSamples = 8;
  const Point corners[4] = {a, Point(b.x(), a.y()), b, Point(a.x(), b.y())};
  for (int e = 0; e < 4; ++e)
  {
    const Point &p = corners[e];
    const Point &q = corners[(e + 1) % 4];
    for (int s = 0; s < kEdgeSamples; ++s)
    {
      const Point x = p + (static_cast<double>(s) / kEdgeSamples) * (q - p);
      if (!omega.ContainsClosed(x, tol))
      {
        return false;
      }
    }
  }
  if (omega.kind() == MacroDomain::Kind::kPolygon)
  {
    const auto &v = omega.vertices();
    const Point lo = a.array() + tol, hi = b.array() - tol;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      const Point &p = v[i], &q = v[(i + 1) % v.size()];
      // A boundary vertex strictly inside the open cell, or an edge crossing it.
      auto inside = [&](const Point &x)
      { return lo.x() < x.x() && x.x() < hi.x() && lo.y() < x.y() && x.y() < hi.y(); };
      if (inside(p) || inside(0.5 * (p + q)))
      {
        return false;
      }
      const Point shrunk[4] = {lo, Point(hi.x(), lo.y()), hi, Point(lo.x(), hi.y())};
      for (int e = 0; e < 4; ++e)
      {
        if (SegmentsIntersect(p, q, shrunk[e], shrunk[(e + 1) % 4]))
        {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

Lattice BuildLattice(const MacroDomain &omega, double epsilon)
{
  if (!(epsilon > 0.0 && epsilon < 1.0))
  {
    throw GeometryError("lattice parameter must lie in (0, 1)");
  }
  const auto box = omega.BoundingBox();
  const int i0 = static_cast<int>(std::floor(box[0].x() / epsilon)) - 1;
  const int i1 = static_cast<int>(std::ceil(box[1].x() / epsilon)) + 1;
  const int j0 = static_cast<int>(std::floor(box[0].y() / epsilon)) - 1;
  const int j1 = static_cast<int>(std::ceil(box[1].y() / epsilon)) + 1;
  std::vector<LatticeIndex> idx;
  for (int i = i0; i <= i1; ++i)
  {
    for (int j = j0; j <= j1; ++j)
    {
      const Point a(epsilon * i, epsilon * j);
      const Point b(epsilon * (i + 1), epsilon * (j + 1));
      if (CellInside(omega, a, b))
      {
        idx.push_back({i, j});
      }
    }
  }
  return Lattice(epsilon, std::move(idx));
}

double CoefficientAt(const Point &x, const Lattice &lattice, const InclusionShape &shape)
{
  if (lattice.empty() || shape.empty())
  {
    return 1.0;
  }
  const double eps = lattice.epsilon();
  const LatticeIndex m = lattice.CellOf(x);
  if (!lattice.Has(m))
  {
    return 1.0;
  }
  const Point y(x.x() / eps - m[0], x.y() / eps - m[1]);
  return shape.Contains(y) ? eps * eps : 1.0;
}

}  // namespace subwave
