// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_GEOMETRY_HPP
#define SUBWAVE_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace subwave
{

using Point = Eigen::Vector2d;

class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Closed polyline helpers.
double PolygonSignedArea(const std::vector<Point> &poly);
bool PolygonIsSimple(const std::vector<Point> &poly);
bool PointInPolygon(const std::vector<Point> &poly, const Point &p);
double DistanceToSegment(const Point &p, const Point &a, const Point &b);
double DistanceToPolyline(const std::vector<Point> &closed_poly, const Point &p);

//
// Inclusion D inside the unit cell Y = (0,1)^2.
//
class InclusionShape
{
public:
  enum class Kind
  {
    kNone,
    kDisk,
    kRectangle,
    kPolygon
  };

  // No inclusion at all (homogeneous cell).
  static InclusionShape None();
  static InclusionShape Disk(const Point &center, double radius);
  static InclusionShape Rectangle(const Point &lo, const Point &hi);
  static InclusionShape Polygon(std::vector<Point> vertices);

  Kind kind() const { return kind_; }
  bool empty() const { return kind_ == Kind::kNone; }
  const Point &center() const { return center_; }
  double radius() const { return radius_; }
  const Point &lo() const { return lo_; }
  const Point &hi() const { return hi_; }
  const std::vector<Point> &vertices() const { return vertices_; }

  // Open-set membership for a point of the unit cell.
  bool Contains(const Point &y) const;
  double Area() const;
  // Minimum distance from the closure of D to the cell boundary.
  double WallDistance() const;
  // Counter-clockwise boundary polygon. Curved parts are sampled on the exact
  // curve with spacing at most h; straight edges are subdivided uniformly.
  // For disks the vertex count is rounded up to a multiple of multiple_of.
  std::vector<Point> BoundaryPolygon(double h, int multiple_of = 1) const;
  // True when D is invariant under quarter turns about the cell centre.
  bool QuarterTurnSymmetric() const;
  // Distance from y to the boundary of D.
  double BoundaryDistance(const Point &y) const;

  std::string Describe() const;

private:
  Kind kind_ = Kind::kNone;
  Point center_ = Point::Zero();
  double radius_ = 0.0;
  Point lo_ = Point::Zero();
  Point hi_ = Point::Zero();
  std::vector<Point> vertices_;
};

//
// Macroscopic obstacle region Omega.
//
class MacroDomain
{
public:
  enum class Kind
  {
    kDisk,
    kRectangle,
    kPolygon
  };
  enum class Regularity
  {
    kLipschitz,
    kC11
  };

  // Disk of the given radius centred at the origin.
  static MacroDomain Disk(double radius);
  static MacroDomain Rectangle(const Point &lo, const Point &hi);
  static MacroDomain Polygon(std::vector<Point> vertices);

  Kind kind() const { return kind_; }
  Regularity regularity() const { return regularity_; }
  double radius() const { return radius_; }
  const Point &lo() const { return lo_; }
  const Point &hi() const { return hi_; }
  const std::vector<Point> &vertices() const { return vertices_; }

  bool Contains(const Point &x) const;  // open set
  bool ContainsClosed(const Point &x, double tol) const;
  double Area() const;
  // Distance from x to the boundary of Omega (exact for disks and rectangles,
  // segment projection for polygons).
  double BoundaryDistance(const Point &x) const;
  // max |x| over the closure of Omega (origin-centred circumradius).
  double Circumradius() const;
  std::array<Point, 2> BoundingBox() const;
  // Corner vertices for polygonal domains (empty for the disk).
  std::vector<Point> Corners() const;

  std::string Describe() const;

private:
  Kind kind_ = Kind::kDisk;
  Regularity regularity_ = Regularity::kC11;
  double radius_ = 0.0;
  Point lo_ = Point::Zero();
  Point hi_ = Point::Zero();
  std::vector<Point> vertices_;
};

using LatticeIndex = std::array<int, 2>;

// Indices m of the cells eps (Y + m) contained in Omega.
class Lattice
{
public:
  Lattice() = default;
  Lattice(double epsilon, std::vector<LatticeIndex> indices);

  double epsilon() const { return epsilon_; }
  const std::vector<LatticeIndex> &indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool Has(const LatticeIndex &m) const;
  // Position in indices(), or -1.
  int Find(const LatticeIndex &m) const;
  // Cell containing x (floor(x / eps)).
  LatticeIndex CellOf(const Point &x) const;

private:
  double epsilon_ = 0.0;
  std::vector<LatticeIndex> indices_;  // sorted
};

// Exhaustive scan of the bounding box for cells eps (Y + m) inside Omega.
Lattice BuildLattice(const MacroDomain &omega, double epsilon);

// eps^2 inside D_eps, 1 elsewhere.
double CoefficientAt(const Point &x, const Lattice &lattice, const InclusionShape &shape);

}  // namespace subwave

#endif  // SUBWAVE_GEOMETRY_HPP
