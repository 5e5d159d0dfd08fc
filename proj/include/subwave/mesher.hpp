// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_MESHER_HPP
#define SUBWAVE_MESHER_HPP

#include <array>
#include <functional>
#include <vector>

#include "subwave/geometry.hpp"

namespace subwave::mesher
{

// Planar straight-line graph: points and non-crossing segments between them.
// Points not referenced by any segment are kept as fixed interior vertices.
struct Pslg
{
  std::vector<Point> points;
  std::vector<std::array<int, 2>> segments;
};

struct Options
{
  // Target edge length at a point. Must be >= min_size everywhere.
  std::function<double(const Point &)> size;
  // Whether interior points may be generated at a point.
  std::function<bool(const Point &)> admit;
  // Region code of a point; regions are flood-filled across unconstrained
  // edges and each connected piece takes the majority code of its triangle
  // centroids. Negative codes are discarded.
  std::function<int(const Point &)> classify;
  double min_size = 0.0;
  double max_size = 0.0;
  int smoothing_passes = 4;
  // 4 makes the generated points invariant under quarter turns about
  // symmetry_center (the PSLG must already be invariant).
  int symmetry = 1;
  Point symmetry_center = Point::Zero();
};

struct Result
{
  // PSLG points keep their indices; generated points follow.
  std::vector<Point> points;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> regions;
  int num_pslg_points = 0;
};

// Constrained Delaunay triangulation with graded interior points. Throws
// MeshError with the offending feature on failure.
Result Triangulate(const Pslg &pslg, const Options &options);

// Smallest interior angle of the triangulation, in degrees.
double MinAngleDegrees(const std::vector<Point> &points,
                       const std::vector<std::array<int, 3>> &triangles);

}  // namespace subwave::mesher

#endif  // SUBWAVE_MESHER_HPP
