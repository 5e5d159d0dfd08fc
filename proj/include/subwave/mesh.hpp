// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_MESH_HPP
#define SUBWAVE_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "subwave/geometry.hpp"

namespace subwave
{

enum class RegionTag : int
{
  kInclusion = 0,
  kMatrix = 1,
  kExterior = 2
};

enum class BoundaryTag : int
{
  kTruncationCircle = 0,
  kInterfaceOmega = 1,
  kInterfaceInclusion = 2,
  kCellBoundary = 3
};

const char *ToString(RegionTag tag);
const char *ToString(BoundaryTag tag);

class MeshError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Mesh
{
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<RegionTag> regions;             // one per triangle
  std::vector<std::array<int, 2>> edges;      // tagged boundary/interface edges
  std::vector<BoundaryTag> edge_tags;
  // Cell meshes: (i, j) with vertex j = vertex i + unit lattice vector.
  std::vector<std::pair<int, int>> periodic_pairs;

  // Scene meshes tiled from a cell mesh: for each vertex the local cell vertex
  // it was copied from and the lattice position of that cell, or -1.
  std::vector<int> cell_vertex;
  std::vector<int> cell_slot;
  // For each triangle the lattice position of its cell, or -1.
  std::vector<int> triangle_cell;

  std::size_t NumVertices() const { return vertices.size(); }
  std::size_t NumTriangles() const { return triangles.size(); }

  double TriangleArea(std::size_t t) const;
  Point Centroid(std::size_t t) const;
  double RegionArea(RegionTag tag) const;
  double MaxEdgeLength() const;

  // Throws MeshError on orientation, index range or tag-count violations.
  void Validate() const;

  // Lexicographic vertex order, rotated and sorted triangles, sorted edges.
  void Canonicalize();
};

void WriteMesh(const Mesh &mesh, std::ostream &os);
Mesh ReadMesh(std::istream &is);
void WriteMeshFile(const Mesh &mesh, const std::string &path);
Mesh ReadMeshFile(const std::string &path);

// Connected components of the triangles carrying the given tag (sharing an
// edge). Returns the component index per triangle, -1 for other tags.
std::vector<int> RegionComponents(const Mesh &mesh, RegionTag tag, int *num_components);

// Content hash of the canonical text form (hex SHA-256).
std::string MeshHash(const Mesh &mesh);

}  // namespace subwave

#endif  // SUBWAVE_MESH_HPP
