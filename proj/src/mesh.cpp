// SPDX-License-Identifier: Apache-2.0

#include "subwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "subwave/hash.hpp"

namespace subwave
{

const char *ToString(RegionTag tag)
{
  switch (tag)
  {
    case RegionTag::kInclusion:
      return "inclusion";
    case RegionTag::kMatrix:
      return "matrix";
    case RegionTag::kExterior:
      return "exterior";
  }
  return "?";
}

const char *ToString(BoundaryTag tag)
{
  switch (tag)
  {
    case BoundaryTag::kTruncationCircle:
      return "truncation_circle";
    case BoundaryTag::kInterfaceOmega:
      return "interface_omega";
    case BoundaryTag::kInterfaceInclusion:
      return "interface_inclusion";
    case BoundaryTag::kCellBoundary:
      return "cell_boundary";
  }
  return "?";
}

double Mesh::TriangleArea(std::size_t t) const
{
  const auto &tri = triangles[t];
  const Point e1 = vertices[tri[1]] - vertices[tri[0]];
  const Point e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

Point Mesh::Centroid(std::size_t t) const
{
  const auto &tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double Mesh::RegionArea(RegionTag tag) const
{
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
  {
    if (regions[t] == tag)
    {
      a += TriangleArea(t);
    }
  }
  return a;
}

double Mesh::MaxEdgeLength() const
{
  double h = 0.0;
  for (const auto &tri : triangles)
  {
    for (int i = 0; i < 3; ++i)
    {
      h = std::max(h, (vertices[tri[i]] - vertices[tri[(i + 1) % 3]]).norm());
    }
  }
  return h;
}

void Mesh::Validate() const
{
  const int nv = static_cast<int>(vertices.size());
  if (regions.size() != triangles.size())
  {
    throw MeshError("region tag count does not match triangle count");
  }
  if (edge_tags.size() != edges.size())
  {
    throw MeshError("edge tag count does not match edge count");
  }
  for (std::size_t t = 0; t < triangles.size(); ++t)
  {
    for (int v : triangles[t])
    {
      if (v < 0 || v >= nv)
      {
        throw MeshError("triangle " + std::to_string(t) + " references vertex out of range");
      }
    }
    if (!(TriangleArea(t) > 0.0))
    {
      throw MeshError("triangle " + std::to_string(t) + " is not positively oriented");
    }
  }
  for (const auto &e : edges)
  {
    if (e[0] < 0 || e[0] >= nv || e[1] < 0 || e[1] >= nv)
    {
      throw MeshError("edge references vertex out of range");
    }
  }
}

void Mesh::Canonicalize()
{
  const std::size_t nv = vertices.size();
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b)
                   {
                     if (vertices[a].x() != vertices[b].x())
                     {
                       return vertices[a].x() < vertices[b].x();
                     }
                     return vertices[a].y() < vertices[b].y();
                   });
  std::vector<int> remap(nv);
  for (std::size_t i = 0; i < nv; ++i)
  {
    remap[order[i]] = static_cast<int>(i);
  }
  auto permute = [&](auto &vec)
  {
    if (vec.size() != nv)
    {
      return;
    }
    auto copy = vec;
    for (std::size_t i = 0; i < nv; ++i)
    {
      vec[i] = copy[order[i]];
    }
  };
  permute(vertices);
  permute(cell_vertex);
  permute(cell_slot);

  struct Tri
  {
    std::array<int, 3> v;
    RegionTag tag;
    int cell;
  };
  std::vector<Tri> tris(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t)
  {
    std::array<int, 3> v = {remap[triangles[t][0]], remap[triangles[t][1]], remap[triangles[t][2]]};
    const int k = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
    std::rotate(v.begin(), v.begin() + k, v.end());
    tris[t] = {v, regions[t], triangle_cell.empty() ? -1 : triangle_cell[t]};
  }
  std::sort(tris.begin(), tris.end(), [](const Tri &a, const Tri &b) { return a.v < b.v; });
  for (std::size_t t = 0; t < tris.size(); ++t)
  {
    triangles[t] = tris[t].v;
    regions[t] = tris[t].tag;
    if (!triangle_cell.empty())
    {
      triangle_cell[t] = tris[t].cell;
    }
  }

  std::vector<std::pair<std::array<int, 2>, BoundaryTag>> es(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e)
  {
    int a = remap[edges[e][0]], b = remap[edges[e][1]];
    es[e] = {{std::min(a, b), std::max(a, b)}, edge_tags[e]};
  }
  std::sort(es.begin(), es.end(),
            [](const auto &a, const auto &b)
            {
              if (a.first != b.first)
              {
                return a.first < b.first;
              }
              return static_cast<int>(a.second) < static_cast<int>(b.second);
            });
  es.erase(std::unique(es.begin(), es.end()), es.end());
  edges.resize(es.size());
  edge_tags.resize(es.size());
  for (std::size_t e = 0; e < es.size(); ++e)
  {
    edges[e] = es[e].first;
    edge_tags[e] = es[e].second;
  }

  for (auto &p : periodic_pairs)
  {
    p = {remap[p.first], remap[p.second]};
  }
  std::sort(periodic_pairs.begin(), periodic_pairs.end());
}

void WriteMesh(const Mesh &mesh, std::ostream &os)
{
  os << "subwave-mesh v1\n";
  os << mesh.vertices.size() << "\n";
  os << std::setprecision(17);
  for (const auto &v : mesh.vertices)
  {
    os << v.x() << " " << v.y() << "\n";
  }
  os << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
  {
    const auto &tri = mesh.triangles[t];
    os << tri[0] << " " << tri[1] << " " << tri[2] << " " << static_cast<int>(mesh.regions[t])
       << "\n";
  }
  os << mesh.edges.size() << "\n";
  for (std::size_t e = 0; e < mesh.edges.size(); ++e)
  {
    os << mesh.edges[e][0] << " " << mesh.edges[e][1] << " "
       << static_cast<int>(mesh.edge_tags[e]) << "\n";
  }
  os << mesh.periodic_pairs.size() << "\n";
  for (const auto &p : mesh.periodic_pairs)
  {
    os << p.first << " " << p.second << "\n";
  }
}

Mesh ReadMesh(std::istream &is)
{
  std::string header;
  std::getline(is, header);
  if (header != "subwave-mesh v1")
  {
    throw MeshError("not a subwave-mesh v1 file: '" + header + "'");
  }
  Mesh mesh;
  auto count = [&](const char *what)
  {
    long n = -1;
    if (!(is >> n) || n < 0)
    {
      throw MeshError(std::string("malformed mesh file: bad ") + what + " count");
    }
    return static_cast<std::size_t>(n);
  };
  const std::size_t nv = count("vertex");
  mesh.vertices.resize(nv);
  for (auto &v : mesh.vertices)
  {
    if (!(is >> v.x() >> v.y()))
    {
      throw MeshError("malformed mesh file: vertex line");
    }
  }
  const std::size_t nt = count("triangle");
  mesh.triangles.resize(nt);
  mesh.regions.resize(nt);
  for (std::size_t t = 0; t < nt; ++t)
  {
    int tag = -1;
    auto &tri = mesh.triangles[t];
    if (!(is >> tri[0] >> tri[1] >> tri[2] >> tag) || tag < 0 || tag > 2)
    {
      throw MeshError("malformed mesh file: triangle line");
    }
    mesh.regions[t] = static_cast<RegionTag>(tag);
  }
  const std::size_t ne = count("edge");
  mesh.edges.resize(ne);
  mesh.edge_tags.resize(ne);
  for (std::size_t e = 0; e < ne; ++e)
  {
    int tag = -1;
    if (!(is >> mesh.edges[e][0] >> mesh.edges[e][1] >> tag) || tag < 0 || tag > 3)
    {
      throw MeshError("malformed mesh file: edge line");
    }
    mesh.edge_tags[e] = static_cast<BoundaryTag>(tag);
  }
  long np = 0;
  if (is >> np)
  {
    mesh.periodic_pairs.resize(np);
    for (auto &p : mesh.periodic_pairs)
    {
      if (!(is >> p.first >> p.second))
      {
        throw MeshError("malformed mesh file: periodic pair line");
      }
    }
  }
  mesh.Validate();
  return mesh;
}

void WriteMeshFile(const Mesh &mesh, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw MeshError("cannot open " + path + " for writing");
  }
  WriteMesh(mesh, os);
}

Mesh ReadMeshFile(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw MeshError("cannot open " + path);
  }
  return ReadMesh(is);
}

std::vector<int> RegionComponents(const Mesh &mesh, RegionTag tag, int *num_components)
{
  const std::size_t nt = mesh.triangles.size();
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (std::size_t t = 0; t < nt; ++t)
  {
    if (mesh.regions[t] != tag)
    {
      continue;
    }
    for (int i = 0; i < 3; ++i)
    {
      int a = mesh.triangles[t][i], b = mesh.triangles[t][(i + 1) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
    }
  }
  std::vector<int> parent(nt);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x)
  {
    while (parent[x] != x)
    {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto &[e, ts] : edge_tris)
  {
    for (std::size_t i = 1; i < ts.size(); ++i)
    {
      parent[find(ts[i])] = find(ts[0]);
    }
  }
  std::vector<int> comp(nt, -1);
  std::map<int, int> ids;
  for (std::size_t t = 0; t < nt; ++t)
  {
    if (mesh.regions[t] != tag)
    {
      continue;
    }
    const int root = find(static_cast<int>(t));
    auto it = ids.find(root);
    if (it == ids.end())
    {
      it = ids.emplace(root, static_cast<int>(ids.size())).first;
    }
    comp[t] = it->second;
  }
  if (num_components)
  {
    *num_components = static_cast<int>(ids.size());
  }
  return comp;
}

std::string MeshHash(const Mesh &mesh)
{
  std::ostringstream os;
  WriteMesh(mesh, os);
  return Sha256Hex(os.str());
}

}  // namespace subwave
