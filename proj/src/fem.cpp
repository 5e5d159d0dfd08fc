// SPDX-License-Identifier: Apache-2.0

#include "subwave/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subwave/parallel.hpp"

namespace subwave::fem
{

namespace
{

constexpr std::size_t kChunks = 64;

using Triplet = Eigen::Triplet<double>;

// Deterministic parallel triplet assembly: element chunks are fixed and
// concatenated in chunk order.
SpMat AssembleChunks(const Mesh &mesh,
                     const std::function<void(std::size_t, std::vector<Triplet> &)> &element)
{
  const std::size_t nt = mesh.triangles.size();
  std::vector<std::vector<Triplet>> parts(kChunks);
  ParallelFor(kChunks,
              [&](std::size_t c)
              {
                const std::size_t lo = nt * c / kChunks, hi = nt * (c + 1) / kChunks;
                parts[c].reserve(9 * (hi - lo));
                for (std::size_t t = lo; t < hi; ++t)
                {
                  element(t, parts[c]);
                }
              });
  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto &p : parts)
  {
    total += p.size();
  }
  all.reserve(total);
  for (const auto &p : parts)
  {
    all.insert(all.end(), p.begin(), p.end());
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  SpMat a(nv, nv);
  a.setFromTriplets(all.begin(), all.end());
  a.makeCompressed();
  return a;
}

}  // namespace

Element MakeElement(const Mesh &mesh, std::size_t t)
{
  const auto &tri = mesh.triangles[t];
  const Point &p0 = mesh.vertices[tri[0]], &p1 = mesh.vertices[tri[1]], &p2 = mesh.vertices[tri[2]];
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  Element e;
  e.area = 0.5 * det;
  e.grad[0] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;
  e.grad[1] = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / det;
  e.grad[2] = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / det;
  return e;
}

SpMat Stiffness(const Mesh &mesh, const std::vector<double> &weight)
{
  return AssembleChunks(mesh,
                        [&](std::size_t t, std::vector<Triplet> &out)
                        {
                          if (weight[t] == 0.0)
                          {
                            return;
                          }
                          const Element e = MakeElement(mesh, t);
                          const auto &tri = mesh.triangles[t];
                          for (int i = 0; i < 3; ++i)
                          {
                            for (int j = 0; j < 3; ++j)
                            {
                              out.emplace_back(tri[i], tri[j],
                                               weight[t] * e.area * e.grad[i].dot(e.grad[j]));
                            }
                          }
                        });
}

SpMat StiffnessTensor(const Mesh &mesh, const std::vector<Eigen::Matrix2d> &tensor)
{
  return AssembleChunks(mesh,
                        [&](std::size_t t, std::vector<Triplet> &out)
                        {
                          if (tensor[t].isZero(0.0))
                          {
                            return;
                          }
                          const Element e = MakeElement(mesh, t);
                          const auto &tri = mesh.triangles[t];
                          for (int i = 0; i < 3; ++i)
                          {
                            for (int j = 0; j < 3; ++j)
                            {
                              out.emplace_back(tri[i], tri[j],
                                               e.area * e.grad[i].dot(tensor[t] * e.grad[j]));
                            }
                          }
                        });
}

SpMat Mass(const Mesh &mesh, const std::vector<double> &weight)
{
  return AssembleChunks(mesh,
                        [&](std::size_t t, std::vector<Triplet> &out)
                        {
                          if (weight[t] == 0.0)
                          {
                            return;
                          }
                          const double area = mesh.TriangleArea(t);
                          const auto &tri = mesh.triangles[t];
                          for (int i = 0; i < 3; ++i)
                          {
                            for (int j = 0; j < 3; ++j)
                            {
                              double s = 0.0;
                              for (const auto &q : kQuadBary)
                              {
                                s += kQuadWeight * q[i] * q[j];
                              }
                              out.emplace_back(tri[i], tri[j], weight[t] * area * s);
                            }
                          }
                        });
}

std::vector<double> RegionWeight(const Mesh &mesh, const std::function<bool(RegionTag)> &pred)
{
  std::vector<double> w(mesh.triangles.size());
  for (std::size_t t = 0; t < w.size(); ++t)
  {
    w[t] = pred(mesh.regions[t]) ? 1.0 : 0.0;
  }
  return w;
}

CVec Load(const Mesh &mesh, const std::function<cplx(const Point &)> &f,
          const std::vector<double> &weight)
{
  CVec b = CVec::Zero(mesh.vertices.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
  {
    if (weight[t] == 0.0)
    {
      continue;
    }
    const auto &tri = mesh.triangles[t];
    const double area = mesh.TriangleArea(t);
    for (const auto &q : kQuadBary)
    {
      const Point x = q[0] * mesh.vertices[tri[0]] + q[1] * mesh.vertices[tri[1]] +
                      q[2] * mesh.vertices[tri[2]];
      const cplx fx = f(x) * (weight[t] * area * kQuadWeight);
      for (int i = 0; i < 3; ++i)
      {
        b[tri[i]] += fx * q[i];
      }
    }
  }
  return b;
}

CVec Interpolate(const Mesh &mesh, const std::function<cplx(const Point &)> &f)
{
  CVec u(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
  {
    u[i] = f(mesh.vertices[i]);
  }
  return u;
}

double L2NormSquared(const Mesh &mesh, const CVec &u, const std::vector<double> &weight)
{
  std::vector<double> part(kChunks, 0.0);
  const std::size_t nt = mesh.triangles.size();
  ParallelFor(kChunks,
              [&](std::size_t c)
              {
                double s = 0.0;
                for (std::size_t t = nt * c / kChunks; t < nt * (c + 1) / kChunks; ++t)
                {
                  if (weight[t] == 0.0)
                  {
                    continue;
                  }
                  const auto &tri = mesh.triangles[t];
                  const cplx a = u[tri[0]], b = u[tri[1]], d = u[tri[2]];
                  // Exact for P1: area/12 (|a|^2+|b|^2+|d|^2 + |a+b+d|^2).
                  const double q = std::norm(a) + std::norm(b) + std::norm(d) + std::norm(a + b + d);
                  s += weight[t] * mesh.TriangleArea(t) * q / 12.0;
                }
                part[c] = s;
              });
  return std::accumulate(part.begin(), part.end(), 0.0);
}

Grad ElementGradient(const Mesh &mesh, std::size_t t, const CVec &u)
{
  const Element e = MakeElement(mesh, t);
  const auto &tri = mesh.triangles[t];
  Grad g = Grad::Zero();
  for (int i = 0; i < 3; ++i)
  {
    g += u[tri[i]] * e.grad[i].cast<cplx>();
  }
  return g;
}

double GradNormSquared(const Mesh &mesh, const CVec &u, const std::vector<double> &weight)
{
  std::vector<double> part(kChunks, 0.0);
  const std::size_t nt = mesh.triangles.size();
  ParallelFor(kChunks,
              [&](std::size_t c)
              {
                double s = 0.0;
                for (std::size_t t = nt * c / kChunks; t < nt * (c + 1) / kChunks; ++t)
                {
                  if (weight[t] == 0.0)
                  {
                    continue;
                  }
                  s += weight[t] * mesh.TriangleArea(t) * ElementGradient(mesh, t, u).squaredNorm();
                }
                part[c] = s;
              });
  return std::accumulate(part.begin(), part.end(), 0.0);
}

double L2ErrorSquared(const Mesh &mesh, const CVec &u,
                      const std::function<cplx(const Point &)> &exact,
                      const std::vector<double> &weight)
{
  std::vector<double> part(kChunks, 0.0);
  const std::size_t nt = mesh.triangles.size();
  ParallelFor(kChunks,
              [&](std::size_t c)
              {
                double s = 0.0;
                for (std::size_t t = nt * c / kChunks; t < nt * (c + 1) / kChunks; ++t)
                {
                  if (weight[t] == 0.0)
                  {
                    continue;
                  }
                  const auto &tri = mesh.triangles[t];
                  const double area = mesh.TriangleArea(t);
                  for (const auto &q : kQuadBary)
                  {
                    const Point x = q[0] * mesh.vertices[tri[0]] + q[1] * mesh.vertices[tri[1]] +
                                    q[2] * mesh.vertices[tri[2]];
                    const cplx uh = q[0] * u[tri[0]] + q[1] * u[tri[1]] + q[2] * u[tri[2]];
                    s += weight[t] * area * kQuadWeight * std::norm(uh - exact(x));
                  }
                }
                part[c] = s;
              });
  return std::accumulate(part.begin(), part.end(), 0.0);
}

std::vector<Grad> RecoverGradient(const Mesh &mesh, const CVec &u,
                                  const std::vector<double> &weight)
{
  const std::size_t nv = mesh.vertices.size();
  std::vector<Grad> g(nv, Grad::Zero());
  std::vector<double> area(nv, 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
  {
    if (weight[t] == 0.0)
    {
      continue;
    }
    const double a = mesh.TriangleArea(t);
    const Grad gt = ElementGradient(mesh, t, u);
    for (int v : mesh.triangles[t])
    {
      g[v] += a * gt;
      area[v] += a;
    }
  }
  for (std::size_t v = 0; v < nv; ++v)
  {
    if (area[v] > 0.0)
    {
      g[v] /= area[v];
    }
  }
  return g;
}

PointLocator::PointLocator(const Mesh &mesh) : mesh_(mesh)
{
  if (mesh.triangles.empty())
  {
    throw MeshError("point locator: empty mesh");
  }
  Point lo = mesh.vertices[0], hi = lo;
  for (const auto &v : mesh.vertices)
  {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double w = std::max(hi.x() - lo.x(), 1e-300), hgt = std::max(hi.y() - lo.y(), 1e-300);
  const double target = std::sqrt(w * hgt / static_cast<double>(mesh.triangles.size()));
  cell_ = std::max(target, 1e-300);
  lo_ = lo - Point::Constant(1e-9 * std::max(w, hgt));
  nx_ = std::max(1, static_cast<int>(std::ceil((w * (1 + 2e-9)) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hgt * (1 + 2e-9)) / cell_)) + 1);
  std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  auto range = [&](std::size_t t, int *i0, int *i1, int *j0, int *j1)
  {
    const auto &tri = mesh.triangles[t];
    Point a = mesh.vertices[tri[0]], b = a;
    for (int k = 1; k < 3; ++k)
    {
      a = a.cwiseMin(mesh.vertices[tri[k]]);
      b = b.cwiseMax(mesh.vertices[tri[k]]);
    }
    *i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_), 0, nx_ - 1);
    *i1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / cell_), 0, nx_ - 1);
    *j0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_), 0, ny_ - 1);
    *j1 = std::clamp(static_cast<int>((b.y() - lo_.y()) / cell_), 0, ny_ - 1);
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
  {
    int i0, i1, j0, j1;
    range(t, &i0, &i1, &j0, &j1);
    for (int j = j0; j <= j1; ++j)
    {
      for (int i = i0; i <= i1; ++i)
      {
        ++count[j * nx_ + i + 1];
      }
    }
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  start_ = count;
  items_.resize(start_.back());
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
  {
    int i0, i1, j0, j1;
    range(t, &i0, &i1, &j0, &j1);
    for (int j = j0; j <= j1; ++j)
    {
      for (int i = i0; i <= i1; ++i)
      {
        items_[fill[j * nx_ + i]++] = static_cast<int>(t);
      }
    }
  }
}

int PointLocator::Locate(const Point &p, std::array<double, 3> *bary, double tol) const
{
  const int i = static_cast<int>(std::floor((p.x() - lo_.x()) / cell_));
  const int j = static_cast<int>(std::floor((p.y() - lo_.y()) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_)
  {
    return -1;
  }
  const int bucket = j * nx_ + i;
  int best = -1;
  double best_min = -1e300;
  std::array<double, 3> best_b{};
  for (int k = start_[bucket]; k < start_[bucket + 1]; ++k)
  {
    const int t = items_[k];
    const auto &tri = mesh_.triangles[t];
    const Point &a = mesh_.vertices[tri[0]], &b = mesh_.vertices[tri[1]], &c = mesh_.vertices[tri[2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    const double l1 = ((c.x() - p.x()) * (a.y() - p.y()) - (a.x() - p.x()) * (c.y() - p.y())) / det;
    const double l2 = ((a.x() - p.x()) * (b.y() - p.y()) - (b.x() - p.x()) * (a.y() - p.y())) / det;
    const double l0 = 1.0 - l1 - l2;
    const double m = std::min({l0, l1, l2});
    if (m >= 0.0)
    {
      *bary = {l0, l1, l2};
      return t;
    }
    if (m > best_min)
    {
      best_min = m;
      best = t;
      best_b = {l0, l1, l2};
    }
  }
  if (best >= 0 && best_min >= -tol)
  {
    *bary = best_b;
    return best;
  }
  return -1;
}

bool PointLocator::Evaluate(const CVec &values, const Point &p, cplx *out) const
{
  std::array<double, 3> b;
  const int t = Locate(p, &b);
  if (t < 0)
  {
    return false;
  }
  const auto &tri = mesh_.triangles[t];
  *out = b[0] * values[tri[0]] + b[1] * values[tri[1]] + b[2] * values[tri[2]];
  return true;
}

std::vector<int> PeriodicClasses(const Mesh &mesh, int *num_classes)
{
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<int> parent(nv);
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
  for (const auto &[a, b] : mesh.periodic_pairs)
  {
    const int ra = find(a), rb = find(b);
    if (ra != rb)
    {
      parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::vector<int> cls(nv, -1), id(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v)
  {
    const int r = find(v);
    if (id[r] < 0)
    {
      id[r] = n++;
    }
    cls[v] = id[r];
  }
  if (num_classes)
  {
    *num_classes = n;
  }
  return cls;
}

}  // namespace subwave::fem
