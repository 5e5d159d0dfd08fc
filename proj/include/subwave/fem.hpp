// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_FEM_HPP
#define SUBWAVE_FEM_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "subwave/mesh.hpp"

namespace subwave::fem
{

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<double>;
using CSpMat = Eigen::SparseMatrix<cplx>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Grad = Eigen::Vector2cd;

// Area and constant shape-function gradients of one P1 triangle.
struct Element
{
  double area;
  std::array<Eigen::Vector2d, 3> grad;
};

Element MakeElement(const Mesh &mesh, std::size_t t);

// Three-point interior rule on the reference triangle (barycentric
// coordinates, weights summing to one).
inline constexpr std::array<std::array<double, 3>, 3> kQuadBary = {
    {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
     {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
     {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}};
inline constexpr double kQuadWeight = 1.0 / 3.0;

// Per-triangle coefficients. A zero weight drops the triangle.
SpMat Stiffness(const Mesh &mesh, const std::vector<double> &weight);
SpMat StiffnessTensor(const Mesh &mesh, const std::vector<Eigen::Matrix2d> &tensor);
SpMat Mass(const Mesh &mesh, const std::vector<double> &weight);

// Per-triangle weight 1 where pred(tag) holds, else 0.
std::vector<double> RegionWeight(const Mesh &mesh, const std::function<bool(RegionTag)> &pred);

// Load vector int f N_i over the triangles with nonzero weight.
CVec Load(const Mesh &mesh, const std::function<cplx(const Point &)> &f,
          const std::vector<double> &weight);

// Nodal interpolant of f.
CVec Interpolate(const Mesh &mesh, const std::function<cplx(const Point &)> &f);

// Squared L2 norm of a nodal field over the weighted triangles
// (sum of weight * int |u|^2).
double L2NormSquared(const Mesh &mesh, const CVec &u, const std::vector<double> &weight);
// Squared L2 norm of the gradient of a nodal field.
double GradNormSquared(const Mesh &mesh, const CVec &u, const std::vector<double> &weight);
// Squared L2 distance between a nodal field and a function, by quadrature.
double L2ErrorSquared(const Mesh &mesh, const CVec &u,
                      const std::function<cplx(const Point &)> &exact,
                      const std::vector<double> &weight);

// Element gradient of a nodal field.
Grad ElementGradient(const Mesh &mesh, std::size_t t, const CVec &u);

// Area-weighted average of element gradients at each vertex, using the
// triangles with nonzero weight; vertices without such triangles get zero.
std::vector<Grad> RecoverGradient(const Mesh &mesh, const CVec &u,
                                  const std::vector<double> &weight);

// Bucket-grid point location.
class PointLocator
{
public:
  explicit PointLocator(const Mesh &mesh);

  // Triangle containing p with barycentric coordinates, or -1. Points within
  // tol (relative to the triangle) of an edge are accepted.
  int Locate(const Point &p, std::array<double, 3> *bary, double tol = 1e-10) const;

  template <typename V>
  bool Evaluate(const std::vector<V> &values, const Point &p, V *out) const
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

  bool Evaluate(const CVec &values, const Point &p, cplx *out) const;

private:
  const Mesh &mesh_;
  Point lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

// Vertex classes for a periodic cell mesh: paired boundary vertices share a
// class. Returns the class of each vertex and the number of classes.
std::vector<int> PeriodicClasses(const Mesh &mesh, int *num_classes);

}  // namespace subwave::fem

#endif  // SUBWAVE_FEM_HPP
