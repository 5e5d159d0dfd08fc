// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_HOMOGENIZE_HPP
#define SUBWAVE_HOMOGENIZE_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "subwave/fem.hpp"
#include "subwave/geometry.hpp"
#include "subwave/helmholtz.hpp"
#include "subwave/microcell.hpp"

namespace subwave
{

class HomogenizationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Radially symmetric bump exp(-1 / (1 - |2y|^2)) on |y| < 1/2, tabulated on a
// 16 x 16 Gauss-Legendre grid over [-1/2, 1/2]^2 and scaled to unit mass.
// Nodes with zero weight are dropped.
struct Mollifier
{
  std::vector<Point> nodes;
  std::vector<double> weights;

  static const Mollifier &Standard();
};

// S_eps v(x) = int v(x - eps y) xi(y) dy.
Eigen::Vector2cd SmoothingConvolve(const std::function<Eigen::Vector2cd(const Point &)> &v,
                                   const Point &x, double epsilon);

// S_eps of a nodal vector field (P1 interpolated) at the given points. Throws
// when a sample falls outside the mesh.
std::vector<Eigen::Vector2cd> SmoothingConvolve(const Mesh &mesh,
                                                const std::vector<Eigen::Vector2cd> &field,
                                                const std::vector<Point> &points, double epsilon);

// 1 at distance >= 3 eps from the boundary of Omega, 0 within 2 eps and
// outside Omega, quintic smoothstep in the distance between.
double BoundaryCutoff(const MacroDomain &omega, double epsilon, const Point &x);

// Largest distance to the boundary attained in Omega.
double Inradius(const MacroDomain &omega);

struct Reconstruction
{
  double epsilon = 0.0;
  double inner_width = 0.0;  // cutoff vanishes within this distance
  double outer_width = 0.0;  // cutoff is 1 beyond this distance
  Eigen::VectorXcd base;       // Lambda(x / eps) u0
  Eigen::VectorXcd corrector;  // eps chi(x / eps) . eta S_eps(grad u0)
  Eigen::VectorXcd combined;
  std::vector<double> cutoff;  // nodal
  std::vector<std::string> warnings;
};

// First-order approximation of the fine field on the mesh of u0. The mesh must
// be tiled from the medium's cell mesh.
Reconstruction Reconstruct(const FieldSolution &u0, const EffectiveMedium &medium,
                           const ScatterScene &scene);

struct ErrorRow
{
  double epsilon = 0.0;
  double l2_ball = 0.0;
  double l2_recon = 0.0;
  double heps = 0.0;
  double h1_ext = 0.0;
  double e_functional = 0.0;
  double farfield_sup = 0.0;
};

// eps^(1/2) |u0|_{H1(Omega)} + |grad u0|_{L2(O_4eps)} + eps |D^2 u0|_{L2(Omega \ O_eps)},
// O_d the part of Omega within distance d of its boundary. Second derivatives
// come from differentiating the recovered gradient.
double BoundaryLayerFunctional(const FieldSolution &u0, const MacroDomain &omega, double epsilon);

// L2, weighted and exterior norms of u_eps against u0 and its reconstruction.
// Far fields are compared at 0.9 r over 128 directions.
ErrorRow ComputeErrorRow(const FieldSolution &u_eps, const FieldSolution &u0,
                         const Reconstruction &recon, const ScatterScene &scene);

struct RateFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;            // root mean square of the deviations
  std::vector<double> deviations;   // per used point, in log space
  std::vector<std::string> notes;   // excluded points
};

// Least squares line through (log eps, log error); nonpositive errors are
// excluded. Throws with fewer than 3 usable points.
RateFit FitRate(const std::vector<std::pair<double, double>> &pairs);

// CSV with header "epsilon,l2_ball,l2_recon,heps,h1_ext,e_functional,farfield_sup".
void WriteErrorReportCsv(const std::vector<ErrorRow> &rows, const std::string &path);
std::vector<ErrorRow> ReadErrorReportCsv(const std::string &path);

}  // namespace subwave

#endif  // SUBWAVE_HOMOGENIZE_HPP
