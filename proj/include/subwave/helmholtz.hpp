// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_HELMHOLTZ_HPP
#define SUBWAVE_HELMHOLTZ_HPP

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "subwave/geometry.hpp"
#include "subwave/mesh.hpp"
#include "subwave/microcell.hpp"

namespace subwave
{

// Plane wave exp(i z d.x) or point source (i/4) H_0(z |x - x0|).
struct IncidentWave
{
  enum class Kind
  {
    kPlane,
    kPointSource
  };

  Kind kind = Kind::kPlane;
  Point direction = Point(1.0, 0.0);
  Point source = Point::Zero();
  double k = 1.0;

  static IncidentWave Plane(double k, const Point &direction);
  static IncidentWave PointSource(double k, const Point &source);

  cplx Value(const Point &x) const { return Value(x, k); }
  cplx Value(const Point &x, cplx z) const;
  Eigen::Vector2cd Gradient(const Point &x, cplx z) const;
};

// Outgoing Dirichlet-to-Neumann map on the circle of radius r, diagonal in
// the Fourier modes exp(i n theta), |n| <= N.
struct DtnOperator
{
  double r = 1.0;
  cplx z = 1.0;
  int n_modes = 0;
  std::vector<cplx> coefficients;  // n = 0..N; the map is even in n

  cplx Coefficient(int n) const { return coefficients[n < 0 ? -n : n]; }
};

// ceil(|z| r) + 15.
int DefaultDtnModes(double r, cplx z);

DtnOperator BuildDtn(double r, cplx z, int n_modes);

// Mesh vertices on the truncation circle ordered by angle.
struct CircleTrace
{
  double r = 0.0;
  std::vector<int> nodes;
  std::vector<double> angles;

  // int_0^{2 pi} N_i(theta) exp(i n theta) d theta for n = -N..N (column n+N),
  // with N_i the periodic hat functions on the node angles.
  Eigen::MatrixXcd FourierMoments(int n_modes) const;
};

CircleTrace ExtractCircleTrace(const Mesh &mesh, double r);

// Dense DtN coupling on the trace nodes: B_ij = <DtN N_j, N_i>.
Eigen::MatrixXcd DtnBlock(const CircleTrace &trace, const DtnOperator &dtn);

enum class ProblemKind
{
  kFine,
  kEffective,
  kFree
};

const char *ToString(ProblemKind k);

// Real FEM pieces of K - z^2 (mu M_scaled + M_plain) - B(z) on a scene mesh.
class HelmholtzOperator
{
public:
  // eps^2 on inclusion triangles, unit mass everywhere.
  static HelmholtzOperator Fine(std::shared_ptr<const Mesh> mesh, double epsilon, double r);
  // a0 and mu0(z) on Omega (inclusion and matrix triangles).
  static HelmholtzOperator Effective(std::shared_ptr<const Mesh> mesh, const Eigen::Matrix2d &a0,
                                     std::function<cplx(cplx)> mu0, double r);
  static HelmholtzOperator Free(std::shared_ptr<const Mesh> mesh, double r);

  ProblemKind kind() const { return kind_; }
  const Mesh &mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  double r() const { return trace_.r; }
  const CircleTrace &trace() const { return trace_; }
  const Eigen::SparseMatrix<double> &stiffness() const { return stiffness_; }
  const Eigen::SparseMatrix<double> &mass_scaled() const { return mass_scaled_; }
  const Eigen::SparseMatrix<double> &mass_plain() const { return mass_plain_; }
  cplx MassFactor(cplx z) const { return mu0_ ? mu0_(z) : cplx(1.0); }

  // System matrix at frequency z with N DtN modes (0 selects the default).
  Eigen::SparseMatrix<cplx> Assemble(cplx z, int n_modes = 0) const;
  // Boundary load int (d_r u_in - DtN u_in) N_i over the truncation circle.
  Eigen::VectorXcd IncidentLoad(const IncidentWave &wave, cplx z, int n_modes = 0) const;

private:
  ProblemKind kind_ = ProblemKind::kFree;
  std::shared_ptr<const Mesh> mesh_;
  CircleTrace trace_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SparseMatrix<double> mass_scaled_;
  Eigen::SparseMatrix<double> mass_plain_;
  std::function<cplx(cplx)> mu0_;
};

// Scattered-field splitting a1(w,v) + a2(w,v) = H(v) of the effective problem,
// solved alongside the total-field system as a consistency diagnostic.
struct EffectiveDiagnostics
{
  double s = 0.0;  // k^2 mu0
  double split_matrix_mismatch = 0.0;  // max |(a1 + a2) - A| over entries
  double split_solution_mismatch = 0.0;  // relative L2 gap between the two solutions
};

struct FieldSolution
{
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXcd u;  // total field at the vertices
  ProblemKind kind = ProblemKind::kFree;
  double epsilon = 0.0;
  cplx z = 0.0;
  int dtn_modes = 0;
  double residual = 0.0;  // relative algebraic residual
  double rcond = 0.0;     // reciprocal condition estimate of the factorisation
  std::vector<std::string> warnings;
  EffectiveDiagnostics diagnostics;
};

struct ScatterScene
{
  MacroDomain omega = MacroDomain::Disk(0.5);
  Lattice lattice;
  InclusionShape shape;
  double r = 1.0;
  IncidentWave incident;
  std::shared_ptr<const Mesh> mesh;

  double epsilon() const { return lattice.epsilon(); }
};

struct SolveOptions
{
  int dtn_modes = 0;            // 0: DefaultDtnModes
  double rcond_warning = 1e-12;
};

// Generic solve of an assembled operator against the incident wave.
FieldSolution SolveScattering(const HelmholtzOperator &op, const IncidentWave &wave, cplx z,
                              const SolveOptions &options = {});

// Homogenised problem with coefficients a0, mu0(k) in Omega.
FieldSolution SolveEffective(const ScatterScene &scene, const EffectiveMedium &medium, double k,
                             const SolveOptions &options = {});

// Heterogeneous problem with eps^2 in the inclusions; z may be complex.
FieldSolution SolveFine(const ScatterScene &scene, cplx z, const SolveOptions &options = {});

// No obstacle.
FieldSolution SolveFree(const ScatterScene &scene, const SolveOptions &options = {});

struct FarField
{
  std::vector<double> theta;
  std::vector<cplx> values;
  double radius = 0.0;
};

// Far-field pattern of an outgoing field from its samples on the circle of
// radius rho (normal derivative through the DtN map at rho), for the
// normalisation u_s ~ exp(i k |x|) |x|^(-1/2) u_inf.
FarField FarFieldFromCircle(const std::function<cplx(const Point &)> &scattered, double rho,
                            double k, const std::vector<double> &theta, int samples = 0);

// Far field of u - u_in from a real-frequency solution. Throws when rho > r or
// Omega is not inside B_rho.
FarField ComputeFarField(const FieldSolution &sol, const ScatterScene &scene, double rho,
                         const std::vector<double> &theta);

// Im int_{|x| = rho} d_n u_s conj(u_s) dS, by the same sampling.
double OutgoingFlux(const std::function<cplx(const Point &)> &scattered, double rho, double k,
                    int samples = 0);

// n equispaced directions on [0, 2 pi).
std::vector<double> UniformAngles(int n);

// "subwave-field v1" values file with lines "index re im".
void WriteFieldValues(const FieldSolution &sol, const std::string &path);
Eigen::VectorXcd ReadFieldValues(const std::string &path);
// CSV "theta,re,im".
void WriteFarFieldCsv(const FarField &ff, const std::string &path);

}  // namespace subwave

#endif  // SUBWAVE_HELMHOLTZ_HPP
