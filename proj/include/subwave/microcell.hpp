// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_MICROCELL_HPP
#define SUBWAVE_MICROCELL_HPP

#include <array>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "subwave/geometry.hpp"
#include "subwave/mesh.hpp"

namespace subwave
{

using cplx = std::complex<double>;

// z is too close to a pole of the cell resolvent.
class PoleError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

enum class ModeClass
{
  kNonzeroMean,
  kZeroMean
};

const char *ToString(ModeClass c);

// Dirichlet eigenpairs of -Laplace on the inclusion.
struct DirichletSpectrum
{
  std::vector<double> eigenvalues;  // squared frequencies, ascending
  Eigen::MatrixXd eigenfunctions;   // one column per mode, indexed by cell vertex
  std::vector<double> means;        // integral of each mode over D
  std::vector<ModeClass> classes;   // per mode; shared within an eigenspace
  std::vector<int> eigenspace;      // eigenspace id per mode
  double inclusion_area = 0.0;      // |D| on the mesh
  // Squared norm of the projection of the constant 1 onto the discrete
  // space (sum over the full discrete spectrum of the squared means).
  double total_mean_mass = 0.0;
  double max_residual = 0.0;
  double max_gram_error = 0.0;

  std::size_t size() const { return eigenvalues.size(); }
  bool empty() const { return eigenvalues.empty(); }
  double frequency(std::size_t j) const;
  // Squared means not captured by the computed modes.
  double MissingMeanMass() const;
};

// First n_modes Dirichlet eigenpairs on the inclusion triangles of a cell
// mesh (n_modes <= 0: all of them). A mode class is nonzero-mean when the
// projection of 1 onto its eigenspace exceeds mean_tolerance * |D|^(1/2).
DirichletSpectrum ComputeDirichletSpectrum(const Mesh &cell, int n_modes,
                                           double mean_tolerance = 1e-7);

enum class SigmaClass
{
  kNonzeroMean,  // in Sigma_{D,1}
  kZeroMean,     // in Sigma_{D,0}
  kOutside
};

const char *ToString(SigmaClass c);

struct SigmaClassification
{
  SigmaClass cls = SigmaClass::kOutside;
  double distance = 0.0;  // distance from z to the nearest +-lambda_j
  int nearest = -1;       // mode index of that lambda_j
};

SigmaClassification ClassifySigma(const DirichletSpectrum &spectrum, cplx z, double tol = 1e-8);

struct SeriesValue
{
  cplx value;
  // Bound on the contribution of the modes beyond the computed ones.
  double tail = 0.0;
};

// Truncated eigen-series sum_j mean_j^2 / (z^2 - lambda_j^2). Throws
// PoleError within pole_tol of any +-lambda_j.
SeriesValue Beta(const DirichletSpectrum &spectrum, cplx z, double pole_tol = 1e-8);

// 1 - z^2 beta(z) with only nonzero-mean eigenspaces contributing; throws
// PoleError within pole_tol of a nonzero-mean frequency.
SeriesValue Mu0(const DirichletSpectrum &spectrum, cplx z, double pole_tol = 1e-8);

struct CorrectorResult
{
  std::array<Eigen::VectorXd, 2> chi;  // nodal, zero mean over the cell
  Eigen::Matrix2d a0;
};

// Periodic corrector from the exterior Neumann problem, harmonically
// extended into the inclusion.
CorrectorResult SolveCorrector(const Mesh &cell);

struct CellFunction
{
  Eigen::VectorXcd values;  // nodal on the cell mesh, 1 outside D
  cplx mean;                // integral over the cell
};

// Cell function with unit Dirichlet data on the inclusion boundary. When a
// spectrum is supplied, k within pole_tol of a nonzero-mean frequency throws
// PoleError.
CellFunction LambdaCell(const Mesh &cell, cplx k, const DirichletSpectrum *spectrum = nullptr,
                        double pole_tol = 1e-8);

struct DispersionReport
{
  std::vector<std::pair<double, double>> samples;  // (k, mu0)
  std::vector<double> poles;
  std::vector<double> zeros;
  std::vector<std::pair<double, double>> gaps;  // intervals with mu0 < 0
};

DispersionReport DispersionScan(const DirichletSpectrum &spectrum, double k_min, double k_max,
                                int n_samples);

struct EffectiveMedium
{
  InclusionShape shape;
  double cell_h = 0.0;
  std::shared_ptr<const Mesh> cell_mesh;
  std::string mesh_hash;
  Eigen::Matrix2d a0 = Eigen::Matrix2d::Identity();
  double theta = 0.0;  // |D|
  DirichletSpectrum spectrum;
  int n_modes = 0;
  std::array<Eigen::VectorXd, 2> chi;

  cplx Mu0(cplx z) const { return subwave::Mu0(spectrum, z).value; }
};

// Cell mesh, spectrum and corrector for the given inclusion.
EffectiveMedium BuildEffectiveMedium(const InclusionShape &shape, double cell_h, int n_modes);

}  // namespace subwave

#endif  // SUBWAVE_MICROCELL_HPP
