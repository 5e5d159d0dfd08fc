// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_RESONANCE_HPP
#define SUBWAVE_RESONANCE_HPP

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "subwave/helmholtz.hpp"
#include "subwave/microcell.hpp"

namespace subwave
{

class ResonanceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class SystemTag
{
  kEffective,
  kFine,
  kOracleMode
};

const char *ToString(SystemTag tag);

struct ResonanceProbe
{
  cplx z = 0.0;
  double indicator = 0.0;
  SystemTag tag = SystemTag::kEffective;
};

// Rectangle in the complex plane.
struct SearchBox
{
  double re_min = 0.1;
  double re_max = 1.0;
  double im_min = -0.5;
  double im_max = 0.05;

  static SearchBox Around(cplx center, double radius);
  bool Contains(cplx z, double margin = 0.0) const;
};

// Search sector Re z >= 0.1, -0.8 Re z <= Im z <= 0.05.
bool InSector(cplx z);

// Throws ResonanceError when the box reaches the branch cut (Re z < 0.1) or
// leaves the sector from above (Im z > 0.05), or is empty.
void ValidateBox(const SearchBox &box);

// Frequency-dependent system whose singular frequencies are resonances.
class ResonanceSystem
{
public:
  // Effective operator on a scene mesh: a0, mu0(z) in Omega, DtN(z) at r.
  static ResonanceSystem Effective(const EffectiveMedium &medium, std::shared_ptr<const Mesh> mesh,
                                   double r);
  // Heterogeneous operator with eps^2 in the inclusions.
  static ResonanceSystem Fine(std::shared_ptr<const Mesh> mesh, double epsilon, double r);
  // Transmission determinant of one angular mode of a disk with isotropic a0.
  static ResonanceSystem OracleMode(double a0, std::function<cplx(cplx)> mu0, double radius, int n);

  SystemTag tag() const { return tag_; }
  const std::string &label() const { return label_; }

  // Smallest singular value of the assembled matrix divided by its largest
  // diagonal modulus, from 5 inverse iterations on A^H A (A is complex
  // symmetric, so A^H solves reuse the factorisation). Factorisation failure
  // reports 0. For oracle modes the normalised determinant modulus.
  ResonanceProbe Probe(cplx z) const;

private:
  SystemTag tag_ = SystemTag::kEffective;
  std::string label_;
  std::shared_ptr<const HelmholtzOperator> op_;
  std::function<double(cplx)> oracle_;
};

// Disk transmission determinant a0 g J_n'(g R) H_n(z R) - z J_n(g R) H_n'(z R)
// with g = z sqrt(mu0(z) / a0); also returns the sum of the two term moduli.
cplx DiskModeDeterminant(double a0, const std::function<cplx(cplx)> &mu0, double radius, int n,
                         cplx z, double *scale = nullptr);

struct OracleRoot
{
  cplx z = 0.0;
  int n = 0;
  double residual = 0.0;  // |f_n| / scale at the root
};

// Roots of the mode-n determinant in the box by complex Newton from a
// seeds x seeds grid; diverging seeds are dropped and duplicates merged.
std::vector<OracleRoot> DiskModeOracle(double a0, const std::function<cplx(cplx)> &mu0,
                                       double radius, int n, const SearchBox &box,
                                       int seeds = 12);

struct ResonanceEntry
{
  cplx z = 0.0;
  double residual = 0.0;   // indicator at z
  double curvature = 0.0;  // five-point Laplacian of the indicator at z
};

struct ResonanceSet
{
  std::vector<ResonanceEntry> resonances;  // sorted by |z|
  SearchBox box;
  int grid = 0;
  std::string provenance;
};

struct SearchOptions
{
  int grid = 12;                 // grid x grid probes
  double refine_tolerance = 1e-6;
  double screen_fraction = 0.5;  // candidates must be below this times the grid median
  int max_refine_evaluations = 200;
  double simplex_tolerance = 1e-9;  // final simplex size relative to 1 + |z|
};

// Grid scan, Nelder-Mead refinement of log(indicator) from each screened
// local minimum, deduplication within the grid spacing.
ResonanceSet FindResonances(const ResonanceSystem &system, const SearchBox &box,
                            const SearchOptions &options = {});

// Re-searches each coarse resonance on a finer system within a box of the
// given half-width (grid x grid probes), keeping the hit nearest to it.
// Entries without a hit are dropped.
ResonanceSet RefineResonances(const ResonanceSet &coarse, const ResonanceSystem &fine,
                              double radius, const SearchOptions &options = {});

enum class LimitClass
{
  kEffectiveResonance,
  kZeroMeanEigenvalue,
  kNonzeroMeanEigenvalue
};

const char *ToString(LimitClass c);

struct LimitClassification
{
  LimitClass cls = LimitClass::kEffectiveResonance;
  cplx nearest = 0.0;
  double distance = 0.0;
  bool pathological = false;  // within pathological_radius of a nonzero-mean frequency
};

// Nearest point of the effective resonances and the Dirichlet frequencies.
LimitClassification ClassifyLimit(cplx z, const DirichletSpectrum &spectrum,
                                  const std::vector<cplx> &effective,
                                  double pathological_radius = 0.2);

struct DriftRow
{
  double epsilon = 0.0;
  bool censored = false;  // no resonance found in the box
  cplx nearest = 0.0;
  double distance = 0.0;
};

struct DriftStudy
{
  cplx z0 = 0.0;
  double radius = 0.0;
  std::vector<DriftRow> rows;
  int nonincreasing_steps = 0;  // consecutive uncensored pairs with distance not growing
  int compared_steps = 0;
};

// Nearest fine resonance to z0 in the box of the given radius for each eps;
// make_system builds the fine system for one eps.
DriftStudy RunDriftStudy(cplx z0, double radius, const std::vector<double> &eps_list,
                         const std::function<ResonanceSystem(double)> &make_system,
                         const SearchOptions &options = {});

// CSV "re,im,residual,provenance".
void WriteResonanceCsv(const ResonanceSet &set, const std::string &path);
// CSV "epsilon,censored,re,im,distance".
void WriteDriftCsv(const DriftStudy &study, const std::string &path);

}  // namespace subwave

#endif  // SUBWAVE_RESONANCE_HPP
