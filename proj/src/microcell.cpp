// SPDX-License-Identifier: Apache-2.0

#include "subwave/microcell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SparseCholesky>

#include "subwave/eigensolver.hpp"
#include "subwave/fem.hpp"
#include "subwave/linsolve.hpp"
#include "subwave/meshgen.hpp"

namespace subwave
{

namespace
{

using SpMat = Eigen::SparseMatrix<double>;

// Vertices all of whose triangles lie in the inclusion.
std::vector<int> InclusionInterior(const Mesh &cell)
{
  const std::size_t nv = cell.vertices.size();
  std::vector<char> touches_d(nv, 0), touches_other(nv, 0);
  for (std::size_t t = 0; t < cell.triangles.size(); ++t)
  {
    for (int v : cell.triangles[t])
    {
      (cell.regions[t] == RegionTag::kInclusion ? touches_d : touches_other)[v] = 1;
    }
  }
  std::vector<int> interior;
  for (std::size_t v = 0; v < nv; ++v)
  {
    if (touches_d[v] && !touches_other[v])
    {
      interior.push_back(static_cast<int>(v));
    }
  }
  return interior;
}

SpMat Restrict(const SpMat &a, const std::vector<int> &rows, const std::vector<int> &cols)
{
  std::vector<int> col_pos(a.cols(), -1), row_pos(a.rows(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    row_pos[rows[i]] = static_cast<int>(i);
  }
  for (std::size_t j = 0; j < cols.size(); ++j)
  {
    col_pos[cols[j]] = static_cast<int>(j);
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < a.outerSize(); ++c)
  {
    for (SpMat::InnerIterator it(a, c); it; ++it)
    {
      const int r = row_pos[it.row()], cc = col_pos[it.col()];
      if (r >= 0 && cc >= 0)
      {
        trip.emplace_back(r, cc, it.value());
      }
    }
  }
  SpMat out(rows.size(), cols.size());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double NearestPole(const DirichletSpectrum &s, cplx z, bool nonzero_only, int *index)
{
  double best = std::numeric_limits<double>::infinity();
  *index = -1;
  for (std::size_t j = 0; j < s.size(); ++j)
  {
    if (nonzero_only && s.classes[j] != ModeClass::kNonzeroMean)
    {
      continue;
    }
    const double lam = s.frequency(j);
    const double d = std::min(std::abs(z - lam), std::abs(z + lam));
    if (d < best)
    {
      best = d;
      *index = static_cast<int>(j);
    }
  }
  return best;
}

std::string FormatZ(cplx z)
{
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

}  // namespace

const char *ToString(ModeClass c)
{
  return c == ModeClass::kNonzeroMean ? "nonzero_mean" : "zero_mean";
}

const char *ToString(SigmaClass c)
{
  switch (c)
  {
    case SigmaClass::kNonzeroMean:
      return "in_sigma_D1";
    case SigmaClass::kZeroMean:
      return "in_sigma_D0";
    case SigmaClass::kOutside:
      return "outside";
  }
  return "?";
}

double DirichletSpectrum::frequency(std::size_t j) const { return std::sqrt(eigenvalues[j]); }

double DirichletSpectrum::MissingMeanMass() const
{
  double captured = 0.0;
  for (double m : means)
  {
    captured += m * m;
  }
  return std::max(0.0, total_mean_mass - captured);
}

DirichletSpectrum ComputeDirichletSpectrum(const Mesh &cell, int n_modes, double mean_tolerance)
{
  DirichletSpectrum s;
  const auto in_d = fem::RegionWeight(cell, [](RegionTag t) { return t == RegionTag::kInclusion; });
  s.inclusion_area = cell.RegionArea(RegionTag::kInclusion);
  const std::vector<int> interior = InclusionInterior(cell);
  if (interior.empty())
  {
    return s;
  }
  const SpMat k = fem::Stiffness(cell, in_d);
  const SpMat m = fem::Mass(cell, in_d);
  const SpMat kii = Restrict(k, interior, interior);
  const SpMat mii = Restrict(m, interior, interior);
  const Eigen::VectorXd m_ones = m * Eigen::VectorXd::Ones(cell.vertices.size());
  Eigen::VectorXd b(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i)
  {
    b[i] = m_ones[interior[i]];
  }
  Eigen::SimplicialLDLT<SpMat> mfac(mii);
  s.total_mean_mass = b.dot(mfac.solve(b));

  EigenPairs ep = SmallestEigenpairs(kii, mii, n_modes);
  const int nm = static_cast<int>(ep.values.size());
  s.max_residual = ep.max_residual;
  s.eigenvalues.assign(ep.values.data(), ep.values.data() + nm);
  s.means.resize(nm);
  for (int j = 0; j < nm; ++j)
  {
    // Deterministic sign: positive mean, or positive first significant entry.
    double mean = b.dot(ep.vectors.col(j));
    double sign = mean < 0.0 ? -1.0 : 1.0;
    if (std::abs(mean) <= mean_tolerance * std::sqrt(s.inclusion_area))
    {
      Eigen::Index imax;
      ep.vectors.col(j).cwiseAbs().maxCoeff(&imax);
      sign = ep.vectors(imax, j) < 0.0 ? -1.0 : 1.0;
    }
    ep.vectors.col(j) *= sign;
    s.means[j] = sign * mean;
  }
  const Eigen::MatrixXd gram = ep.vectors.transpose() * (mii * ep.vectors);
  s.max_gram_error = (gram - Eigen::MatrixXd::Identity(nm, nm)).cwiseAbs().maxCoeff();

  s.eigenfunctions = Eigen::MatrixXd::Zero(cell.vertices.size(), nm);
  for (std::size_t i = 0; i < interior.size(); ++i)
  {
    s.eigenfunctions.row(interior[i]) = ep.vectors.row(i);
  }

  // Group numerically repeated eigenvalues and classify each eigenspace by
  // the projection of 1 onto it.
  s.eigenspace.assign(nm, 0);
  s.classes.assign(nm, ModeClass::kZeroMean);
  int start = 0, id = 0;
  for (int j = 1; j <= nm; ++j)
  {
    if (j == nm || s.eigenvalues[j] - s.eigenvalues[j - 1] > 1e-8 * s.eigenvalues[j])
    {
      double proj = 0.0;
      for (int i = start; i < j; ++i)
      {
        proj += s.means[i] * s.means[i];
      }
      const ModeClass c = std::sqrt(proj) > mean_tolerance * std::sqrt(s.inclusion_area)
                              ? ModeClass::kNonzeroMean
                              : ModeClass::kZeroMean;
      for (int i = start; i < j; ++i)
      {
        s.classes[i] = c;
        s.eigenspace[i] = id;
      }
      ++id;
      start = j;
    }
  }
  return s;
}

SigmaClassification ClassifySigma(const DirichletSpectrum &spectrum, cplx z, double tol)
{
  SigmaClassification out;
  out.distance = NearestPole(spectrum, z, false, &out.nearest);
  if (out.nearest >= 0 && out.distance <= tol)
  {
    out.cls = spectrum.classes[out.nearest] == ModeClass::kNonzeroMean ? SigmaClass::kNonzeroMean
                                                                        : SigmaClass::kZeroMean;
  }
  return out;
}

namespace
{

SeriesValue Series(const DirichletSpectrum &s, cplx z, bool nonzero_only, double pole_tol)
{
  int idx;
  const double d = NearestPole(s, z, nonzero_only, &idx);
  if (idx >= 0 && d < pole_tol)
  {
    throw PoleError("z = " + FormatZ(z) + " lies within " + std::to_string(d) +
                    " of the cell frequency " + std::to_string(s.frequency(idx)));
  }
  const cplx z2 = z * z;
  cplx sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
  {
    if (nonzero_only && s.classes[j] != ModeClass::kNonzeroMean)
    {
      continue;
    }
    sum += s.means[j] * s.means[j] / (z2 - s.eigenvalues[j]);
  }
  SeriesValue v{sum, 0.0};
  const double missing = s.MissingMeanMass();
  if (missing > 0.0 && !s.empty())
  {
    const double gap = s.eigenvalues.back() - std::norm(z);
    v.tail = gap > 0.0 ? missing / gap : std::numeric_limits<double>::infinity();
  }
  return v;
}

}  // namespace

SeriesValue Beta(const DirichletSpectrum &spectrum, cplx z, double pole_tol)
{
  return Series(spectrum, z, false, pole_tol);
}

SeriesValue Mu0(const DirichletSpectrum &spectrum, cplx z, double pole_tol)
{
  SeriesValue b = Series(spectrum, z, true, pole_tol);
  return {1.0 - z * z * b.value, std::norm(z) * b.tail};
}

CorrectorResult SolveCorrector(const Mesh &cell)
{
  CorrectorResult out;
  const std::size_t nv = cell.vertices.size();
  out.chi[0] = Eigen::VectorXd::Zero(nv);
  out.chi[1] = Eigen::VectorXd::Zero(nv);
  const auto in_matrix = fem::RegionWeight(cell, [](RegionTag t) { return t == RegionTag::kMatrix; });
  const auto in_d = fem::RegionWeight(cell, [](RegionTag t) { return t == RegionTag::kInclusion; });
  const double matrix_area = cell.RegionArea(RegionTag::kMatrix);

  int ncls = 0;
  const std::vector<int> cls = fem::PeriodicClasses(cell, &ncls);
  // Compact the classes touched by matrix triangles.
  std::vector<int> dof_of_class(ncls, -1);
  int ndof = 0;
  for (std::size_t t = 0; t < cell.triangles.size(); ++t)
  {
    if (in_matrix[t] == 0.0)
    {
      continue;
    }
    for (int v : cell.triangles[t])
    {
      if (dof_of_class[cls[v]] < 0)
      {
        dof_of_class[cls[v]] = ndof++;
      }
    }
  }
  if (ndof == 0)
  {
    throw MeshError("corrector: cell mesh has no matrix region");
  }

  // Periodic stiffness and right-hand sides -int e_j . grad N_i; dof 0 pinned.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ndof, 2);
  for (std::size_t t = 0; t < cell.triangles.size(); ++t)
  {
    if (in_matrix[t] == 0.0)
    {
      continue;
    }
    const fem::Element e = fem::MakeElement(cell, t);
    const auto &tri = cell.triangles[t];
    for (int i = 0; i < 3; ++i)
    {
      const int di = dof_of_class[cls[tri[i]]];
      rhs.row(di) -= e.area * e.grad[i].transpose();
      for (int j = 0; j < 3; ++j)
      {
        const int dj = dof_of_class[cls[tri[j]]];
        if (di > 0 && dj > 0)
        {
          trip.emplace_back(di - 1, dj - 1, e.area * e.grad[i].dot(e.grad[j]));
        }
      }
    }
  }
  Eigen::MatrixXd sol = Eigen::MatrixXd::Zero(ndof, 2);
  if (ndof > 1)
  {
    SpMat kp(ndof - 1, ndof - 1);
    kp.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(kp);
    if (ldlt.info() != Eigen::Success)
    {
      throw SolverError("corrector: singular periodic system");
    }
    sol.bottomRows(ndof - 1) = ldlt.solve(rhs.bottomRows(ndof - 1));
  }

  std::vector<char> known(nv, 0);
  for (std::size_t v = 0; v < nv; ++v)
  {
    const int d = dof_of_class[cls[v]];
    if (d >= 0)
    {
      out.chi[0][v] = sol(d, 0);
      out.chi[1][v] = sol(d, 1);
      known[v] = 1;
    }
  }

  // Harmonic extension into the inclusion.
  const std::vector<int> interior = InclusionInterior(cell);
  if (!interior.empty())
  {
    std::vector<int> boundary;
    for (std::size_t v = 0; v < nv; ++v)
    {
      if (known[v])
      {
        boundary.push_back(static_cast<int>(v));
      }
    }
    const SpMat kd = fem::Stiffness(cell, in_d);
    const SpMat kii = Restrict(kd, interior, interior);
    const SpMat kib = Restrict(kd, interior, boundary);
    Eigen::SimplicialLDLT<SpMat> ldlt(kii);
    for (int c = 0; c < 2; ++c)
    {
      Eigen::VectorXd xb(boundary.size());
      for (std::size_t i = 0; i < boundary.size(); ++i)
      {
        xb[i] = out.chi[c][boundary[i]];
      }
      const Eigen::VectorXd xi = ldlt.solve(-(kib * xb));
      for (std::size_t i = 0; i < interior.size(); ++i)
      {
        out.chi[c][interior[i]] = xi[i];
      }
    }
  }

  // Zero cell mean.
  const SpMat m_all = fem::Mass(cell, std::vector<double>(cell.triangles.size(), 1.0));
  const Eigen::VectorXd m_ones = m_all * Eigen::VectorXd::Ones(nv);
  const double cell_area = m_ones.sum();
  for (int c = 0; c < 2; ++c)
  {
    const double mean = m_ones.dot(out.chi[c]) / cell_area;
    out.chi[c].array() -= mean;
  }

  // A0_ij = int_{Y \ D} (delta_ij + d_i chi_j).
  out.a0 = matrix_area * Eigen::Matrix2d::Identity();
  for (std::size_t t = 0; t < cell.triangles.size(); ++t)
  {
    if (in_matrix[t] == 0.0)
    {
      continue;
    }
    const fem::Element e = fem::MakeElement(cell, t);
    const auto &tri = cell.triangles[t];
    for (int j = 0; j < 2; ++j)
    {
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      for (int i = 0; i < 3; ++i)
      {
        g += out.chi[j][tri[i]] * e.grad[i];
      }
      out.a0.col(j) += e.area * g;
    }
  }
  return out;
}

CellFunction LambdaCell(const Mesh &cell, cplx k, const DirichletSpectrum *spectrum,
                        double pole_tol)
{
  if (spectrum)
  {
    int idx;
    const double d = NearestPole(*spectrum, k, true, &idx);
    if (idx >= 0 && d < pole_tol)
    {
      throw PoleError("resonant cell: k = " + FormatZ(k) + " lies within " + std::to_string(d) +
                      " of the nonzero-mean cell frequency " +
                      std::to_string(spectrum->frequency(idx)));
    }
  }
  const std::size_t nv = cell.vertices.size();
  CellFunction out;
  out.values = Eigen::VectorXcd::Ones(nv);
  const std::vector<int> interior = InclusionInterior(cell);
  const auto in_d = fem::RegionWeight(cell, [](RegionTag t) { return t == RegionTag::kInclusion; });
  if (!interior.empty())
  {
    const SpMat kd = fem::Stiffness(cell, in_d);
    const SpMat md = fem::Mass(cell, in_d);
    const SpMat kii = Restrict(kd, interior, interior);
    const SpMat mii = Restrict(md, interior, interior);
    const Eigen::VectorXd m_ones = md * Eigen::VectorXd::Ones(nv);
    Eigen::VectorXcd b(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i)
    {
      b[i] = k * k * m_ones[interior[i]];
    }
    const Eigen::SparseMatrix<cplx> a = kii.cast<cplx>() - (k * k) * mii.cast<cplx>();
    SparseLu<cplx> lu(a);
    const Eigen::VectorXcd v = lu.Solve(b);
    for (std::size_t i = 0; i < interior.size(); ++i)
    {
      out.values[interior[i]] += v[i];
    }
  }
  const SpMat m_all = fem::Mass(cell, std::vector<double>(cell.triangles.size(), 1.0));
  out.mean = (m_all * Eigen::VectorXd::Ones(nv)).cast<cplx>().dot(out.values);
  return out;
}

DispersionReport DispersionScan(const DirichletSpectrum &spectrum, double k_min, double k_max,
                                int n_samples)
{
  if (!(k_min >= 0.0 && k_max > k_min) || n_samples < 2)
  {
    throw std::invalid_argument("dispersion scan: need 0 <= k_min < k_max and >= 2 samples");
  }
  DispersionReport rep;
  int last_space = -1;
  for (std::size_t j = 0; j < spectrum.size(); ++j)
  {
    if (spectrum.classes[j] != ModeClass::kNonzeroMean || spectrum.eigenspace[j] == last_space)
    {
      continue;
    }
    last_space = spectrum.eigenspace[j];
    const double lam = spectrum.frequency(j);
    if (lam > k_min && lam < k_max)
    {
      rep.poles.push_back(lam);
    }
  }
  auto mu = [&](double k) { return Mu0(spectrum, k, 0.0).value.real(); };
  for (int i = 0; i < n_samples; ++i)
  {
    const double k = k_min + (k_max - k_min) * i / (n_samples - 1);
    bool near_pole = false;
    for (double p : rep.poles)
    {
      near_pole = near_pole || std::abs(k - p) < 1e-8;
    }
    if (!near_pole)
    {
      rep.samples.emplace_back(k, mu(k));
    }
  }
  std::vector<double> breaks{k_min};
  breaks.insert(breaks.end(), rep.poles.begin(), rep.poles.end());
  breaks.push_back(k_max);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
  {
    const double a = breaks[i], b = breaks[i + 1];
    const double pad = 1e-12 * std::max(1.0, b);
    double lo = (i > 0) ? a + pad : a;
    double hi = (i + 2 < breaks.size()) ? b - pad : b;
    const double flo = mu(lo), fhi = mu(hi);
    if (flo < 0.0 && fhi > 0.0)
    {
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it)
      {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
        {
          break;
        }
        (mu(mid) < 0.0 ? lo : hi) = mid;
      }
      const double zero = std::abs(mu(lo)) < std::abs(mu(hi)) ? lo : hi;
      rep.zeros.push_back(zero);
      rep.gaps.emplace_back(a, zero);
    }
    else if (fhi < 0.0)
    {
      rep.gaps.emplace_back(a, b);
    }
  }
  return rep;
}

EffectiveMedium BuildEffectiveMedium(const InclusionShape &shape, double cell_h, int n_modes)
{
  EffectiveMedium med;
  med.shape = shape;
  med.cell_h = cell_h;
  auto mesh = std::make_shared<Mesh>(MeshUnitCell(shape, cell_h));
  med.mesh_hash = MeshHash(*mesh);
  med.cell_mesh = mesh;
  med.theta = mesh->RegionArea(RegionTag::kInclusion);
  med.spectrum = ComputeDirichletSpectrum(*mesh, n_modes);
  med.n_modes = static_cast<int>(med.spectrum.size());
  CorrectorResult cr = SolveCorrector(*mesh);
  med.a0 = cr.a0;
  med.chi = std::move(cr.chi);
  return med;
}

}  // namespace subwave
