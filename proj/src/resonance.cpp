// SPDX-License-Identifier: Apache-2.0

#include "subwave/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "subwave/linsolve.hpp"
#include "subwave/parallel.hpp"
#include "subwave/special.hpp"

namespace subwave
{

namespace
{

constexpr double kSectorRe = 0.1;
constexpr double kSectorImTop = 0.05;
constexpr double kSectorSlope = 0.8;
constexpr int kInverseIterations = 5;

Eigen::VectorXcd StartVector(Eigen::Index n)
{
  Eigen::VectorXcd x(n);
  std::uint64_t s = 0x9e3779b97f4a7c15ULL;
  auto next = [&]
  {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  };
  for (Eigen::Index i = 0; i < n; ++i)
  {
    const double re = next();
    x[i] = cplx(re, next());
  }
  return x.normalized();
}

double SmallestSingularValue(const Eigen::SparseMatrix<cplx> &a)
{
  double scale = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    scale = std::max(scale, std::abs(a.coeff(i, i)));
  }
  SparseLu<cplx> lu;
  try
  {
    lu.Factor(a);
  }
  catch (const SolverError &)
  {
    return 0.0;
  }
  Eigen::VectorXcd x = StartVector(a.rows());
  for (int it = 0; it < kInverseIterations; ++it)
  {
    // A^-H x = conj(A^-1 conj(x)) for complex symmetric A.
    const Eigen::VectorXcd v = lu.Solve(x.conjugate()).conjugate();
    const Eigen::VectorXcd w = lu.Solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw) || nw == 0.0)
    {
      return 0.0;
    }
    x = w / nw;
  }
  const double ny = lu.Solve(x).norm();
  if (!std::isfinite(ny) || ny == 0.0)
  {
    return 0.0;
  }
  return 1.0 / (ny * scale);
}

struct NelderMeadData
{
  const ResonanceSystem *system;
};

double LogIndicator(const gsl_vector *v, void *params)
{
  const auto *d = static_cast<NelderMeadData *>(params);
  const cplx z(gsl_vector_get(v, 0), gsl_vector_get(v, 1));
  if (!InSector(z))
  {
    return 1e3;
  }
  try
  {
    return std::log(d->system->Probe(z).indicator + 1e-300);
  }
  catch (const std::exception &)
  {
    return 1e3;
  }
}

cplx Refine(const ResonanceSystem &system, cplx start, double step_re, double step_im,
            int max_evaluations, double tolerance)
{
  static const bool quiet = [] { gsl_set_error_handler_off(); return true; }();
  (void)quiet;
  NelderMeadData data{&system};
  gsl_multimin_function fn;
  fn.n = 2;
  fn.f = &LogIndicator;
  fn.params = &data;
  gsl_vector *x = gsl_vector_alloc(2);
  gsl_vector *step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, start.real());
  gsl_vector_set(x, 1, start.imag());
  gsl_vector_set(step, 0, step_re);
  gsl_vector_set(step, 1, step_im);
  gsl_multimin_fminimizer *s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  const double target = tolerance * (1.0 + std::abs(start));
  for (int it = 0; it < max_evaluations; ++it)
  {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
    {
      break;
    }
    if (gsl_multimin_fminimizer_size(s) < target)
    {
      break;
    }
  }
  const cplx best(gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1));
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

double Median(std::vector<double> v)
{
  if (v.empty())
  {
    return 0.0;
  }
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

const char *ToString(SystemTag tag)
{
  switch (tag)
  {
    case SystemTag::kEffective:
      return "effective";
    case SystemTag::kFine:
      return "fine";
    case SystemTag::kOracleMode:
      return "oracle_mode";
  }
  return "?";
}

const char *ToString(LimitClass c)
{
  switch (c)
  {
    case LimitClass::kEffectiveResonance:
      return "effective_resonance";
    case LimitClass::kZeroMeanEigenvalue:
      return "zero_mean_eigenvalue";
    case LimitClass::kNonzeroMeanEigenvalue:
      return "nonzero_mean_eigenvalue";
  }
  return "?";
}

SearchBox SearchBox::Around(cplx center, double radius)
{
  return {center.real() - radius, center.real() + radius, center.imag() - radius,
          center.imag() + radius};
}

bool SearchBox::Contains(cplx z, double margin) const
{
  return z.real() >= re_min - margin && z.real() <= re_max + margin &&
         z.imag() >= im_min - margin && z.imag() <= im_max + margin;
}

bool InSector(cplx z)
{
  return z.real() >= kSectorRe && z.imag() <= kSectorImTop &&
         z.imag() >= -kSectorSlope * z.real();
}

void ValidateBox(const SearchBox &box)
{
  if (!(box.re_max > box.re_min) || !(box.im_max > box.im_min))
  {
    throw ResonanceError("search box is empty");
  }
  if (box.re_min < kSectorRe)
  {
    throw ResonanceError("search box reaches the branch cut (Re z < 0.1)");
  }
  if (box.im_max > kSectorImTop)
  {
    throw ResonanceError("search box leaves the sector (Im z > 0.05)");
  }
  if (box.im_max < -kSectorSlope * box.re_max)
  {
    throw ResonanceError("search box lies outside the sector Im z >= -0.8 Re z");
  }
}

ResonanceSystem ResonanceSystem::Effective(const EffectiveMedium &medium,
                                           std::shared_ptr<const Mesh> mesh, double r)
{
  auto spectrum = std::make_shared<DirichletSpectrum>(medium.spectrum);
  spectrum->eigenfunctions.resize(0, 0);
  ResonanceSystem s;
  s.tag_ = SystemTag::kEffective;
  s.label_ = "effective";
  s.op_ = std::make_shared<HelmholtzOperator>(HelmholtzOperator::Effective(
      std::move(mesh), medium.a0, [spectrum](cplx z) { return Mu0(*spectrum, z, 1e-6).value; }, r));
  return s;
}

ResonanceSystem ResonanceSystem::Fine(std::shared_ptr<const Mesh> mesh, double epsilon, double r)
{
  ResonanceSystem s;
  s.tag_ = SystemTag::kFine;
  std::ostringstream os;
  os << "fine(eps=" << epsilon << ")";
  s.label_ = os.str();
  s.op_ = std::make_shared<HelmholtzOperator>(HelmholtzOperator::Fine(std::move(mesh), epsilon, r));
  return s;
}

ResonanceSystem ResonanceSystem::OracleMode(double a0, std::function<cplx(cplx)> mu0, double radius,
                                            int n)
{
  ResonanceSystem s;
  s.tag_ = SystemTag::kOracleMode;
  s.label_ = "oracle_mode(" + std::to_string(n) + ")";
  s.oracle_ = [a0, mu0 = std::move(mu0), radius, n](cplx z)
  {
    double scale = 0.0;
    const cplx f = DiskModeDeterminant(a0, mu0, radius, n, z, &scale);
    return scale > 0.0 ? std::abs(f) / scale : 0.0;
  };
  return s;
}

ResonanceProbe ResonanceSystem::Probe(cplx z) const
{
  ResonanceProbe p;
  p.z = z;
  p.tag = tag_;
  if (oracle_)
  {
    p.indicator = oracle_(z);
    return p;
  }
  p.indicator = SmallestSingularValue(op_->Assemble(z));
  return p;
}

cplx DiskModeDeterminant(double a0, const std::function<cplx(cplx)> &mu0, double radius, int n,
                         cplx z, double *scale)
{
  const int m = std::abs(n);
  const cplx g = z * std::sqrt(mu0(z) / a0);
  const cplx t1 = a0 * g * special::BesselJPrime(m, g * radius) * special::Hankel1(m, z * radius);
  const cplx t2 = z * special::BesselJ(m, g * radius) * special::Hankel1Prime(m, z * radius);
  if (scale)
  {
    *scale = std::abs(t1) + std::abs(t2);
  }
  return t1 - t2;
}

std::vector<OracleRoot> DiskModeOracle(double a0, const std::function<cplx(cplx)> &mu0,
                                       double radius, int n, const SearchBox &box, int seeds)
{
  ValidateBox(box);
  std::vector<OracleRoot> roots;
  auto f = [&](cplx z) { return DiskModeDeterminant(a0, mu0, radius, n, z); };
  for (int i = 0; i < seeds; ++i)
  {
    for (int j = 0; j < seeds; ++j)
    {
      cplx z(box.re_min + (box.re_max - box.re_min) * (i + 0.5) / seeds,
             box.im_min + (box.im_max - box.im_min) * (j + 0.5) / seeds);
      bool converged = false;
      try
      {
        for (int it = 0; it < 60; ++it)
        {
          const double d = 1e-6 * std::max(1.0, std::abs(z));
          const cplx fz = f(z);
          const cplx df = (f(z + d) - f(z - d)) / (2.0 * d);
          if (df == cplx(0.0))
          {
            break;
          }
          const cplx step = fz / df;
          z -= step;
          if (!InSector(z) || std::abs(z) > 4.0 * std::abs(cplx(box.re_max, box.im_min)))
          {
            break;
          }
          if (std::abs(step) < 1e-14 * std::abs(z))
          {
            converged = true;
            break;
          }
        }
      }
      catch (const std::exception &)
      {
        continue;
      }
      if (!converged || !box.Contains(z))
      {
        continue;
      }
      double scale = 0.0;
      const cplx fz = DiskModeDeterminant(a0, mu0, radius, n, z, &scale);
      const double res = scale > 0.0 ? std::abs(fz) / scale : std::abs(fz);
      if (!(res < 1e-10))
      {
        continue;
      }
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const OracleRoot &r)
                                   { return std::abs(r.z - z) < 1e-8 * (1.0 + std::abs(z)); });
      if (!dup)
      {
        roots.push_back({z, n, res});
      }
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const OracleRoot &a, const OracleRoot &b) { return std::abs(a.z) < std::abs(b.z); });
  return roots;
}

ResonanceSet FindResonances(const ResonanceSystem &system, const SearchBox &box,
                            const SearchOptions &options)
{
  ValidateBox(box);
  const int n = options.grid;
  if (n < 3)
  {
    throw ResonanceError("resonance grid must be at least 3 x 3");
  }
  const double dx = (box.re_max - box.re_min) / (n - 1);
  const double dy = (box.im_max - box.im_min) / (n - 1);
  auto point = [&](int i, int j) { return cplx(box.re_min + dx * i, box.im_min + dy * j); };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> value(static_cast<std::size_t>(n) * n, nan);
  ParallelFor(n * n,
              [&](int idx)
              {
                const cplx z = point(idx / n, idx % n);
                if (InSector(z))
                {
                  value[idx] = system.Probe(z).indicator;
                }
              });

  std::vector<double> finite;
  for (double v : value)
  {
    if (std::isfinite(v))
    {
      finite.push_back(v);
    }
  }
  const double screen = options.screen_fraction * Median(finite);

  std::vector<int> candidates;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      const int idx = i * n + j;
      const double v = value[idx];
      if (!std::isfinite(v) || !(v < screen))
      {
        continue;
      }
      bool minimum = true;
      for (int a = -1; a <= 1 && minimum; ++a)
      {
        for (int b = -1; b <= 1; ++b)
        {
          const int ii = i + a, jj = j + b;
          if ((a == 0 && b == 0) || ii < 0 || jj < 0 || ii >= n || jj >= n)
          {
            continue;
          }
          const int o = ii * n + jj;
          const double w = value[o];
          if (std::isfinite(w) && (w < v || (w == v && o < idx)))
          {
            minimum = false;
            break;
          }
        }
      }
      if (minimum)
      {
        candidates.push_back(idx);
      }
    }
  }

  std::vector<ResonanceEntry> found(candidates.size());
  std::vector<char> keep(candidates.size(), 0);
  ParallelFor(static_cast<int>(candidates.size()),
              [&](int c)
              {
                const int idx = candidates[c];
                const cplx z =
                    Refine(system, point(idx / n, idx % n), 0.5 * dx, 0.5 * dy,
                           options.max_refine_evaluations, options.simplex_tolerance);
                if (!box.Contains(z) || !InSector(z))
                {
                  return;
                }
                const double f0 = system.Probe(z).indicator;
                if (!(f0 < options.refine_tolerance))
                {
                  return;
                }
                const double d = 1e-3 * std::min(dx, dy);
                double lap = -4.0 * f0;
                for (const cplx e : {cplx(d, 0.0), cplx(-d, 0.0), cplx(0.0, d), cplx(0.0, -d)})
                {
                  lap += system.Probe(z + e).indicator;
                }
                found[c] = {z, f0, lap / (d * d)};
                keep[c] = 1;
              });

  std::vector<ResonanceEntry> refined;
  for (std::size_t c = 0; c < found.size(); ++c)
  {
    if (keep[c])
    {
      refined.push_back(found[c]);
    }
  }
  std::stable_sort(refined.begin(), refined.end(),
                   [](const ResonanceEntry &a, const ResonanceEntry &b) { return a.residual < b.residual; });
  ResonanceSet set;
  set.box = box;
  set.grid = n;
  set.provenance = system.label();
  const double spacing = std::min(dx, dy);
  for (const auto &e : refined)
  {
    const bool dup = std::any_of(set.resonances.begin(), set.resonances.end(),
                                 [&](const ResonanceEntry &r) { return std::abs(r.z - e.z) < spacing; });
    if (!dup)
    {
      set.resonances.push_back(e);
    }
  }
  std::stable_sort(set.resonances.begin(), set.resonances.end(),
                   [](const ResonanceEntry &a, const ResonanceEntry &b)
                   { return std::abs(a.z) < std::abs(b.z); });
  return set;
}

ResonanceSet RefineResonances(const ResonanceSet &coarse, const ResonanceSystem &fine,
                              double radius, const SearchOptions &options)
{
  ResonanceSet out;
  out.box = coarse.box;
  out.grid = options.grid;
  out.provenance = fine.label() + " refined from " + coarse.provenance;
  for (const auto &e : coarse.resonances)
  {
    const ResonanceSet local = FindResonances(fine, SearchBox::Around(e.z, radius), options);
    const ResonanceEntry *best = nullptr;
    for (const auto &r : local.resonances)
    {
      if (!best || std::abs(r.z - e.z) < std::abs(best->z - e.z))
      {
        best = &r;
      }
    }
    if (best && coarse.box.Contains(best->z))
    {
      out.resonances.push_back(*best);
    }
  }
  std::stable_sort(out.resonances.begin(), out.resonances.end(),
                   [](const ResonanceEntry &a, const ResonanceEntry &b)
                   { return std::abs(a.z) < std::abs(b.z); });
  return out;
}

LimitClassification ClassifyLimit(cplx z, const DirichletSpectrum &spectrum,
                                  const std::vector<cplx> &effective, double pathological_radius)
{
  LimitClassification out;
  out.distance = std::numeric_limits<double>::infinity();
  double nonzero_mean_distance = std::numeric_limits<double>::infinity();
  for (const cplx e : effective)
  {
    const double d = std::abs(z - e);
    if (d < out.distance)
    {
      out = {LimitClass::kEffectiveResonance, e, d, false};
    }
  }
  for (std::size_t j = 0; j < spectrum.size(); ++j)
  {
    const cplx lam = spectrum.frequency(j);
    const double d = std::abs(z - lam);
    const bool nonzero = spectrum.classes[j] == ModeClass::kNonzeroMean;
    if (nonzero)
    {
      nonzero_mean_distance = std::min(nonzero_mean_distance, d);
    }
    if (d < out.distance)
    {
      out = {nonzero ? LimitClass::kNonzeroMeanEigenvalue : LimitClass::kZeroMeanEigenvalue, lam, d,
             false};
    }
  }
  out.pathological = nonzero_mean_distance <= pathological_radius;
  return out;
}

DriftStudy RunDriftStudy(cplx z0, double radius, const std::vector<double> &eps_list,
                         const std::function<ResonanceSystem(double)> &make_system,
                         const SearchOptions &options)
{
  DriftStudy study;
  study.z0 = z0;
  study.radius = radius;
  const SearchBox box = SearchBox::Around(z0, radius);
  ValidateBox(box);
  for (double eps : eps_list)
  {
    DriftRow row;
    row.epsilon = eps;
    const ResonanceSet set = FindResonances(make_system(eps), box, options);
    if (set.resonances.empty())
    {
      row.censored = true;
    }
    else
    {
      row.distance = std::numeric_limits<double>::infinity();
      for (const auto &e : set.resonances)
      {
        const double d = std::abs(e.z - z0);
        if (d < row.distance)
        {
          row.distance = d;
          row.nearest = e.z;
        }
      }
    }
    study.rows.push_back(row);
  }
  for (std::size_t i = 1; i < study.rows.size(); ++i)
  {
    const auto &a = study.rows[i - 1], &b = study.rows[i];
    if (a.censored || b.censored)
    {
      continue;
    }
    ++study.compared_steps;
    if (b.distance <= a.distance)
    {
      ++study.nonincreasing_steps;
    }
  }
  return study;
}

void WriteResonanceCsv(const ResonanceSet &set, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  os << "re,im,residual,provenance\n" << std::setprecision(15);
  for (const auto &e : set.resonances)
  {
    os << e.z.real() << "," << e.z.imag() << "," << e.residual << "," << set.provenance << "\n";
  }
}

void WriteDriftCsv(const DriftStudy &study, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  os << "epsilon,censored,re,im,distance\n" << std::setprecision(15);
  for (const auto &r : study.rows)
  {
    os << r.epsilon << "," << (r.censored ? 1 : 0) << "," << r.nearest.real() << ","
       << r.nearest.imag() << "," << r.distance << "\n";
  }
}

}  // namespace subwave
