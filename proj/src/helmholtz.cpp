// SPDX-License-Identifier: Apache-2.0

#include "subwave/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "subwave/fem.hpp"
#include "subwave/linsolve.hpp"
#include "subwave/special.hpp"

namespace subwave
{

namespace
{

constexpr cplx kI(0.0, 1.0);
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// int_0^1 (1 - s) exp(x s) ds.
cplx HatMoment(cplx x)
{
  if (std::abs(x) < 0.5)
  {
    cplx term = 0.5, sum = 0.0;
    for (int k = 0; k < 30; ++k)
    {
      sum += term;
      term *= x / static_cast<double>(k + 3);
    }
    return sum;
  }
  return (std::exp(x) - 1.0 - x) / (x * x);
}

bool InOmega(RegionTag t) { return t != RegionTag::kExterior; }

// Fourier coefficients (n = -N..N) of samples f_j = f(2 pi j / M).
std::vector<cplx> Dft(const std::vector<cplx> &f, int n_modes)
{
  const int m = static_cast<int>(f.size());
  std::vector<cplx> c(2 * n_modes + 1, 0.0);
  for (int n = -n_modes; n <= n_modes; ++n)
  {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j)
    {
      s += f[j] * std::polar(1.0, -kTwoPi * static_cast<double>((static_cast<long>(n) * j) % m) / m);
    }
    c[n + n_modes] = s / static_cast<double>(m);
  }
  return c;
}

}  // namespace

IncidentWave IncidentWave::Plane(double k, const Point &direction)
{
  if (!(k > 0.0))
  {
    throw std::invalid_argument("incident wave: wavenumber must be positive");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-14)
  {
    throw std::invalid_argument("incident wave: direction must have unit norm");
  }
  IncidentWave w;
  w.kind = Kind::kPlane;
  w.direction = direction;
  w.k = k;
  return w;
}

IncidentWave IncidentWave::PointSource(double k, const Point &source)
{
  if (!(k > 0.0))
  {
    throw std::invalid_argument("incident wave: wavenumber must be positive");
  }
  IncidentWave w;
  w.kind = Kind::kPointSource;
  w.source = source;
  w.k = k;
  return w;
}

cplx IncidentWave::Value(const Point &x, cplx z) const
{
  if (kind == Kind::kPlane)
  {
    return std::exp(kI * z * direction.dot(x));
  }
  const double rho = (x - source).norm();
  return 0.25 * kI * special::Hankel1(0, z * rho);
}

Eigen::Vector2cd IncidentWave::Gradient(const Point &x, cplx z) const
{
  if (kind == Kind::kPlane)
  {
    return (kI * z * std::exp(kI * z * direction.dot(x))) * direction.cast<cplx>();
  }
  const Point d = x - source;
  const double rho = d.norm();
  const cplx radial = -0.25 * kI * z * special::Hankel1(1, z * rho);
  return (radial / rho) * d.cast<cplx>();
}

int DefaultDtnModes(double r, cplx z) { return static_cast<int>(std::ceil(std::abs(z) * r)) + 15; }

DtnOperator BuildDtn(double r, cplx z, int n_modes)
{
  if (!(r > 0.0))
  {
    throw std::invalid_argument("DtN: radius must be positive");
  }
  if (z.real() == 0.0 && z.imag() <= 0.0)
  {
    throw std::domain_error("DtN: z lies on the branch cut (negative imaginary axis)");
  }
  DtnOperator d;
  d.r = r;
  d.z = z;
  d.n_modes = n_modes;
  const std::vector<cplx> logd = special::Hankel1LogDerivativeSequence(n_modes, z * r);
  d.coefficients.resize(n_modes + 1);
  for (int n = 0; n <= n_modes; ++n)
  {
    d.coefficients[n] = logd[n] / r;
  }
  return d;
}

Eigen::MatrixXcd CircleTrace::FourierMoments(int n_modes) const
{
  const int nb = static_cast<int>(nodes.size());
  Eigen::MatrixXcd f(nb, 2 * n_modes + 1);
  for (int i = 0; i < nb; ++i)
  {
    const double prev = angles[(i + nb - 1) % nb], next = angles[(i + 1) % nb];
    const double hl = std::fmod(angles[i] - prev + 2.0 * kTwoPi, kTwoPi);
    const double hr = std::fmod(next - angles[i] + 2.0 * kTwoPi, kTwoPi);
    for (int n = -n_modes; n <= n_modes; ++n)
    {
      const double dn = static_cast<double>(n);
      f(i, n + n_modes) = std::polar(1.0, dn * angles[i]) *
                          (hl * HatMoment(-kI * dn * hl) + hr * HatMoment(kI * dn * hr));
    }
  }
  return f;
}

CircleTrace ExtractCircleTrace(const Mesh &mesh, double r)
{
  CircleTrace tr;
  tr.r = r;
  std::vector<int> nodes;
  for (std::size_t e = 0; e < mesh.edges.size(); ++e)
  {
    if (mesh.edge_tags[e] == BoundaryTag::kTruncationCircle)
    {
      nodes.push_back(mesh.edges[e][0]);
      nodes.push_back(mesh.edges[e][1]);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.size() < 3)
  {
    throw MeshError("mesh has no truncation circle");
  }
  std::vector<std::pair<double, int>> by_angle;
  for (int v : nodes)
  {
    const Point &p = mesh.vertices[v];
    if (std::abs(p.norm() - r) > 1e-9 * r)
    {
      throw MeshError("truncation-circle vertex off the circle of radius " + std::to_string(r));
    }
    double a = std::atan2(p.y(), p.x());
    if (a < 0.0)
    {
      a += kTwoPi;
    }
    by_angle.emplace_back(a, v);
  }
  std::sort(by_angle.begin(), by_angle.end());
  for (const auto &[a, v] : by_angle)
  {
    tr.angles.push_back(a);
    tr.nodes.push_back(v);
  }
  return tr;
}

Eigen::MatrixXcd DtnBlock(const CircleTrace &trace, const DtnOperator &dtn)
{
  const int n = dtn.n_modes;
  const Eigen::MatrixXcd f = trace.FourierMoments(n);
  Eigen::VectorXcd d(2 * n + 1);
  for (int m = -n; m <= n; ++m)
  {
    d[m + n] = dtn.Coefficient(m) * (trace.r / kTwoPi);
  }
  return f * d.asDiagonal() * f.adjoint();
}

const char *ToString(ProblemKind k)
{
  switch (k)
  {
    case ProblemKind::kFine:
      return "fine";
    case ProblemKind::kEffective:
      return "effective";
    case ProblemKind::kFree:
      return "free";
  }
  return "?";
}

HelmholtzOperator HelmholtzOperator::Fine(std::shared_ptr<const Mesh> mesh, double epsilon, double r)
{
  HelmholtzOperator op;
  op.kind_ = ProblemKind::kFine;
  op.trace_ = ExtractCircleTrace(*mesh, r);
  std::vector<double> a(mesh->triangles.size());
  for (std::size_t t = 0; t < a.size(); ++t)
  {
    a[t] = mesh->regions[t] == RegionTag::kInclusion ? epsilon * epsilon : 1.0;
  }
  op.stiffness_ = fem::Stiffness(*mesh, a);
  op.mass_plain_ = fem::Mass(*mesh, std::vector<double>(a.size(), 1.0));
  op.mass_scaled_ = Eigen::SparseMatrix<double>(mesh->vertices.size(), mesh->vertices.size());
  op.mesh_ = std::move(mesh);
  return op;
}

HelmholtzOperator HelmholtzOperator::Effective(std::shared_ptr<const Mesh> mesh,
                                               const Eigen::Matrix2d &a0,
                                               std::function<cplx(cplx)> mu0, double r)
{
  HelmholtzOperator op;
  op.kind_ = ProblemKind::kEffective;
  op.trace_ = ExtractCircleTrace(*mesh, r);
  std::vector<Eigen::Matrix2d> a(mesh->triangles.size());
  for (std::size_t t = 0; t < a.size(); ++t)
  {
    a[t] = InOmega(mesh->regions[t]) ? a0 : Eigen::Matrix2d::Identity();
  }
  op.stiffness_ = fem::StiffnessTensor(*mesh, a);
  op.mass_scaled_ = fem::Mass(*mesh, fem::RegionWeight(*mesh, InOmega));
  op.mass_plain_ = fem::Mass(*mesh, fem::RegionWeight(*mesh, [](RegionTag t) { return !InOmega(t); }));
  op.mu0_ = std::move(mu0);
  op.mesh_ = std::move(mesh);
  return op;
}

HelmholtzOperator HelmholtzOperator::Free(std::shared_ptr<const Mesh> mesh, double r)
{
  HelmholtzOperator op;
  op.kind_ = ProblemKind::kFree;
  op.trace_ = ExtractCircleTrace(*mesh, r);
  const std::vector<double> one(mesh->triangles.size(), 1.0);
  op.stiffness_ = fem::Stiffness(*mesh, one);
  op.mass_plain_ = fem::Mass(*mesh, one);
  op.mass_scaled_ = Eigen::SparseMatrix<double>(mesh->vertices.size(), mesh->vertices.size());
  op.mesh_ = std::move(mesh);
  return op;
}

Eigen::SparseMatrix<cplx> HelmholtzOperator::Assemble(cplx z, int n_modes) const
{
  if (n_modes <= 0)
  {
    n_modes = DefaultDtnModes(r(), z);
  }
  const cplx z2 = z * z;
  const cplx mu = mass_scaled_.nonZeros() > 0 ? MassFactor(z) : cplx(1.0);
  Eigen::SparseMatrix<cplx> a = stiffness_.cast<cplx>() - (z2 * mu) * mass_scaled_.cast<cplx>() -
                                z2 * mass_plain_.cast<cplx>();
  const Eigen::MatrixXcd b = DtnBlock(trace_, BuildDtn(r(), z, n_modes));
  std::vector<Eigen::Triplet<cplx>> trip;
  const int nb = static_cast<int>(trace_.nodes.size());
  trip.reserve(static_cast<std::size_t>(nb) * nb);
  for (int j = 0; j < nb; ++j)
  {
    for (int i = 0; i < nb; ++i)
    {
      trip.emplace_back(trace_.nodes[i], trace_.nodes[j], -b(i, j));
    }
  }
  Eigen::SparseMatrix<cplx> bs(a.rows(), a.cols());
  bs.setFromTriplets(trip.begin(), trip.end());
  a += bs;
  a.makeCompressed();
  return a;
}

Eigen::VectorXcd HelmholtzOperator::IncidentLoad(const IncidentWave &wave, cplx z, int n_modes) const
{
  if (n_modes <= 0)
  {
    n_modes = DefaultDtnModes(r(), z);
  }
  const DtnOperator dtn = BuildDtn(r(), z, n_modes);
  const int m = std::max(1024, 8 * (n_modes + 1));
  std::vector<cplx> u(m), du(m);
  for (int j = 0; j < m; ++j)
  {
    const double phi = kTwoPi * j / m;
    const Point n(std::cos(phi), std::sin(phi));
    const Point x = r() * n;
    u[j] = wave.Value(x, z);
    du[j] = n.cast<cplx>().dot(wave.Gradient(x, z));
  }
  const std::vector<cplx> uc = Dft(u, n_modes), dc = Dft(du, n_modes);
  Eigen::VectorXcd c(2 * n_modes + 1);
  for (int n = -n_modes; n <= n_modes; ++n)
  {
    c[n + n_modes] = dc[n + n_modes] - dtn.Coefficient(n) * uc[n + n_modes];
  }
  const Eigen::VectorXcd g = r() * (trace_.FourierMoments(n_modes) * c);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(mesh_->vertices.size());
  for (std::size_t i = 0; i < trace_.nodes.size(); ++i)
  {
    load[trace_.nodes[i]] = g[i];
  }
  return load;
}

FieldSolution SolveScattering(const HelmholtzOperator &op, const IncidentWave &wave, cplx z,
                              const SolveOptions &options)
{
  FieldSolution sol;
  sol.mesh = op.mesh_ptr();
  sol.kind = op.kind();
  sol.z = z;
  sol.dtn_modes = options.dtn_modes > 0 ? options.dtn_modes : DefaultDtnModes(op.r(), z);
  const Eigen::SparseMatrix<cplx> a = op.Assemble(z, sol.dtn_modes);
  const Eigen::VectorXcd b = op.IncidentLoad(wave, z, sol.dtn_modes);
  SparseLu<cplx> lu(a);
  sol.u = lu.Solve(b);
  sol.rcond = lu.RcondEstimate();
  sol.residual = (a * sol.u - b).norm() / std::max(b.norm(), 1e-300);
  if (sol.rcond < options.rcond_warning)
  {
    std::ostringstream os;
    os << "near-singular system at z = " << z << " (rcond " << sol.rcond << ")";
    sol.warnings.push_back(os.str());
  }
  return sol;
}

FieldSolution SolveEffective(const ScatterScene &scene, const EffectiveMedium &medium, double k,
                             const SolveOptions &options)
{
  auto spectrum = std::make_shared<DirichletSpectrum>(medium.spectrum);
  spectrum->eigenfunctions.resize(0, 0);
  const cplx mu0 = Mu0(*spectrum, k).value;
  HelmholtzOperator op = HelmholtzOperator::Effective(
      scene.mesh, medium.a0, [spectrum](cplx z) { return Mu0(*spectrum, z).value; }, scene.r);
  IncidentWave wave = scene.incident;
  wave.k = k;
  FieldSolution sol = SolveScattering(op, wave, k, options);

  // Scattered-field splitting on the same matrix.
  const Mesh &mesh = *scene.mesh;
  const double s = k * k * mu0.real();
  const int n_modes = sol.dtn_modes;
  const auto omega_w = fem::RegionWeight(mesh, InOmega);
  const Eigen::SparseMatrix<double> m_all = op.mass_scaled() + op.mass_plain();
  const Eigen::SparseMatrix<double> k_id_omega = fem::Stiffness(mesh, omega_w);
  const Eigen::SparseMatrix<double> k_id_ext =
      fem::Stiffness(mesh, fem::RegionWeight(mesh, [](RegionTag t) { return !InOmega(t); }));
  const Eigen::SparseMatrix<cplx> a = op.Assemble(k, n_modes);
  Eigen::SparseMatrix<cplx> b_only = a - op.stiffness().cast<cplx>() +
                                     (k * k) * (mu0 * op.mass_scaled().cast<cplx>() +
                                                op.mass_plain().cast<cplx>());
  // a1 = K_A + M - B ; a2 = -(s + 1) M_Omega - (k^2 + 1) M_ext.
  const Eigen::SparseMatrix<cplx> a1 = op.stiffness().cast<cplx>() + m_all.cast<cplx>() + b_only;
  const Eigen::SparseMatrix<cplx> a2 =
      (-(s + 1.0)) * op.mass_scaled().cast<cplx>() - (k * k + 1.0) * op.mass_plain().cast<cplx>();
  const Eigen::SparseMatrix<cplx> split = a1 + a2;
  double mismatch = 0.0;
  const Eigen::SparseMatrix<cplx> diff = split - a;
  for (int c = 0; c < diff.outerSize(); ++c)
  {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(diff, c); it; ++it)
    {
      mismatch = std::max(mismatch, std::abs(it.value()));
    }
  }
  const Eigen::VectorXcd uin = fem::Interpolate(mesh, [&](const Point &x) { return wave.Value(x, k); });
  // H(v) = int_Omega (I - A) grad u_in . grad v + (s - k^2) int_Omega u_in v.
  const Eigen::SparseMatrix<double> k_a_omega = op.stiffness() - k_id_ext;
  const Eigen::VectorXcd h = (k_id_omega - k_a_omega).cast<cplx>() * uin +
                             (s - k * k) * (op.mass_scaled().cast<cplx>() * uin);
  SparseLu<cplx> lu(split);
  const Eigen::VectorXcd w = lu.Solve(h);
  const Eigen::VectorXcd alt = uin + w;
  const std::vector<double> all(mesh.triangles.size(), 1.0);
  sol.diagnostics.s = s;
  sol.diagnostics.split_matrix_mismatch = mismatch;
  sol.diagnostics.split_solution_mismatch =
      std::sqrt(fem::L2NormSquared(mesh, sol.u - alt, all) / fem::L2NormSquared(mesh, sol.u, all));
  sol.epsilon = scene.epsilon();
  return sol;
}

FieldSolution SolveFine(const ScatterScene &scene, cplx z, const SolveOptions &options)
{
  const HelmholtzOperator op = HelmholtzOperator::Fine(scene.mesh, scene.epsilon(), scene.r);
  FieldSolution sol = SolveScattering(op, scene.incident, z, options);
  sol.epsilon = scene.epsilon();
  return sol;
}

FieldSolution SolveFree(const ScatterScene &scene, const SolveOptions &options)
{
  const HelmholtzOperator op = HelmholtzOperator::Free(scene.mesh, scene.r);
  return SolveScattering(op, scene.incident, scene.incident.k, options);
}

namespace
{

struct CircleSamples
{
  std::vector<double> phi;
  std::vector<cplx> u;
  std::vector<cplx> du;
};

CircleSamples SampleOutgoing(const std::function<cplx(const Point &)> &scattered, double rho,
                             double k, int samples)
{
  const int n_modes = DefaultDtnModes(rho, k);
  const int m = samples > 0 ? samples : std::max(512, 4 * (n_modes + 1));
  CircleSamples cs;
  cs.phi.resize(m);
  cs.u.resize(m);
  for (int j = 0; j < m; ++j)
  {
    cs.phi[j] = kTwoPi * j / m;
    cs.u[j] = scattered(rho * Point(std::cos(cs.phi[j]), std::sin(cs.phi[j])));
  }
  const int nm = std::min(n_modes, (m - 1) / 2);
  const DtnOperator dtn = BuildDtn(rho, k, nm);
  const std::vector<cplx> c = Dft(cs.u, nm);
  cs.du.assign(m, 0.0);
  for (int j = 0; j < m; ++j)
  {
    cplx s = 0.0;
    for (int n = -nm; n <= nm; ++n)
    {
      s += dtn.Coefficient(n) * c[n + nm] *
           std::polar(1.0, kTwoPi * static_cast<double>((static_cast<long>(n) * j) % m) / m);
    }
    cs.du[j] = s;
  }
  return cs;
}

}  // namespace

FarField FarFieldFromCircle(const std::function<cplx(const Point &)> &scattered, double rho,
                            double k, const std::vector<double> &theta, int samples)
{
  const CircleSamples cs = SampleOutgoing(scattered, rho, k, samples);
  const int m = static_cast<int>(cs.phi.size());
  const cplx pre = std::polar(1.0 / std::sqrt(8.0 * std::numbers::pi * k), -0.75 * std::numbers::pi);
  const double ds = kTwoPi * rho / m;
  FarField ff;
  ff.theta = theta;
  ff.radius = rho;
  ff.values.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
  {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j)
    {
      const double c = std::cos(cs.phi[j] - theta[i]);
      const cplx e = std::polar(1.0, -k * rho * c);
      // e d_n u - u d_n e, with d_n e = -i k (theta . n) e.
      s += e * cs.du[j] + kI * k * c * e * cs.u[j];
    }
    ff.values[i] = pre * s * ds;
  }
  return ff;
}

FarField ComputeFarField(const FieldSolution &sol, const ScatterScene &scene, double rho,
                         const std::vector<double> &theta)
{
  if (rho > scene.r * (1.0 + 1e-12))
  {
    throw std::invalid_argument("far field: extraction radius exceeds the truncation radius");
  }
  if (!(scene.omega.Circumradius() < rho))
  {
    throw std::invalid_argument("far field: Omega is not inside the extraction circle");
  }
  const double k = sol.z.real();
  const fem::PointLocator loc(*sol.mesh);
  auto scattered = [&](const Point &x)
  {
    cplx v;
    if (!loc.Evaluate(sol.u, x, &v))
    {
      throw std::runtime_error("far field: sample point outside the mesh");
    }
    return v - scene.incident.Value(x, k);
  };
  return FarFieldFromCircle(scattered, rho, k, theta);
}

double OutgoingFlux(const std::function<cplx(const Point &)> &scattered, double rho, double k,
                    int samples)
{
  const CircleSamples cs = SampleOutgoing(scattered, rho, k, samples);
  cplx s = 0.0;
  for (std::size_t j = 0; j < cs.u.size(); ++j)
  {
    s += cs.du[j] * std::conj(cs.u[j]);
  }
  return (s * (kTwoPi * rho / static_cast<double>(cs.u.size()))).imag();
}

std::vector<double> UniformAngles(int n)
{
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i)
  {
    t[i] = kTwoPi * i / n;
  }
  return t;
}

void WriteFieldValues(const FieldSolution &sol, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  os << "subwave-field v1\n" << sol.u.size() << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < sol.u.size(); ++i)
  {
    os << i << " " << sol.u[i].real() << " " << sol.u[i].imag() << "\n";
  }
}

Eigen::VectorXcd ReadFieldValues(const std::string &path)
{
  std::ifstream is(path);
  std::string header;
  if (!is || !std::getline(is, header) || header != "subwave-field v1")
  {
    throw std::runtime_error("not a subwave-field v1 file: " + path);
  }
  long n = -1;
  if (!(is >> n) || n < 0)
  {
    throw std::runtime_error("malformed field file: bad count");
  }
  Eigen::VectorXcd u(n);
  for (long i = 0; i < n; ++i)
  {
    long idx;
    double re, im;
    if (!(is >> idx >> re >> im) || idx != i)
    {
      throw std::runtime_error("malformed field file: line " + std::to_string(i));
    }
    u[i] = cplx(re, im);
  }
  return u;
}

void WriteFarFieldCsv(const FarField &ff, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  os << "theta,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < ff.theta.size(); ++i)
  {
    os << ff.theta[i] << "," << ff.values[i].real() << "," << ff.values[i].imag() << "\n";
  }
}

}  // namespace subwave
