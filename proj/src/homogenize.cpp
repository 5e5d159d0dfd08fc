// SPDX-License-Identifier: Apache-2.0

#include "subwave/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "subwave/parallel.hpp"

namespace subwave
{

namespace
{

constexpr int kChunks = 64;

using fem::CVec;

double BumpProfile(const Point &y)
{
  const double s = 4.0 * y.squaredNorm();
  return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
}

double Smoothstep5(double t)
{
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

std::vector<double> MaskWeight(const Mesh &mesh, const std::function<bool(std::size_t)> &keep)
{
  std::vector<double> w(mesh.triangles.size(), 0.0);
  for (std::size_t t = 0; t < w.size(); ++t)
  {
    w[t] = keep(t) ? 1.0 : 0.0;
  }
  return w;
}

bool InOmega(RegionTag tag) { return tag != RegionTag::kExterior; }

}  // namespace

const Mollifier &Mollifier::Standard()
{
  static const Mollifier m = []
  {
    using Rule = boost::math::quadrature::gauss<double, 16>;
    // Boost stores the nonnegative half of the symmetric rule.
    std::vector<double> x, w;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i)
    {
      const double a = Rule::abscissa()[i], wt = Rule::weights()[i];
      x.push_back(a);
      w.push_back(wt);
      if (a != 0.0)
      {
        x.push_back(-a);
        w.push_back(wt);
      }
    }
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i)
    {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Mollifier out;
    double mass = 0.0;
    for (std::size_t i : order)
    {
      for (std::size_t j : order)
      {
        const Point y(0.5 * x[i], 0.5 * x[j]);
        const double v = 0.25 * w[i] * w[j] * BumpProfile(y);
        if (v > 0.0)
        {
          out.nodes.push_back(y);
          out.weights.push_back(v);
          mass += v;
        }
      }
    }
    for (double &v : out.weights)
    {
      v /= mass;
    }
    return out;
  }();
  return m;
}

Eigen::Vector2cd SmoothingConvolve(const std::function<Eigen::Vector2cd(const Point &)> &v,
                                   const Point &x, double epsilon)
{
  const Mollifier &m = Mollifier::Standard();
  Eigen::Vector2cd s = Eigen::Vector2cd::Zero();
  for (std::size_t q = 0; q < m.nodes.size(); ++q)
  {
    s += m.weights[q] * v(x - epsilon * m.nodes[q]);
  }
  return s;
}

std::vector<Eigen::Vector2cd> SmoothingConvolve(const Mesh &mesh,
                                                const std::vector<Eigen::Vector2cd> &field,
                                                const std::vector<Point> &points, double epsilon)
{
  if (field.size() != mesh.vertices.size())
  {
    throw HomogenizationError("smoothing: field size does not match the mesh");
  }
  const fem::PointLocator loc(mesh);
  const Mollifier &m = Mollifier::Standard();
  std::vector<Eigen::Vector2cd> out(points.size(), Eigen::Vector2cd::Zero());
  const std::size_t n = points.size();
  ParallelFor(kChunks,
              [&](int c)
              {
                const std::size_t lo = n * c / kChunks, hi = n * (c + 1) / kChunks;
                for (std::size_t i = lo; i < hi; ++i)
                {
                  Eigen::Vector2cd s = Eigen::Vector2cd::Zero();
                  for (std::size_t q = 0; q < m.nodes.size(); ++q)
                  {
                    Eigen::Vector2cd g;
                    if (!loc.Evaluate(field, points[i] - epsilon * m.nodes[q], &g))
                    {
                      throw HomogenizationError("smoothing: sample outside the mesh");
                    }
                    s += m.weights[q] * g;
                  }
                  out[i] = s;
                }
              });
  return out;
}

double BoundaryCutoff(const MacroDomain &omega, double epsilon, const Point &x)
{
  if (!omega.Contains(x))
  {
    return 0.0;
  }
  return Smoothstep5((omega.BoundaryDistance(x) - 2.0 * epsilon) / epsilon);
}

double Inradius(const MacroDomain &omega)
{
  switch (omega.kind())
  {
    case MacroDomain::Kind::kDisk:
      return omega.radius();
    case MacroDomain::Kind::kRectangle:
      return 0.5 * std::min(omega.hi().x() - omega.lo().x(), omega.hi().y() - omega.lo().y());
    default:
      break;
  }
  const auto box = omega.BoundingBox();
  const int n = 200;
  double best = 0.0;
  for (int i = 0; i <= n; ++i)
  {
    for (int j = 0; j <= n; ++j)
    {
      const Point p(box[0].x() + (box[1].x() - box[0].x()) * i / n,
                    box[0].y() + (box[1].y() - box[0].y()) * j / n);
      if (omega.Contains(p))
      {
        best = std::max(best, omega.BoundaryDistance(p));
      }
    }
  }
  return best;
}

Reconstruction Reconstruct(const FieldSolution &u0, const EffectiveMedium &medium,
                           const ScatterScene &scene)
{
  if (!u0.mesh || u0.kind != ProblemKind::kEffective)
  {
    throw HomogenizationError("reconstruct: an effective solution is required");
  }
  const Mesh &mesh = *u0.mesh;
  const std::size_t nv = mesh.vertices.size();
  const double eps = scene.epsilon();
  Reconstruction rec;
  rec.epsilon = eps;
  rec.inner_width = 2.0 * eps;
  rec.outer_width = 3.0 * eps;
  rec.base = u0.u;
  rec.corrector = CVec::Zero(nv);
  rec.cutoff.assign(nv, 0.0);
  if (scene.lattice.empty())
  {
    rec.combined = rec.base;
    return rec;
  }
  if (!medium.cell_mesh || medium.chi[0].size() == 0 || mesh.cell_vertex.size() != nv ||
      mesh.cell_slot.size() != nv)
  {
    throw HomogenizationError("reconstruct: cell fields or cell-to-scene map missing");
  }
  const Mesh &cell = *medium.cell_mesh;
  const int ncell = static_cast<int>(cell.vertices.size());
  const CellFunction lambda = LambdaCell(cell, u0.z, &medium.spectrum);

  if (Inradius(scene.omega) <= rec.outer_width)
  {
    rec.warnings.push_back("cutoff vanishes identically: eps too large for Omega");
  }

  std::vector<Point> support;
  std::vector<int> support_nodes;
  for (std::size_t v = 0; v < nv; ++v)
  {
    if (mesh.cell_slot[v] < 0)
    {
      continue;
    }
    const int cv = mesh.cell_vertex[v];
    if (cv < 0 || cv >= ncell)
    {
      throw HomogenizationError("reconstruct: scene mesh is not tiled from the medium cell mesh");
    }
    rec.base[v] = lambda.values[cv] * u0.u[v];
    rec.cutoff[v] = BoundaryCutoff(scene.omega, eps, mesh.vertices[v]);
    if (rec.cutoff[v] > 0.0)
    {
      support.push_back(mesh.vertices[v]);
      support_nodes.push_back(static_cast<int>(v));
    }
  }

  if (!support.empty())
  {
    const auto omega_w = fem::RegionWeight(mesh, InOmega);
    const auto grad = fem::RecoverGradient(mesh, u0.u, omega_w);
    const auto smooth = SmoothingConvolve(mesh, grad, support, eps);
    for (std::size_t i = 0; i < support_nodes.size(); ++i)
    {
      const int v = support_nodes[i];
      const int cv = mesh.cell_vertex[v];
      const cplx chi_dot =
          medium.chi[0][cv] * smooth[i][0] + medium.chi[1][cv] * smooth[i][1];
      rec.corrector[v] = eps * rec.cutoff[v] * chi_dot;
    }
  }
  rec.combined = rec.base + rec.corrector;
  return rec;
}

double BoundaryLayerFunctional(const FieldSolution &u0, const MacroDomain &omega, double epsilon)
{
  const Mesh &mesh = *u0.mesh;
  const std::size_t nt = mesh.triangles.size();
  std::vector<double> dist(nt);
  for (std::size_t t = 0; t < nt; ++t)
  {
    dist[t] = omega.BoundaryDistance(mesh.Centroid(t));
  }
  const auto omega_w = MaskWeight(mesh, [&](std::size_t t) { return InOmega(mesh.regions[t]); });
  const auto layer_w = MaskWeight(
      mesh, [&](std::size_t t) { return omega_w[t] > 0.0 && dist[t] < 4.0 * epsilon; });
  const auto core_w = MaskWeight(
      mesh, [&](std::size_t t) { return omega_w[t] > 0.0 && dist[t] >= epsilon; });

  const double h1 = std::sqrt(fem::L2NormSquared(mesh, u0.u, omega_w) +
                              fem::GradNormSquared(mesh, u0.u, omega_w));
  const double layer = std::sqrt(fem::GradNormSquared(mesh, u0.u, layer_w));

  const auto grad = fem::RecoverGradient(mesh, u0.u, omega_w);
  CVec gx(grad.size()), gy(grad.size());
  for (std::size_t v = 0; v < grad.size(); ++v)
  {
    gx[v] = grad[v][0];
    gy[v] = grad[v][1];
  }
  const double hess = std::sqrt(fem::GradNormSquared(mesh, gx, core_w) +
                                fem::GradNormSquared(mesh, gy, core_w));
  return std::sqrt(epsilon) * h1 + layer + epsilon * hess;
}

ErrorRow ComputeErrorRow(const FieldSolution &u_eps, const FieldSolution &u0,
                         const Reconstruction &recon, const ScatterScene &scene)
{
  if (!u_eps.mesh || !u0.mesh || u_eps.mesh.get() != u0.mesh.get() ||
      recon.base.size() != u_eps.u.size())
  {
    throw HomogenizationError("error norms: fields live on different meshes");
  }
  const Mesh &mesh = *u_eps.mesh;
  const double eps = scene.epsilon();
  ErrorRow row;
  row.epsilon = eps;
  const std::vector<double> all(mesh.triangles.size(), 1.0);
  const auto inclusion_w = fem::RegionWeight(mesh, [](RegionTag t) { return t == RegionTag::kInclusion; });
  const auto off_w = fem::RegionWeight(mesh, [](RegionTag t) { return t != RegionTag::kInclusion; });
  const auto ext_w = fem::RegionWeight(mesh, [](RegionTag t) { return t == RegionTag::kExterior; });

  row.l2_ball = std::sqrt(fem::L2NormSquared(mesh, u_eps.u - recon.base, all));
  const CVec e = u_eps.u - recon.combined;
  row.l2_recon = std::sqrt(fem::L2NormSquared(mesh, e, all));
  row.heps = row.l2_recon + std::sqrt(fem::GradNormSquared(mesh, e, off_w)) +
             eps * std::sqrt(fem::GradNormSquared(mesh, e, inclusion_w));
  const CVec d = u_eps.u - u0.u;
  row.h1_ext = std::sqrt(fem::L2NormSquared(mesh, d, ext_w) + fem::GradNormSquared(mesh, d, ext_w));
  row.e_functional = BoundaryLayerFunctional(u0, scene.omega, eps);

  const auto theta = UniformAngles(128);
  const double rho = 0.9 * scene.r;
  const FarField f_eps = ComputeFarField(u_eps, scene, rho, theta);
  const FarField f_0 = ComputeFarField(u0, scene, rho, theta);
  for (std::size_t i = 0; i < theta.size(); ++i)
  {
    row.farfield_sup = std::max(row.farfield_sup, std::abs(f_eps.values[i] - f_0.values[i]));
  }
  return row;
}

RateFit FitRate(const std::vector<std::pair<double, double>> &pairs)
{
  RateFit fit;
  std::vector<double> x, y;
  for (const auto &[eps, err] : pairs)
  {
    if (!(eps > 0.0))
    {
      throw std::invalid_argument("fit_rate: epsilon must be positive");
    }
    if (!(err > 0.0))
    {
      std::ostringstream os;
      os << "excluded eps=" << eps << ": nonpositive error " << err;
      fit.notes.push_back(os.str());
      continue;
    }
    x.push_back(std::log(eps));
    y.push_back(std::log(err));
  }
  if (x.size() < 3)
  {
    throw std::invalid_argument("fit_rate: fewer than 3 usable points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
  {
    throw std::invalid_argument("fit_rate: epsilon values must differ");
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double dev = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.deviations.push_back(dev);
    ss += dev * dev;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

void WriteErrorReportCsv(const std::vector<ErrorRow> &rows, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  os << "epsilon,l2_ball,l2_recon,heps,h1_ext,e_functional,farfield_sup\n";
  os << std::setprecision(12);
  for (const auto &r : rows)
  {
    os << r.epsilon << "," << r.l2_ball << "," << r.l2_recon << "," << r.heps << "," << r.h1_ext
       << "," << r.e_functional << "," << r.farfield_sup << "\n";
  }
}

std::vector<ErrorRow> ReadErrorReportCsv(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw std::runtime_error("cannot open " + path);
  }
  std::string line;
  std::getline(is, line);
  if (line != "epsilon,l2_ball,l2_recon,heps,h1_ext,e_functional,farfield_sup")
  {
    throw std::runtime_error("unexpected error report header in " + path);
  }
  std::vector<ErrorRow> rows;
  while (std::getline(is, line))
  {
    if (line.empty())
    {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ErrorRow r;
    if (!(ls >> r.epsilon >> r.l2_ball >> r.l2_recon >> r.heps >> r.h1_ext >> r.e_functional >>
          r.farfield_sup))
    {
      throw std::runtime_error("malformed error report row in " + path);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace subwave
