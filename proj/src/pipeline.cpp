// SPDX-License-Identifier: Apache-2.0

#include "subwave/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "subwave/acceptance.hpp"
#include "subwave/fem.hpp"
#include "subwave/hash.hpp"
#include "subwave/meshgen.hpp"
#include "subwave/oracle.hpp"
#include "subwave/parallel.hpp"

namespace subwave
{

namespace fs = std::filesystem;

namespace
{

constexpr const char *kMediumFormat = "subwave-medium";
constexpr int kMediumVersion = 1;

std::string Join(const std::vector<double> &v)
{
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    os << (i ? "," : "") << v[i];
  }
  return os.str();
}

std::string Num(double x, int digits = 17)
{
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

std::ofstream OpenOut(const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot write " + path);
  }
  os << std::setprecision(12);
  return os;
}

std::string OutPath(const RunConfig &c, const std::string &name)
{
  return (fs::path(c.out_dir) / name).string();
}

void PrepareOut(const RunConfig &c) { fs::create_directories(c.out_dir); }

void Finish(RunManifest &m, const RunConfig &c, std::ostream &log)
{
  m.Write(OutPath(c, "manifest.json"));
  log << "wrote " << m.files.size() << " files and manifest.json to " << c.out_dir << "\n";
}

RunManifest NewManifest(const std::string &command, const RunConfig &c)
{
  RunManifest m;
  m.command = command;
  m.config_hash = c.Hash();
  m.threads = c.threads;
  return m;
}

bool IsotropicDisk(const RunConfig &c, const EffectiveMedium &medium)
{
  const MacroDomain omega = c.Omega();
  const Eigen::Matrix2d &a = medium.a0;
  return omega.kind() == MacroDomain::Kind::kDisk && std::abs(a(0, 1)) < 1e-10 &&
         std::abs(a(1, 0)) < 1e-10 && std::abs(a(0, 0) - a(1, 1)) < 1e-10;
}

double InteriorEnergy(const Mesh &mesh, const Eigen::VectorXcd &u)
{
  const auto w = fem::RegionWeight(mesh, [](RegionTag t) { return t != RegionTag::kExterior; });
  return fem::L2NormSquared(mesh, u, w);
}

IncidentWave PlaneWave(const RunConfig &c)
{
  return IncidentWave::Plane(c.k, Point(std::cos(c.direction_angle), std::sin(c.direction_angle)));
}

void WriteGnuplot(const std::string &path, const std::string &body)
{
  auto os = OpenOut(path);
  os << "# gnuplot script\nset datafile separator ','\nset key autotitle columnhead\n" << body;
}

}  // namespace

const char *ArtifactVersion() { return "subwave 1.0.0"; }

// ----------------------------------------------------------------------------
// Manifest

void RunManifest::Record(const std::string &out_dir, const std::string &name)
{
  const fs::path p = fs::path(out_dir) / name;
  files.push_back({name, Sha256FileHex(p.string()), fs::file_size(p)});
}

void RunManifest::Write(const std::string &path) const
{
  nlohmann::ordered_json j;
  j["format"] = "subwave-manifest";
  j["format_version"] = 1;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["threads"] = threads;
  nlohmann::ordered_json t = nlohmann::ordered_json::array();
  for (const auto &[stage, seconds] : timings)
  {
    t.push_back({{"stage", stage}, {"seconds", seconds}});
  }
  j["timings"] = t;
  nlohmann::ordered_json f = nlohmann::ordered_json::array();
  for (const auto &r : files)
  {
    f.push_back({{"name", r.name}, {"sha256", r.sha256}, {"bytes", r.bytes}});
  }
  j["files"] = f;
  auto os = OpenOut(path);
  os << j.dump(2) << "\n";
}

RunManifest RunManifest::Read(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw std::runtime_error("cannot read manifest " + path);
  }
  const auto j = nlohmann::json::parse(is);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.threads = j.at("threads").get<int>();
  for (const auto &t : j.at("timings"))
  {
    m.timings.emplace_back(t.at("stage").get<std::string>(), t.at("seconds").get<double>());
  }
  for (const auto &f : j.at("files"))
  {
    m.files.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>(),
                       f.at("bytes").get<std::uintmax_t>()});
  }
  return m;
}

StageTimer::StageTimer(RunManifest &manifest, std::string stage)
    : manifest_(manifest), stage_(std::move(stage)), start_(std::chrono::steady_clock::now())
{
}

StageTimer::~StageTimer()
{
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
  manifest_.timings.emplace_back(stage_, d.count());
}

// ----------------------------------------------------------------------------
// Medium files

void WriteMediumFile(const EffectiveMedium &medium, const std::string &shape_spec,
                     const std::string &path)
{
  const DirichletSpectrum &s = medium.spectrum;
  std::vector<double> classes, spaces;
  for (std::size_t j = 0; j < s.size(); ++j)
  {
    classes.push_back(s.classes[j] == ModeClass::kNonzeroMean ? 1.0 : 0.0);
    spaces.push_back(s.eigenspace[j]);
  }
  auto os = OpenOut(path);
  os << "[format]\nname = " << kMediumFormat << "\nversion = " << kMediumVersion << "\n\n";
  os << "[cell]\nshape = " << shape_spec << "\nh = " << Num(medium.cell_h)
     << "\nmesh_hash = " << medium.mesh_hash << "\nn_modes = " << medium.n_modes << "\n\n";
  os << "[tensor]\na0 = "
     << Join({medium.a0(0, 0), medium.a0(0, 1), medium.a0(1, 0), medium.a0(1, 1)})
     << "\ntheta = " << Num(medium.theta) << "\n\n";
  os << "[spectrum]\ninclusion_area = " << Num(s.inclusion_area)
     << "\ntotal_mean_mass = " << Num(s.total_mean_mass) << "\neigenvalues = " << Join(s.eigenvalues)
     << "\nmeans = " << Join(s.means) << "\nnonzero_mean = " << Join(classes)
     << "\neigenspace = " << Join(spaces) << "\n";
}

EffectiveMedium ReadMediumFile(const std::string &path, std::string *shape_spec)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try
  {
    pt::read_ini(path, tree);
  }
  catch (const pt::ini_parser_error &e)
  {
    throw ConfigError(std::string("cannot read medium: ") + e.what());
  }
  auto get = [&](const std::string &key)
  {
    const auto v = tree.get_optional<std::string>(key);
    if (!v)
    {
      throw ConfigError("medium file lacks '" + key + "'");
    }
    return *v;
  };
  if (get("format.name") != kMediumFormat || get("format.version") != std::to_string(kMediumVersion))
  {
    throw ConfigError("unsupported medium format in " + path);
  }
  auto one = [&](const std::string &key)
  {
    const auto v = ParseNumberList(get(key));
    if (v.size() != 1)
    {
      throw ConfigError("medium key '" + key + "' needs one number");
    }
    return v[0];
  };
  auto list = [&](const std::string &key)
  {
    const auto v = tree.get<std::string>(key, "");
    return ParseNumberList(v);
  };

  EffectiveMedium m;
  const std::string spec = get("cell.shape");
  if (shape_spec)
  {
    *shape_spec = spec;
  }
  m.shape = ParseShapeSpec(spec);
  m.cell_h = one("cell.h");
  m.n_modes = static_cast<int>(one("cell.n_modes"));
  m.theta = one("tensor.theta");
  const auto a = list("tensor.a0");
  if (a.size() != 4)
  {
    throw ConfigError("medium a0 needs 4 entries");
  }
  Eigen::Matrix2d a0;
  a0 << a[0], a[1], a[2], a[3];

  DirichletSpectrum &s = m.spectrum;
  s.inclusion_area = one("spectrum.inclusion_area");
  s.total_mean_mass = one("spectrum.total_mean_mass");
  s.eigenvalues = list("spectrum.eigenvalues");
  s.means = list("spectrum.means");
  const auto classes = list("spectrum.nonzero_mean");
  const auto spaces = list("spectrum.eigenspace");
  if (s.means.size() != s.size() || classes.size() != s.size() || spaces.size() != s.size() ||
      static_cast<int>(s.size()) != m.n_modes)
  {
    throw ConfigError("medium spectrum columns disagree in length");
  }
  for (std::size_t j = 0; j < s.size(); ++j)
  {
    s.classes.push_back(classes[j] != 0.0 ? ModeClass::kNonzeroMean : ModeClass::kZeroMean);
    s.eigenspace.push_back(static_cast<int>(spaces[j]));
  }

  auto mesh = std::make_shared<Mesh>(MeshUnitCell(m.shape, m.cell_h));
  m.mesh_hash = MeshHash(*mesh);
  if (m.mesh_hash != get("cell.mesh_hash"))
  {
    throw ConfigError("medium mesh hash mismatch: the rebuilt cell mesh differs from " + path);
  }
  m.cell_mesh = mesh;
  CorrectorResult cr = SolveCorrector(*mesh);
  if ((cr.a0 - a0).cwiseAbs().maxCoeff() > 1e-9)
  {
    throw ConfigError("medium a0 disagrees with the recomputed corrector");
  }
  m.a0 = cr.a0;
  m.chi = std::move(cr.chi);
  return m;
}

EffectiveMedium ObtainMedium(const RunConfig &config)
{
  if (config.medium_in.empty())
  {
    return BuildEffectiveMedium(config.Shape(), config.cell_h, config.n_modes);
  }
  std::string spec;
  EffectiveMedium m = ReadMediumFile(config.medium_in, &spec);
  if (ParseShapeSpec(spec).Describe() != config.Shape().Describe())
  {
    throw ConfigError("medium file shape '" + spec + "' differs from the configured shape");
  }
  return m;
}

ScatterScene MakeScene(const RunConfig &config, const EffectiveMedium &medium, double epsilon,
                       double h, double r, double h_far)
{
  ScatterScene sc;
  sc.omega = config.Omega();
  sc.shape = medium.shape;
  sc.r = r;
  sc.lattice = epsilon > 0.0 ? BuildLattice(sc.omega, epsilon) : Lattice(config.epsilon, {});
  sc.incident = PlaneWave(config);
  SceneMeshOptions mo;
  mo.h = h;
  mo.h_far = h_far;
  sc.mesh = std::make_shared<Mesh>(
      MeshScene(sc.omega, sc.lattice, *medium.cell_mesh, sc.shape, sc.r, mo));
  return sc;
}

// ----------------------------------------------------------------------------
// Rate study

RateStudy RunRateStudy(const RunConfig &config, const EffectiveMedium &medium, std::ostream *log)
{
  RateStudy study;
  SolveOptions so;
  so.dtn_modes = config.dtn_modes;
  for (double eps : config.eps_list)
  {
    const ScatterScene sc = MakeScene(config, medium, eps, config.SceneH(eps), config.TruncationRadius());
    const FieldSolution fine = SolveFine(sc, config.k, so);
    const FieldSolution eff = SolveEffective(sc, medium, config.k, so);
    const Reconstruction rec = Reconstruct(eff, medium, sc);
    const ErrorRow row = ComputeErrorRow(fine, eff, rec, sc);
    study.rows.push_back(row);
    if (log)
    {
      *log << "eps " << eps << ": " << sc.mesh->NumVertices() << " vertices, l2 " << row.l2_ball
           << ", far field " << row.farfield_sup << "\n";
      for (const auto &w : rec.warnings)
      {
        *log << "  warning: " << w << "\n";
      }
    }
  }
  const std::vector<std::pair<std::string, double ErrorRow::*>> columns = {
      {"l2_ball", &ErrorRow::l2_ball},           {"l2_recon", &ErrorRow::l2_recon},
      {"heps", &ErrorRow::heps},                 {"h1_ext", &ErrorRow::h1_ext},
      {"e_functional", &ErrorRow::e_functional}, {"farfield_sup", &ErrorRow::farfield_sup}};
  if (study.rows.size() >= 3)
  {
    for (const auto &[name, field] : columns)
    {
      std::vector<std::pair<double, double>> pts;
      for (const auto &r : study.rows)
      {
        pts.emplace_back(r.epsilon, r.*field);
      }
      try
      {
        study.fits[name] = FitRate(pts);
      }
      catch (const std::invalid_argument &)
      {
        // Fewer than three positive errors: no fit for this column.
      }
    }
  }
  return study;
}

// ----------------------------------------------------------------------------
// Subcommands

RunManifest CmdCell(const RunConfig &c, std::ostream &log)
{
  PrepareOut(c);
  RunManifest m = NewManifest("cell", c);
  EffectiveMedium med;
  {
    StageTimer t(m, "medium");
    med = ObtainMedium(c);
  }
  const std::string medium_name = "medium.txt";
  WriteMediumFile(med, c.shape, OutPath(c, medium_name));
  m.Record(c.out_dir, medium_name);
  if (!c.medium_out.empty())
  {
    WriteMediumFile(med, c.shape, c.medium_out);
  }
  {
    auto os = OpenOut(OutPath(c, "spectrum.csv"));
    os << std::setprecision(15) << "index,eigenvalue,frequency,mean,class,eigenspace\n";
    const DirichletSpectrum &s = med.spectrum;
    for (std::size_t j = 0; j < s.size(); ++j)
    {
      os << j << "," << s.eigenvalues[j] << "," << s.frequency(j) << "," << s.means[j] << ","
         << ToString(s.classes[j]) << "," << s.eigenspace[j] << "\n";
    }
  }
  m.Record(c.out_dir, "spectrum.csv");
  {
    auto os = OpenOut(OutPath(c, "a0.csv"));
    os << std::setprecision(15) << "a11,a12,a21,a22,theta\n"
       << med.a0(0, 0) << "," << med.a0(0, 1) << "," << med.a0(1, 0) << "," << med.a0(1, 1) << ","
       << med.theta << "\n";
  }
  m.Record(c.out_dir, "a0.csv");
  WriteMeshFile(*med.cell_mesh, OutPath(c, "cell_mesh.txt"));
  m.Record(c.out_dir, "cell_mesh.txt");
  log << "cell: " << med.cell_mesh->NumVertices() << " vertices, " << med.spectrum.size()
      << " modes, a0 = [" << med.a0(0, 0) << " " << med.a0(0, 1) << "; " << med.a0(1, 0) << " "
      << med.a0(1, 1) << "]\n";
  Finish(m, c, log);
  return m;
}

RunManifest CmdDispersion(const RunConfig &c, std::ostream &log)
{
  PrepareOut(c);
  RunManifest m = NewManifest("dispersion", c);
  EffectiveMedium med;
  {
    StageTimer t(m, "medium");
    med = ObtainMedium(c);
  }
  DispersionReport rep;
  {
    StageTimer t(m, "scan");
    rep = DispersionScan(med.spectrum, c.k_min, c.k_max, c.dispersion_samples);
  }
  {
    auto os = OpenOut(OutPath(c, "dispersion.csv"));
    os << "k,mu0,k2_mu0\n";
    for (const auto &[k, mu] : rep.samples)
    {
      os << k << "," << mu << "," << k * k * mu << "\n";
    }
  }
  {
    auto os = OpenOut(OutPath(c, "gaps.csv"));
    os << "gap_start,gap_end\n";
    for (const auto &[a, b] : rep.gaps)
    {
      os << a << "," << b << "\n";
    }
  }
  {
    auto os = OpenOut(OutPath(c, "poles.csv"));
    os << "pole\n";
    for (double p : rep.poles)
    {
      os << p << "\n";
    }
  }
  WriteGnuplot(OutPath(c, "dispersion.gp"),
               "set xlabel 'k'\nset ylabel 'k^2 mu0(k)'\nset yrange [-200:400]\n"
               "set terminal pngcairo size 900,600\nset output 'dispersion.png'\n"
               "plot 'dispersion.csv' using 1:3 with lines title 'k^2 mu0', "
               "'poles.csv' using 1:(0) with points pt 2 title 'poles'\n");
  for (const char *f : {"dispersion.csv", "gaps.csv", "poles.csv", "dispersion.gp"})
  {
    m.Record(c.out_dir, f);
  }
  log << "dispersion: " << rep.poles.size() << " poles, " << rep.gaps.size() << " gaps in ["
      << c.k_min << ", " << c.k_max << "]\n";
  for (const auto &[a, b] : rep.gaps)
  {
    log << "  gap (" << a << ", " << b << ")\n";
  }
  Finish(m, c, log);
  return m;
}

RunManifest CmdScatter(const RunConfig &c, std::ostream &log)
{
  PrepareOut(c);
  RunManifest m = NewManifest("scatter", c);
  EffectiveMedium med;
  {
    StageTimer t(m, "medium");
    med = ObtainMedium(c);
  }
  const bool want_fine = c.scatter_mode != "effective";
  const bool want_eff = c.scatter_mode != "fine";
  const double eps = want_fine ? c.epsilon : 0.0;
  ScatterScene sc;
  {
    StageTimer t(m, "mesh");
    sc = MakeScene(c, med, eps, c.SceneH(eps), c.TruncationRadius());
  }
  WriteMeshFile(*sc.mesh, OutPath(c, "scene_mesh.txt"));
  m.Record(c.out_dir, "scene_mesh.txt");

  SolveOptions so;
  so.dtn_modes = c.dtn_modes;
  const auto theta = UniformAngles(c.farfield_directions);
  const double rho = 0.9 * sc.r;
  std::ostringstream report;
  report << std::setprecision(10);
  report << "k = " << c.k << "\nomega = " << c.omega << "\nr = " << sc.r
         << "\nvertices = " << sc.mesh->NumVertices() << "\nmu0 = " << med.Mu0(c.k).real() << "\n";
  const double incident_energy = InteriorEnergy(*sc.mesh, fem::Interpolate(*sc.mesh, [&](const Point &x)
                                                                               { return sc.incident.Value(x); }));

  auto emit = [&](const FieldSolution &sol, const std::string &tag)
  {
    WriteFieldValues(sol, OutPath(c, "field_" + tag + ".txt"));
    m.Record(c.out_dir, "field_" + tag + ".txt");
    const FarField ff = ComputeFarField(sol, sc, rho, theta);
    WriteFarFieldCsv(ff, OutPath(c, "farfield_" + tag + ".csv"));
    m.Record(c.out_dir, "farfield_" + tag + ".csv");
    report << "[" << tag << "]\nresidual = " << sol.residual << "\nrcond = " << sol.rcond
           << "\ndtn_modes = " << sol.dtn_modes
           << "\ninterior_energy = " << InteriorEnergy(*sc.mesh, sol.u) << "\n";
    for (const auto &w : sol.warnings)
    {
      report << "warning = " << w << "\n";
      log << "warning (" << tag << "): " << w << "\n";
    }
    return ff;
  };

  FieldSolution eff, fine;
  if (want_eff)
  {
    {
      StageTimer t(m, "effective solve");
      eff = SolveEffective(sc, med, c.k, so);
    }
    const FarField ff = emit(eff, "effective");
    if (med.shape.empty())
    {
      double scattered = 0.0;
      for (int i = 0; i < eff.u.size(); ++i)
      {
        scattered = std::max(scattered, std::abs(eff.u[i] - sc.incident.Value(sc.mesh->vertices[i])));
      }
      report << "max_scattered_amplitude = " << scattered << "\n";
    }
    if (IsotropicDisk(c, med))
    {
      const cplx mu0 = med.Mu0(c.k);
      const MieDisk mie(c.k, c.Omega().radius(), med.a0(0, 0), mu0, c.direction_angle);
      std::vector<double> all(sc.mesh->NumTriangles(), 1.0);
      const double e2 = fem::L2ErrorSquared(*sc.mesh, eff.u, [&](const Point &x) { return mie.Total(x); }, all);
      const double n2 = fem::L2NormSquared(
          *sc.mesh, fem::Interpolate(*sc.mesh, [&](const Point &x) { return mie.Total(x); }), all);
      double fe = 0.0, fm = 0.0;
      for (std::size_t i = 0; i < theta.size(); ++i)
      {
        fe = std::max(fe, std::abs(ff.values[i] - mie.FarField(theta[i])));
        fm = std::max(fm, std::abs(mie.FarField(theta[i])));
      }
      report << "oracle_relative_l2 = " << std::sqrt(e2 / n2)
             << "\noracle_farfield_relative_sup = " << fe / fm << "\n";
      if (mu0.real() < 0.0)
      {
        const MieDisk ref(c.k, c.Omega().radius(), med.a0(0, 0), std::abs(mu0), c.direction_angle);
        report << "band_gap_oracle_energy_ratio = " << mie.InteriorEnergy() / ref.InteriorEnergy()
               << "\n";
      }
      log << "oracle match: relative L2 " << std::sqrt(e2 / n2) << ", far field " << fe / fm << "\n";
    }
  }
  if (want_fine)
  {
    {
      StageTimer t(m, "fine solve");
      fine = SolveFine(sc, c.k, so);
    }
    emit(fine, "fine");
    report << "epsilon = " << c.epsilon << "\nlattice_cells = " << sc.lattice.size() << "\n";
    if (want_eff && !sc.lattice.empty())
    {
      const Reconstruction rec = Reconstruct(eff, med, sc);
      const double base = InteriorEnergy(*sc.mesh, rec.base);
      report << "reconstruction_interior_energy = " << base
             << "\nfine_to_reconstruction_energy = " << InteriorEnergy(*sc.mesh, fine.u) / base << "\n";
    }
  }
  report << "incident_interior_energy = " << incident_energy << "\n";
  {
    auto os = OpenOut(OutPath(c, "scatter_report.txt"));
    os << report.str();
  }
  m.Record(c.out_dir, "scatter_report.txt");
  std::string plots;
  for (const char *tag : {"effective", "fine"})
  {
    if ((std::string(tag) == "effective" && want_eff) || (std::string(tag) == "fine" && want_fine))
    {
      plots += std::string(plots.empty() ? "plot " : ", ") + "'farfield_" + tag +
               ".csv' using 1:(sqrt($2**2+$3**2)) with lines title '" + tag + "'";
    }
  }
  WriteGnuplot(OutPath(c, "farfield.gp"),
               "set xlabel 'direction angle'\nset ylabel '|far field|'\n"
               "set terminal pngcairo size 900,600\nset output 'farfield.png'\n" + plots + "\n");
  m.Record(c.out_dir, "farfield.gp");
  log << report.str();
  Finish(m, c, log);
  return m;
}

RunManifest CmdRates(const RunConfig &c, std::ostream &log)
{
  PrepareOut(c);
  RunManifest m = NewManifest("rates", c);
  EffectiveMedium med;
  {
    StageTimer t(m, "medium");
    med = ObtainMedium(c);
  }
  RateStudy study;
  {
    StageTimer t(m, "solves");
    study = RunRateStudy(c, med, &log);
  }
  WriteErrorReportCsv(study.rows, OutPath(c, "error_report.csv"));
  m.Record(c.out_dir, "error_report.csv");
  {
    auto os = OpenOut(OutPath(c, "rates_summary.csv"));
    os << "column,slope,intercept,residual\n";
    for (const auto &[name, fit] : study.fits)
    {
      os << name << "," << fit.slope << "," << fit.intercept << "," << fit.residual << "\n";
      log << name << " slope " << fit.slope << " (rms deviation " << fit.residual << ")\n";
      for (const auto &n : fit.notes)
      {
        log << "  " << n << "\n";
      }
    }
  }
  m.Record(c.out_dir, "rates_summary.csv");
  WriteGnuplot(OutPath(c, "rates.gp"),
               "set logscale xy\nset xlabel 'eps'\nset ylabel 'error'\nset key left top\n"
               "set terminal pngcairo size 900,600\nset output 'rates.png'\n"
               "plot for [col=2:7] 'error_report.csv' using 1:col with linespoints\n");
  m.Record(c.out_dir, "rates.gp");
  Finish(m, c, log);
  return m;
}

RunManifest CmdResonances(const RunConfig &c, std::ostream &log)
{
  PrepareOut(c);
  RunManifest m = NewManifest("resonances", c);
  const SearchBox box{c.box[0], c.box[1], c.box[2], c.box[3]};
  try
  {
    ValidateBox(box);
  }
  catch (const ResonanceError &e)
  {
    throw ConfigError(e.what());
  }
  EffectiveMedium med;
  {
    StageTimer t(m, "medium");
    med = ObtainMedium(c);
  }
  SearchOptions so;
  so.grid = c.grid;
  so.refine_tolerance = c.refine_tolerance;
  const double r = c.resonance_r_factor * c.Omega().Circumradius();
  auto effective_set = [&]()
  {
    const ScatterScene sc = MakeScene(c, med, 0.0, c.resonance_h, r, c.resonance_h);
    return FindResonances(ResonanceSystem::Effective(med, sc.mesh, r), box, so);
  };
  auto report = [&](const ResonanceSet &set)
  {
    for (const auto &e : set.resonances)
    {
      log << set.provenance << ": z = " << e.z.real() << (e.z.imag() < 0 ? " - " : " + ")
          << std::abs(e.z.imag()) << "i, indicator " << e.residual << "\n";
    }
  };
  std::vector<std::string> csvs;

  if (c.resonance_mode == "oracle")
  {
    if (!IsotropicDisk(c, med))
    {
      throw ConfigError("oracle resonances need a disk Omega and an isotropic a0");
    }
    const DirichletSpectrum spec = med.spectrum;
    auto mu0 = [spec](cplx z) { return Mu0(spec, z, 1e-6).value; };
    auto os = OpenOut(OutPath(c, "resonances_oracle.csv"));
    os << std::setprecision(15) << "n,re,im,residual\n";
    StageTimer t(m, "oracle");
    for (int n = 0; n <= c.oracle_max_order; ++n)
    {
      for (const auto &root : DiskModeOracle(med.a0(0, 0), mu0, c.Omega().radius(), n, box))
      {
        os << n << "," << root.z.real() << "," << root.z.imag() << "," << root.residual << "\n";
        log << "oracle n = " << n << ": z = " << root.z.real() << " " << root.z.imag() << "i\n";
      }
    }
    csvs.push_back("resonances_oracle.csv");
  }
  else if (c.resonance_mode == "effective")
  {
    ResonanceSet set;
    {
      StageTimer t(m, "effective search");
      set = effective_set();
    }
    report(set);
    WriteResonanceCsv(set, OutPath(c, "resonances_effective.csv"));
    csvs.push_back("resonances_effective.csv");
  }
  else
  {
    ResonanceSet eff;
    {
      StageTimer t(m, "effective search");
      eff = effective_set();
    }
    report(eff);
    WriteResonanceCsv(eff, OutPath(c, "resonances_effective.csv"));
    csvs.push_back("resonances_effective.csv");
    if (eff.resonances.empty())
    {
      throw ResonanceError("no effective resonance in the box to anchor the drift study");
    }
    const cplx z0 = eff.resonances.front().z;
    std::vector<cplx> eff_list;
    for (const auto &e : eff.resonances)
    {
      eff_list.push_back(e.z);
    }
    // Fine-scale indicator basins are shallow: keep every local minimum and
    // stop the simplex earlier.
    SearchOptions fo = so;
    fo.grid = std::max(3, std::min(c.grid, 6));
    fo.screen_fraction = 1.0;
    fo.simplex_tolerance = 1e-7;
    auto make = [&](double eps)
    {
      const ScatterScene sc = MakeScene(c, med, eps, c.SceneH(eps), r, c.SceneH(eps));
      return ResonanceSystem::Fine(sc.mesh, eps, r);
    };
    DriftStudy drift;
    {
      StageTimer t(m, "drift");
      drift = RunDriftStudy(z0, c.drift_radius, c.eps_list, make, fo);
    }
    WriteDriftCsv(drift, OutPath(c, "drift.csv"));
    csvs.push_back("drift.csv");
    auto os = OpenOut(OutPath(c, "drift_limits.csv"));
    os << "epsilon,class,nearest_re,nearest_im,distance,pathological\n";
    for (const auto &row : drift.rows)
    {
      if (row.censored)
      {
        log << "eps " << row.epsilon << ": censored\n";
        continue;
      }
      const LimitClassification lc = ClassifyLimit(row.nearest, med.spectrum, eff_list);
      os << row.epsilon << "," << ToString(lc.cls) << "," << lc.nearest.real() << ","
         << lc.nearest.imag() << "," << lc.distance << "," << (lc.pathological ? 1 : 0) << "\n";
      log << "eps " << row.epsilon << ": nearest fine resonance " << row.nearest.real() << " "
          << row.nearest.imag() << "i at distance " << row.distance << " from z0\n";
    }
    csvs.push_back("drift_limits.csv");
    log << "drift: " << drift.nonincreasing_steps << " of " << drift.compared_steps
        << " steps nonincreasing\n";
  }
  for (const auto &f : csvs)
  {
    m.Record(c.out_dir, f);
  }
  WriteGnuplot(OutPath(c, "resonances.gp"),
               "set xlabel 'Re z'\nset ylabel 'Im z'\nset terminal pngcairo size 900,600\n"
               "set output 'resonances.png'\nplot '" + csvs.front() +
                   "' using " + (c.resonance_mode == "oracle" ? "2:3" : "1:2") +
                   " with points pt 7 title 'resonances'\n");
  m.Record(c.out_dir, "resonances.gp");
  Finish(m, c, log);
  return m;
}

RunManifest CmdCheck(const RunConfig &c, std::ostream &log, bool *all_passed)
{
  PrepareOut(c);
  RunManifest m = NewManifest("check", c);
  AcceptanceOptions opts;
  opts.work_dir = OutPath(c, "work");
  opts.threads = c.threads;
  opts.log = &log;
  const std::vector<int> ids = c.check_criteria.empty() ? QuickCriteria() : c.check_criteria;
  std::vector<CriterionResult> results;
  bool ok = true;
  for (int id : ids)
  {
    StageTimer t(m, "criterion " + std::to_string(id));
    results.push_back(RunCriterion(id, opts));
    const auto &r = results.back();
    ok = ok && r.passed;
    log << (r.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << r.title << "): "
        << r.summary << "\n";
  }
  WriteCheckCsv(results, OutPath(c, "check_results.csv"));
  m.Record(c.out_dir, "check_results.csv");
  Finish(m, c, log);
  if (all_passed)
  {
    *all_passed = ok;
  }
  return m;
}

int RunCommand(const std::string &command, const RunConfig &config, std::ostream &log,
               std::ostream &err)
{
  try
  {
    config.Validate();
    SetNumThreads(config.threads);
    if (command == "cell")
    {
      CmdCell(config, log);
    }
    else if (command == "dispersion")
    {
      CmdDispersion(config, log);
    }
    else if (command == "scatter")
    {
      CmdScatter(config, log);
    }
    else if (command == "rates")
    {
      CmdRates(config, log);
    }
    else if (command == "resonances")
    {
      CmdResonances(config, log);
    }
    else if (command == "check")
    {
      bool ok = false;
      CmdCheck(config, log, &ok);
      return ok ? kExitOk : kExitCheck;
    }
    else
    {
      throw ConfigError("unknown command '" + command + "'");
    }
    return kExitOk;
  }
  catch (const ConfigError &e)
  {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  catch (const GeometryError &e)
  {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  catch (const std::exception &e)
  {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace subwave
