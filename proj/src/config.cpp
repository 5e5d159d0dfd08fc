// SPDX-License-Identifier: Apache-2.0

#include "subwave/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "subwave/hash.hpp"

namespace subwave
{

namespace
{

std::pair<std::string, std::vector<double>> SplitSpec(const std::string &spec)
{
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> values;
  if (colon != std::string::npos)
  {
    values = ParseNumberList(spec.substr(colon + 1));
  }
  return {kind, values};
}

std::vector<Point> ToPoints(const std::vector<double> &v, const std::string &spec)
{
  if (v.size() < 6 || v.size() % 2 != 0)
  {
    throw ConfigError("polygon needs at least 3 vertex pairs: '" + spec + "'");
  }
  std::vector<Point> p;
  for (std::size_t i = 0; i < v.size(); i += 2)
  {
    p.emplace_back(v[i], v[i + 1]);
  }
  return p;
}

void Expect(bool ok, const std::string &message)
{
  if (!ok)
  {
    throw ConfigError(message);
  }
}

std::string JoinNumbers(const std::vector<double> &v)
{
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    os << (i ? "," : "") << v[i];
  }
  return os.str();
}

}  // namespace

std::vector<double> ParseNumberList(const std::string &text)
{
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<double> out;
  std::string tok;
  while (is >> tok)
  {
    auto parse = [&](const std::string &part)
    {
      std::size_t used = 0;
      double v = 0.0;
      try
      {
        v = std::stod(part, &used);
      }
      catch (const std::exception &)
      {
        used = 0;
      }
      if (part.empty() || used != part.size())
      {
        throw ConfigError("not a number: '" + tok + "'");
      }
      return v;
    };
    // "a/b" fractions are accepted.
    const auto slash = tok.find('/');
    const double v = slash == std::string::npos
                         ? parse(tok)
                         : parse(tok.substr(0, slash)) / parse(tok.substr(slash + 1));
    out.push_back(v);
  }
  return out;
}

InclusionShape ParseShapeSpec(const std::string &spec)
{
  const auto [kind, v] = SplitSpec(spec);
  try
  {
    if (kind == "none")
    {
      return InclusionShape::None();
    }
    if (kind == "disk" && v.size() == 3)
    {
      return InclusionShape::Disk({v[0], v[1]}, v[2]);
    }
    if ((kind == "rect" || kind == "rectangle") && v.size() == 4)
    {
      return InclusionShape::Rectangle({v[0], v[1]}, {v[2], v[3]});
    }
    if (kind == "polygon")
    {
      return InclusionShape::Polygon(ToPoints(v, spec));
    }
  }
  catch (const GeometryError &e)
  {
    throw ConfigError(std::string("inclusion: ") + e.what());
  }
  throw ConfigError("cannot parse inclusion spec '" + spec + "'");
}

MacroDomain ParseOmegaSpec(const std::string &spec)
{
  const auto [kind, v] = SplitSpec(spec);
  try
  {
    if (kind == "disk" && v.size() == 1)
    {
      return MacroDomain::Disk(v[0]);
    }
    if ((kind == "rect" || kind == "rectangle") && v.size() == 4)
    {
      return MacroDomain::Rectangle({v[0], v[1]}, {v[2], v[3]});
    }
    if (kind == "polygon")
    {
      return MacroDomain::Polygon(ToPoints(v, spec));
    }
  }
  catch (const GeometryError &e)
  {
    throw ConfigError(std::string("omega: ") + e.what());
  }
  throw ConfigError("cannot parse omega spec '" + spec + "'");
}

void RunConfig::Validate() const
{
  const InclusionShape s = Shape();
  const MacroDomain o = Omega();
  Expect(cell_h > 0.0 && cell_h < 0.5, "cell h must lie in (0, 0.5)");
  if (!s.empty())
  {
    Expect(s.WallDistance() >= 2.0 * cell_h,
           "inclusion must keep a wall distance of at least 2 cell h from the cell boundary");
  }
  Expect(n_modes >= 0, "n_modes must be nonnegative");
  Expect(k > 0.0, "k must be positive");
  Expect(r == 0.0 || r > o.Circumradius(), "truncation circle must enclose Omega");
  Expect(dtn_modes >= 0, "dtn_modes must be nonnegative");
  Expect(h >= 0.0 && h_per_eps > 0.0 && free_h > 0.0, "mesh sizes must be positive");
  Expect(epsilon > 0.0 && epsilon < 1.0, "eps must lie in (0, 1)");
  Expect(scatter_mode == "effective" || scatter_mode == "fine" || scatter_mode == "both",
         "scatter mode must be effective, fine or both");
  Expect(farfield_directions >= 4, "at least 4 far-field directions");
  Expect(!eps_list.empty(), "eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i)
  {
    Expect(eps_list[i] > 0.0 && eps_list[i] < 1.0, "eps list entries must lie in (0, 1)");
    Expect(i == 0 || eps_list[i] < eps_list[i - 1], "eps list must be strictly decreasing");
  }
  Expect(k_min > 0.0 && k_max > k_min, "k range must be positive and increasing");
  Expect(dispersion_samples >= 2, "at least 2 dispersion samples");
  Expect(box[1] > box[0] && box[3] > box[2], "resonance box must be nonempty");
  Expect(grid >= 3, "resonance grid must be at least 3");
  Expect(resonance_mode == "effective" || resonance_mode == "fine" || resonance_mode == "oracle",
         "resonance mode must be effective, fine or oracle");
  Expect(resonance_r_factor > 1.0, "resonance truncation factor must exceed 1");
  Expect(resonance_h > 0.0, "resonance h must be positive");
  Expect(oracle_max_order >= 0, "oracle order must be nonnegative");
  Expect(refine_tolerance > 0.0, "refine tolerance must be positive");
  Expect(drift_radius > 0.0, "drift radius must be positive");
  Expect(threads >= 1, "threads must be at least 1");
  Expect(!out_dir.empty(), "output directory is empty");
  for (int c : check_criteria)
  {
    Expect(c >= 1 && c <= 12, "check criteria are numbered 1 to 12");
  }
}

double RunConfig::TruncationRadius() const
{
  return r > 0.0 ? r : 2.0 * Omega().Circumradius();
}

double RunConfig::SceneH(double eps) const
{
  if (h > 0.0)
  {
    return h;
  }
  return eps > 0.0 ? eps / h_per_eps : free_h;
}

std::string RunConfig::CanonicalText() const
{
  std::ostringstream os;
  os << std::setprecision(17);
  os << "shape=" << shape << "\nomega=" << omega << "\ncell_h=" << cell_h << "\nn_modes=" << n_modes
     << "\nk=" << k << "\ndirection_angle=" << direction_angle << "\nr=" << r
     << "\ndtn_modes=" << dtn_modes << "\nh=" << h << "\nh_per_eps=" << h_per_eps
     << "\nfree_h=" << free_h << "\nepsilon=" << epsilon << "\nscatter_mode=" << scatter_mode
     << "\nfarfield_directions=" << farfield_directions << "\neps_list=" << JoinNumbers(eps_list)
     << "\nk_min=" << k_min << "\nk_max=" << k_max << "\ndispersion_samples=" << dispersion_samples
     << "\nbox=" << JoinNumbers({box[0], box[1], box[2], box[3]}) << "\ngrid=" << grid
     << "\nresonance_mode=" << resonance_mode << "\nresonance_r_factor=" << resonance_r_factor
     << "\nresonance_h=" << resonance_h << "\noracle_max_order=" << oracle_max_order
     << "\nrefine_tolerance=" << refine_tolerance << "\ndrift_radius=" << drift_radius << "\nthreads=" << threads
     << "\nmedium_in=" << medium_in << "\ncheck=";
  for (std::size_t i = 0; i < check_criteria.size(); ++i)
  {
    os << (i ? "," : "") << check_criteria[i];
  }
  os << "\n";
  return os.str();
}

std::string RunConfig::Hash() const { return Sha256Hex(CanonicalText()); }

RunConfig LoadConfig(const std::string &path)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try
  {
    pt::read_ini(path, tree);
  }
  catch (const pt::ini_parser_error &e)
  {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  RunConfig c;
  using Setter = std::function<void(const std::string &)>;
  auto num = [](double &dst) { return Setter([&dst](const std::string &v)
                                             {
                                               const auto x = ParseNumberList(v);
                                               Expect(x.size() == 1, "expected one number, got '" + v + "'");
                                               dst = x[0];
                                             }); };
  auto integer = [](int &dst) { return Setter([&dst](const std::string &v)
                                              {
                                                const auto x = ParseNumberList(v);
                                                Expect(x.size() == 1 && x[0] == std::floor(x[0]),
                                                       "expected an integer, got '" + v + "'");
                                                dst = static_cast<int>(x[0]);
                                              }); };
  auto text = [](std::string &dst) { return Setter([&dst](const std::string &v) { dst = v; }); };
  const std::map<std::string, Setter> keys = {
      {"cell.shape", text(c.shape)},
      {"cell.h", num(c.cell_h)},
      {"cell.n_modes", integer(c.n_modes)},
      {"scatter.omega", text(c.omega)},
      {"scatter.k", num(c.k)},
      {"scatter.direction_angle", num(c.direction_angle)},
      {"scatter.r", num(c.r)},
      {"scatter.dtn_modes", integer(c.dtn_modes)},
      {"scatter.h", num(c.h)},
      {"scatter.h_per_eps", num(c.h_per_eps)},
      {"scatter.free_h", num(c.free_h)},
      {"scatter.eps", num(c.epsilon)},
      {"scatter.mode", text(c.scatter_mode)},
      {"scatter.farfield_directions", integer(c.farfield_directions)},
      {"rates.eps_list", Setter([&c](const std::string &v) { c.eps_list = ParseNumberList(v); })},
      {"dispersion.k_min", num(c.k_min)},
      {"dispersion.k_max", num(c.k_max)},
      {"dispersion.samples", integer(c.dispersion_samples)},
      {"resonances.box",
       Setter([&c](const std::string &v)
              {
                const auto x = ParseNumberList(v);
                Expect(x.size() == 4, "resonance box needs 4 numbers");
                c.box = {x[0], x[1], x[2], x[3]};
              })},
      {"resonances.grid", integer(c.grid)},
      {"resonances.mode", text(c.resonance_mode)},
      {"resonances.r_factor", num(c.resonance_r_factor)},
      {"resonances.h", num(c.resonance_h)},
      {"resonances.oracle_max_order", integer(c.oracle_max_order)},
      {"resonances.refine_tolerance", num(c.refine_tolerance)},
      {"resonances.drift_radius", num(c.drift_radius)},
      {"run.out_dir", text(c.out_dir)},
      {"run.threads", integer(c.threads)},
      {"run.medium_in", text(c.medium_in)},
      {"run.medium_out", text(c.medium_out)},
      {"run.check",
       Setter([&c](const std::string &v)
              {
                c.check_criteria.clear();
                for (double x : ParseNumberList(v))
                {
                  c.check_criteria.push_back(static_cast<int>(x));
                }
              })},
  };
  for (const auto &[section, entries] : tree)
  {
    if (entries.empty())
    {
      throw ConfigError("key '" + section + "' outside a section");
    }
    for (const auto &[key, value] : entries)
    {
      const std::string full = section + "." + key;
      const auto it = keys.find(full);
      if (it == keys.end())
      {
        throw ConfigError("unknown config key '" + full + "'");
      }
      it->second(value.data());
    }
  }
  return c;
}

}  // namespace subwave
