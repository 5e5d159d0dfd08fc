// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: subwave <cell|dispersion|scatter|rates|resonances|check> [options]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "subwave/config.hpp"
#include "subwave/pipeline.hpp"

namespace
{

struct Overrides
{
  std::string config_path;
  std::optional<int> threads;
  std::optional<std::string> eps_list, omega, shape, out_dir, box, mode, medium_in, medium_out, check;
  std::optional<double> k, eps, cell_h, r, h;
  std::optional<int> grid, n_modes, dtn_modes;
};

subwave::RunConfig BuildConfig(const Overrides &o, const std::string &command)
{
  using subwave::ConfigError;
  using subwave::ParseNumberList;
  subwave::RunConfig c = o.config_path.empty() ? subwave::RunConfig{} : subwave::LoadConfig(o.config_path);
  if (const char *env = std::getenv("SUBWAVE_THREADS"); env && *env)
  {
    const auto v = ParseNumberList(env);
    if (v.size() != 1)
    {
      throw ConfigError("SUBWAVE_THREADS must be one integer");
    }
    c.threads = static_cast<int>(v[0]);
  }
  if (o.threads) c.threads = *o.threads;
  if (o.eps_list) c.eps_list = ParseNumberList(*o.eps_list);
  if (o.omega) c.omega = *o.omega;
  if (o.shape) c.shape = *o.shape;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.medium_in) c.medium_in = *o.medium_in;
  if (o.medium_out) c.medium_out = *o.medium_out;
  if (o.k) c.k = *o.k;
  if (o.eps) c.epsilon = *o.eps;
  if (o.cell_h) c.cell_h = *o.cell_h;
  if (o.r) c.r = *o.r;
  if (o.h)
  {
    c.h = *o.h;
    c.resonance_h = *o.h;
  }
  if (o.grid) c.grid = *o.grid;
  if (o.n_modes) c.n_modes = *o.n_modes;
  if (o.dtn_modes) c.dtn_modes = *o.dtn_modes;
  if (o.box)
  {
    const auto v = ParseNumberList(*o.box);
    if (v.size() != 4)
    {
      throw ConfigError("--box needs re_min,re_max,im_min,im_max");
    }
    c.box = {v[0], v[1], v[2], v[3]};
  }
  if (o.mode)
  {
    if (command == "scatter")
    {
      c.scatter_mode = *o.mode;
    }
    else if (command == "resonances")
    {
      c.resonance_mode = *o.mode;
    }
    else
    {
      throw ConfigError("--mode applies to scatter and resonances only");
    }
  }
  if (o.check)
  {
    c.check_criteria.clear();
    for (double x : ParseNumberList(*o.check))
    {
      c.check_criteria.push_back(static_cast<int>(x));
    }
  }
  return c;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Homogenised and fine-scale wave scattering by high-contrast periodic media"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "INI run configuration");
  app.add_option("--threads", o.threads, "worker threads (default: SUBWAVE_THREADS or 1)");
  app.add_option("--eps-list", o.eps_list, "decreasing eps values, e.g. 1/8,1/16,1/32");
  app.add_option("--k", o.k, "wavenumber");
  app.add_option("--omega", o.omega, "macro domain: disk:R | rect:x0,y0,x1,y1 | polygon:...");
  app.add_option("--shape", o.shape, "inclusion: none | disk:cx,cy,r | rect:... | polygon:...");
  app.add_option("--out-dir", o.out_dir, "output directory");
  app.add_option("--box", o.box, "resonance box re_min,re_max,im_min,im_max");
  app.add_option("--grid", o.grid, "resonance scan grid size");
  app.add_option("--mode", o.mode, "scatter: effective|fine|both; resonances: effective|fine|oracle");
  app.add_option("--eps", o.eps, "period of the fine scatter solve");
  app.add_option("--cell-h", o.cell_h, "cell mesh size");
  app.add_option("--n-modes", o.n_modes, "Dirichlet modes kept (0: all)");
  app.add_option("--dtn-modes", o.dtn_modes, "DtN Fourier modes (0: automatic)");
  app.add_option("--r", o.r, "truncation radius (0: twice the circumradius)");
  app.add_option("--mesh-h", o.h, "scene mesh size override");
  app.add_option("--medium-in", o.medium_in, "load a serialised medium instead of rebuilding it");
  app.add_option("--medium-out", o.medium_out, "also write the medium to this path");
  app.add_option("--check", o.check, "criteria for the check subcommand, e.g. 1,2,5");

  for (const char *name : {"cell", "dispersion", "scatter", "rates", "resonances", "check"})
  {
    app.add_subcommand(name);
  }
  app.get_subcommand("cell")->description("cell spectrum, corrector and effective tensor");
  app.get_subcommand("dispersion")->description("mu0 over a k range, poles and band gaps");
  app.get_subcommand("scatter")->description("effective and/or fine scattering solve");
  app.get_subcommand("rates")->description("error report over the eps list with slope fits");
  app.get_subcommand("resonances")->description("resonance search and drift study");
  app.get_subcommand("check")->description("acceptance thresholds; exit code 4 on violation");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : subwave::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  subwave::RunConfig config;
  try
  {
    config = BuildConfig(o, command);
  }
  catch (const subwave::ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << "\n";
    return subwave::kExitConfig;
  }
  return subwave::RunCommand(command, config, std::cout, std::cerr);
}
