// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_CONFIG_HPP
#define SUBWAVE_CONFIG_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "subwave/geometry.hpp"

namespace subwave
{

// Invalid or inconsistent run configuration (exit code 2).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// "none", "disk:cx,cy,r", "rect:x0,y0,x1,y1", "polygon:x1,y1,x2,y2,...".
InclusionShape ParseShapeSpec(const std::string &spec);
// "disk:R", "rect:x0,y0,x1,y1", "polygon:x1,y1,...".
MacroDomain ParseOmegaSpec(const std::string &spec);
// Comma- or space-separated numbers.
std::vector<double> ParseNumberList(const std::string &text);

struct RunConfig
{
  std::string shape = "disk:0.5,0.5,0.25";
  std::string omega = "disk:0.5";
  double cell_h = 1.0 / 12.0;
  int n_modes = 0;  // 0: every discrete mode

  double k = 4.0;
  double direction_angle = 0.0;  // incidence angle of the plane wave
  double r = 0.0;                // 0: twice the circumradius of Omega
  int dtn_modes = 0;             // 0: ceil(|z| r) + 15
  double h = 0.0;                // 0: eps / h_per_eps, or free_h without inclusions
  double h_per_eps = 12.0;
  double free_h = 0.01;
  double epsilon = 1.0 / 16.0;
  std::string scatter_mode = "both";  // effective | fine | both
  int farfield_directions = 128;

  std::vector<double> eps_list = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0};

  double k_min = 0.5;
  double k_max = 15.0;
  int dispersion_samples = 600;

  std::array<double, 4> box = {3.0, 6.5, -3.5, -1.0};  // re_min re_max im_min im_max
  int grid = 12;
  std::string resonance_mode = "effective";  // effective | fine | oracle
  double resonance_r_factor = 1.2;           // truncation radius / circumradius
  double resonance_h = 0.01;
  int oracle_max_order = 8;
  double refine_tolerance = 1e-6;
  double drift_radius = 1.2;  // half-width of the fine-scale search box around z0

  std::string out_dir = "out";
  int threads = 1;
  std::string medium_in;
  std::string medium_out;
  std::vector<int> check_criteria;  // empty: the quick set

  // Throws ConfigError on any inconsistency.
  void Validate() const;
  InclusionShape Shape() const { return ParseShapeSpec(shape); }
  MacroDomain Omega() const { return ParseOmegaSpec(omega); }
  double TruncationRadius() const;
  // Scene mesh size for the given eps (0 for no inclusions).
  double SceneH(double eps) const;

  // Fixed-order text of every field; the config hash is its SHA-256.
  std::string CanonicalText() const;
  std::string Hash() const;
};

// Sections [cell], [scatter], [rates], [dispersion], [resonances], [run]
// with key = value lines; unknown keys are rejected.
RunConfig LoadConfig(const std::string &path);

}  // namespace subwave

#endif  // SUBWAVE_CONFIG_HPP
