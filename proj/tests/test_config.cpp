// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "subwave/config.hpp"

using namespace subwave;

namespace
{

std::string WriteTemp(const std::string &name, const std::string &text)
{
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("number lists accept commas, spaces and fractions")
{
  const auto v = ParseNumberList("1/8, 1/16 0.03125");
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 0.125);
  CHECK(v[1] == 0.0625);
  CHECK(v[2] == 0.03125);
  CHECK_THROWS_AS(ParseNumberList("1/8,abc"), ConfigError);
}

TEST_CASE("shape and domain specs")
{
  CHECK(ParseShapeSpec("none").empty());
  CHECK(ParseShapeSpec("disk:0.5,0.5,0.25").kind() == InclusionShape::Kind::kDisk);
  CHECK(ParseShapeSpec("rect:0.25,0.25,0.75,0.75").kind() == InclusionShape::Kind::kRectangle);
  CHECK(ParseShapeSpec("polygon:0.3,0.3,0.7,0.3,0.5,0.7").kind() == InclusionShape::Kind::kPolygon);
  CHECK_THROWS_AS(ParseShapeSpec("disk:0.5,0.5,0.6"), ConfigError);
  CHECK_THROWS_AS(ParseShapeSpec("ellipse:1,2"), ConfigError);
  CHECK(ParseOmegaSpec("disk:0.5").kind() == MacroDomain::Kind::kDisk);
  CHECK_THROWS_AS(ParseOmegaSpec("disk:0.5,1"), ConfigError);
}

TEST_CASE("validation")
{
  RunConfig c;
  CHECK_NOTHROW(c.Validate());
  c.eps_list = {1.0 / 16.0, 1.0 / 8.0};
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = RunConfig{};
  c.k_min = 2.0;
  c.k_max = 1.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = RunConfig{};
  c.shape = "disk:0.5,0.5,0.45";  // wall distance 0.05 < 2 cell h
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = RunConfig{};
  c.r = 0.4;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("config files")
{
  const auto path = WriteTemp("subwave_cfg_ok.ini",
                              "[cell]\nshape = rect:0.25,0.25,0.75,0.75\nh = 1/20\n"
                              "[scatter]\nomega = rect:-0.5,-0.5,0.5,0.5\nk = 3.5\n"
                              "[rates]\neps_list = 1/4, 1/8, 1/16\n"
                              "[resonances]\nbox = 1, 2, -1, 0\n[run]\nout_dir = somewhere\nthreads = 2\n");
  const RunConfig c = LoadConfig(path);
  CHECK(c.cell_h == 0.05);
  CHECK(c.k == 3.5);
  CHECK(c.eps_list.size() == 3);
  CHECK(c.box[3] == 0.0);
  CHECK(c.threads == 2);
  CHECK(c.out_dir == "somewhere");
  CHECK_NOTHROW(c.Validate());

  const auto bad = WriteTemp("subwave_cfg_bad.ini", "[scatter]\nwavenumber = 3\n");
  CHECK_THROWS_AS(LoadConfig(bad), ConfigError);
}

TEST_CASE("config hash follows the content")
{
  RunConfig a, b;
  CHECK(a.Hash() == b.Hash());
  b.k = 4.5;
  CHECK(a.Hash() != b.Hash());
  CHECK(a.Hash().size() == 64);
}
