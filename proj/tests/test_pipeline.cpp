// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "subwave/pipeline.hpp"

using namespace subwave;
namespace fs = std::filesystem;

namespace
{

fs::path Scratch(const std::string &name)
{
  const fs::path p = fs::temp_directory_path() / ("subwave_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string Slurp(const fs::path &p)
{
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("medium file round trip and tamper detection")
{
  const fs::path dir = Scratch("medium");
  const EffectiveMedium m = BuildEffectiveMedium(ParseShapeSpec("disk:0.5,0.5,0.25"), 1.0 / 8.0, 0);
  const std::string path = (dir / "medium.txt").string();
  WriteMediumFile(m, "disk:0.5,0.5,0.25", path);
  std::string spec;
  const EffectiveMedium back = ReadMediumFile(path, &spec);
  CHECK(spec == "disk:0.5,0.5,0.25");
  CHECK(back.mesh_hash == m.mesh_hash);
  CHECK((back.a0 - m.a0).norm() < 1e-9);
  REQUIRE(back.spectrum.size() == m.spectrum.size());
  for (std::size_t j = 0; j < m.spectrum.size(); ++j)
  {
    CHECK(back.spectrum.eigenvalues[j] == doctest::Approx(m.spectrum.eigenvalues[j]).epsilon(1e-12));
  }
  CHECK(std::abs(back.Mu0(3.0) - m.Mu0(3.0)) < 1e-9);

  std::string text = Slurp(path);
  const auto pos = text.find("mesh_hash = ");
  REQUIRE(pos != std::string::npos);
  text[pos + 12] = text[pos + 12] == 'a' ? 'b' : 'a';
  const std::string bad = (dir / "tampered.txt").string();
  std::ofstream(bad) << text;
  CHECK_THROWS_AS(ReadMediumFile(bad), ConfigError);
  CHECK_THROWS_AS(ReadMediumFile((dir / "missing.txt").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("manifest round trip")
{
  const fs::path dir = Scratch("manifest");
  std::ofstream(dir / "a.txt") << "abc";
  RunManifest m;
  m.command = "cell";
  m.config_hash = "1234";
  m.timings = {{"solve", 0.5}};
  m.Record(dir.string(), "a.txt");
  REQUIRE(m.files.size() == 1);
  CHECK(m.files[0].sha256 == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(m.files[0].bytes == 3);
  m.Write((dir / "manifest.json").string());
  const RunManifest r = RunManifest::Read((dir / "manifest.json").string());
  CHECK(r.command == "cell");
  CHECK(r.config_hash == "1234");
  CHECK(r.version == ArtifactVersion());
  CHECK(r.files[0].sha256 == m.files[0].sha256);
  REQUIRE(r.timings.size() == 1);
  CHECK(r.timings[0].second == 0.5);
  fs::remove_all(dir);
}

TEST_CASE("command exit codes")
{
  const fs::path dir = Scratch("commands");
  std::ostringstream log, err;
  RunConfig bad;
  bad.shape = "disk:0.5,0.5,0.6";
  bad.out_dir = dir.string();
  CHECK(RunCommand("cell", bad, log, err) == kExitConfig);
  CHECK(RunCommand("nonsense", RunConfig{}, log, err) == kExitConfig);
  RunConfig box;
  box.box = {0.0, 2.0, -1.0, 0.0};
  box.out_dir = dir.string();
  box.resonance_mode = "oracle";
  CHECK(RunCommand("resonances", box, log, err) == kExitConfig);

  SUBCASE("dispersion below the first Dirichlet frequency has no gap")
  {
    RunConfig c;
    c.cell_h = 1.0 / 8.0;
    c.k_min = 0.5;
    c.k_max = 2.5;
    c.dispersion_samples = 50;
    c.out_dir = dir.string();
    REQUIRE(RunCommand("dispersion", c, log, err) == kExitOk);
    CHECK(Slurp(dir / "gaps.csv") == "gap_start,gap_end\n");
    CHECK(fs::exists(dir / "manifest.json"));
  }
  fs::remove_all(dir);
}
