// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_PIPELINE_HPP
#define SUBWAVE_PIPELINE_HPP

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "subwave/config.hpp"
#include "subwave/helmholtz.hpp"
#include "subwave/homogenize.hpp"
#include "subwave/microcell.hpp"
#include "subwave/resonance.hpp"

namespace subwave
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitCheck = 4
};

const char *ArtifactVersion();

struct FileRecord
{
  std::string name;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest
{
  std::string command;
  std::string config_hash;
  std::string version = ArtifactVersion();
  int threads = 1;
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage
  std::vector<FileRecord> files;

  // Hashes out_dir/name and appends it to the inventory.
  void Record(const std::string &out_dir, const std::string &name);
  void Write(const std::string &path) const;  // JSON
  static RunManifest Read(const std::string &path);
};

// Appends the elapsed time of a stage to the manifest on destruction.
class StageTimer
{
public:
  StageTimer(RunManifest &manifest, std::string stage);
  ~StageTimer();
  StageTimer(const StageTimer &) = delete;
  StageTimer &operator=(const StageTimer &) = delete;

private:
  RunManifest &manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

// Versioned key-value text: shape, cell h, mesh hash, a0, |D| and the
// spectrum without eigenfunctions.
void WriteMediumFile(const EffectiveMedium &medium, const std::string &shape_spec,
                     const std::string &path);
// Rebuilds the cell mesh, checks its hash and recomputes the corrector.
// Throws ConfigError on a malformed file or a hash or a0 mismatch.
EffectiveMedium ReadMediumFile(const std::string &path, std::string *shape_spec = nullptr);

// The medium named by medium_in, else a freshly built one. A loaded medium
// must agree with the configured shape.
EffectiveMedium ObtainMedium(const RunConfig &config);

// Scene for Omega with eps (D + m) inclusions, or none when epsilon <= 0.
// h_far caps the exterior mesh size (0: the mesher's graded default).
ScatterScene MakeScene(const RunConfig &config, const EffectiveMedium &medium, double epsilon,
                       double h, double r, double h_far = 0.0);

struct RateStudy
{
  std::vector<ErrorRow> rows;
  std::map<std::string, RateFit> fits;  // by error column
};

// Fine, effective and reconstruction solves for every eps in the list.
RateStudy RunRateStudy(const RunConfig &config, const EffectiveMedium &medium,
                       std::ostream *log = nullptr);

// Subcommands write into config.out_dir and return the manifest (already
// written as manifest.json).
RunManifest CmdCell(const RunConfig &config, std::ostream &log);
RunManifest CmdDispersion(const RunConfig &config, std::ostream &log);
RunManifest CmdScatter(const RunConfig &config, std::ostream &log);
RunManifest CmdRates(const RunConfig &config, std::ostream &log);
RunManifest CmdResonances(const RunConfig &config, std::ostream &log);
// Runs the selected acceptance criteria; *all_passed reports the verdict.
RunManifest CmdCheck(const RunConfig &config, std::ostream &log, bool *all_passed);

// Validates, dispatches and maps failures to exit codes.
int RunCommand(const std::string &command, const RunConfig &config, std::ostream &log,
               std::ostream &err);

}  // namespace subwave

#endif  // SUBWAVE_PIPELINE_HPP
