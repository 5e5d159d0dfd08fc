// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_ACCEPTANCE_HPP
#define SUBWAVE_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace subwave
{

struct CriterionResult
{
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0.0;
};

struct AcceptanceOptions
{
  std::string work_dir = "acceptance_work";  // scratch space for the determinism reruns
  int threads = 1;
  std::ostream *log = nullptr;
};

constexpr int kCriterionCount = 12;

const char *CriterionTitle(int id);

// Criteria the check subcommand runs when none are selected.
std::vector<int> QuickCriteria();

// Failures inside a criterion are reported as a failed result.
CriterionResult RunCriterion(int id, const AcceptanceOptions &options);

// "criterion,passed,metric,value" rows with fixed formatting.
void WriteCheckCsv(const std::vector<CriterionResult> &results, const std::string &path);

}  // namespace subwave

#endif  // SUBWAVE_ACCEPTANCE_HPP
