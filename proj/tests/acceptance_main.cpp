// SPDX-License-Identifier: Apache-2.0
//
// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Usage: subwave_acceptance [work_dir] [criterion ids...]

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "subwave/acceptance.hpp"

int main(int argc, char **argv)
{
  subwave::AcceptanceOptions opt;
  opt.work_dir = argc > 1 ? argv[1] : "acceptance_work";
  opt.log = &std::cerr;
  std::filesystem::create_directories(opt.work_dir);
  std::vector<int> ids;
  for (int i = 2; i < argc; ++i)
  {
    ids.push_back(std::atoi(argv[i]));
  }
  if (ids.empty())
  {
    for (int id = 1; id <= subwave::kCriterionCount; ++id)
    {
      ids.push_back(id);
    }
  }
  std::vector<subwave::CriterionResult> results;
  int failed = 0;
  for (int id : ids)
  {
    const subwave::CriterionResult r = subwave::RunCriterion(id, opt);
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << ": "
              << r.summary << " (" << r.seconds << " s)" << std::endl;
    failed += r.passed ? 0 : 1;
    results.push_back(r);
  }
  subwave::WriteCheckCsv(results, opt.work_dir + "/acceptance_results.csv");
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
