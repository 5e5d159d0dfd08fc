// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <doctest.h>

#include "subwave/resonance.hpp"

using namespace subwave;

namespace
{

std::function<cplx(cplx)> Constant(double mu)
{
  return [mu](cplx) { return cplx(mu); };
}

const SearchBox kBox{2.0, 7.0, -3.0, -0.2};

}  // namespace

TEST_CASE("search box validation and sector")
{
  CHECK_NOTHROW(ValidateBox(kBox));
  CHECK_THROWS_AS(ValidateBox({0.05, 2.0, -1.0, 0.0}), ResonanceError);
  CHECK_THROWS_AS(ValidateBox({1.0, 2.0, -1.0, 0.2}), ResonanceError);
  CHECK_THROWS_AS(ValidateBox({2.0, 1.0, -1.0, 0.0}), ResonanceError);
  CHECK_THROWS_AS(ValidateBox({1.0, 2.0, -3.0, -2.0}), ResonanceError);
  CHECK(InSector({1.0, -0.5}));
  CHECK(InSector({1.0, 0.05}));
  CHECK_FALSE(InSector({1.0, 0.1}));
  CHECK_FALSE(InSector({0.05, -0.01}));
  CHECK_FALSE(InSector({1.0, -0.9}));
  const SearchBox b = SearchBox::Around({3.0, -1.0}, 0.5);
  CHECK(b.Contains({3.4, -0.6}));
  CHECK_FALSE(b.Contains({3.6, -1.0}));
  CHECK(b.Contains({3.6, -1.0}, 0.2));
}

TEST_CASE("a homogeneous background has no resonances")
{
  for (int n = 0; n <= 3; ++n)
  {
    CHECK(DiskModeOracle(1.0, Constant(1.0), 0.5, n, kBox).empty());
  }
}

TEST_CASE("disk mode roots")
{
  const double a0 = 0.68, radius = 0.5;
  const auto mu = Constant(1.8);
  int total = 0;
  for (int n = 0; n <= 3; ++n)
  {
    const auto roots = DiskModeOracle(a0, mu, radius, n, kBox);
    const auto mirror = DiskModeOracle(a0, mu, radius, -n, kBox);
    CHECK(roots.size() == mirror.size());
    for (std::size_t i = 0; i < roots.size() && i < mirror.size(); ++i)
    {
      CHECK(std::abs(roots[i].z - mirror[i].z) < 1e-9);
    }
    for (const auto &r : roots)
    {
      ++total;
      CHECK(r.n == n);
      CHECK(r.z.imag() < 0.0);
      CHECK(r.residual < 1e-10);
      CHECK(kBox.Contains(r.z));
      // Real coefficients: the reflection -conj(z) is a root as well.
      double scale = 0.0;
      const cplx d = DiskModeDeterminant(a0, mu, radius, n, -std::conj(r.z), &scale);
      CHECK(std::abs(d) / scale < 1e-8);
    }
  }
  CHECK(total > 0);
}

TEST_CASE("grid search agrees with Newton on the oracle determinant")
{
  const double a0 = 0.68, radius = 0.5;
  const auto mu = Constant(1.8);
  for (int n = 0; n <= 1; ++n)
  {
    const auto roots = DiskModeOracle(a0, mu, radius, n, kBox);
    const ResonanceSet set = FindResonances(ResonanceSystem::OracleMode(a0, mu, radius, n), kBox);
    for (const auto &r : roots)
    {
      if (!kBox.Contains(r.z, -0.1))
      {
        continue;  // near the edge the scan may legitimately miss it
      }
      double best = std::numeric_limits<double>::infinity();
      for (const auto &e : set.resonances)
      {
        best = std::min(best, std::abs(e.z - r.z));
      }
      CHECK(best < 1e-5);
    }
  }
}

TEST_CASE("empty result and band-gap real axis")
{
  const ResonanceSet none = FindResonances(ResonanceSystem::OracleMode(1.0, Constant(1.0), 0.5, 0), kBox);
  CHECK(none.resonances.empty());
  const ResonanceSystem gap = ResonanceSystem::OracleMode(0.68, Constant(-2.0), 0.5, 0);
  double lowest = std::numeric_limits<double>::infinity();
  for (double x = 0.5; x <= 12.0; x += 0.05)
  {
    lowest = std::min(lowest, gap.Probe({x, 0.0}).indicator);
  }
  CHECK(lowest > 1e-3);
  CHECK(gap.tag() == SystemTag::kOracleMode);
}

TEST_CASE("limit classification")
{
  DirichletSpectrum s;
  s.eigenvalues = {4.0, 9.0};
  s.means = {0.3, 0.0};
  s.classes = {ModeClass::kNonzeroMean, ModeClass::kZeroMean};
  s.eigenspace = {0, 1};
  const std::vector<cplx> eff = {{5.0, -1.0}};

  const auto a = ClassifyLimit({2.05, -0.01}, s, eff);
  CHECK(a.cls == LimitClass::kNonzeroMeanEigenvalue);
  CHECK(a.pathological);
  CHECK(a.nearest == cplx(2.0));

  const auto b = ClassifyLimit({3.01, 0.0}, s, eff);
  CHECK(b.cls == LimitClass::kZeroMeanEigenvalue);
  CHECK_FALSE(b.pathological);

  const auto c = ClassifyLimit({5.0, -0.9}, s, eff);
  CHECK(c.cls == LimitClass::kEffectiveResonance);
  CHECK(c.distance == doctest::Approx(0.1));
}

TEST_CASE("drift study with a family converging to its limit")
{
  const double a0 = 0.68, radius = 0.5;
  const auto roots = DiskModeOracle(a0, Constant(1.8), radius, 0, kBox);
  REQUIRE_FALSE(roots.empty());
  const cplx z0 = roots.front().z;
  auto family = [&](double eps) { return ResonanceSystem::OracleMode(a0, Constant(1.8 + 0.5 * eps), radius, 0); };
  SearchOptions opt;
  opt.grid = 7;
  const DriftStudy d = RunDriftStudy(z0, 0.3, {0.2, 0.1, 0.05}, family, opt);
  REQUIRE(d.rows.size() == 3);
  CHECK(d.compared_steps == 2);
  CHECK(d.nonincreasing_steps == 2);
  CHECK(d.rows[2].distance < d.rows[0].distance);

  auto empty = [](double) { return ResonanceSystem::OracleMode(1.0, Constant(1.0), 0.5, 0); };
  const DriftStudy c = RunDriftStudy(z0, 0.3, {0.2, 0.1}, empty, opt);
  CHECK(c.rows[0].censored);
  CHECK(c.rows[1].censored);
  CHECK(c.compared_steps == 0);
}

TEST_CASE("refinement moves coarse hits onto the finer system's roots")
{
  const double a0 = 0.68, radius = 0.5;
  const ResonanceSet coarse = FindResonances(ResonanceSystem::OracleMode(a0, Constant(1.8), radius, 0), kBox);
  REQUIRE_FALSE(coarse.resonances.empty());
  SearchOptions lo;
  lo.grid = 3;
  const ResonanceSet refined =
      RefineResonances(coarse, ResonanceSystem::OracleMode(a0, Constant(1.81), radius, 0), 0.05, lo);
  const auto roots = DiskModeOracle(a0, Constant(1.81), radius, 0, kBox);
  CHECK(refined.resonances.size() == coarse.resonances.size());
  for (const auto &e : refined.resonances)
  {
    double best = std::numeric_limits<double>::infinity();
    for (const auto &r : roots)
    {
      best = std::min(best, std::abs(e.z - r.z));
    }
    CHECK(best < 1e-5);
  }
}
