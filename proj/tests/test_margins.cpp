#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lpcop/margins.hpp"

using lpcop::EmpiricalMargin;
using lpcop::fit_margin;

TEST(FitMargin, BalancedBinary) {
  const std::vector<double> s{0, 1, 0, 1};
  const EmpiricalMargin m = fit_margin(s);
  ASSERT_EQ(m.unique_count(), 2u);
  EXPECT_DOUBLE_EQ(m.masses()[0], 0.5);
  EXPECT_DOUBLE_EQ(m.masses()[1], 0.5);
  EXPECT_DOUBLE_EQ(m.midcdf()[0], 0.25);
  EXPECT_DOUBLE_EQ(m.midcdf()[1], 0.75);
}

TEST(FitMargin, DegenerateSinglePoint) {
  const std::vector<double> s{5};
  const EmpiricalMargin m = fit_margin(s);
  EXPECT_EQ(m.unique_count(), 1u);
  EXPECT_DOUBLE_EQ(m.masses()[0], 1.0);
  EXPECT_DOUBLE_EQ(m.cube_sum(), 1.0);
  EXPECT_TRUE(m.degenerate());
}

TEST(FitMargin, TieFreeMidRanks) {
  const std::vector<double> s{3, 1, 2};
  const EmpiricalMargin m = fit_margin(s);
  ASSERT_EQ(m.unique_count(), 3u);
  EXPECT_NEAR(m.midcdf()[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.midcdf()[1], 0.5, 1e-15);
  EXPECT_NEAR(m.midcdf()[2], 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.cube_sum(), 1.0 / 9.0, 1e-15);
}

TEST(FitMargin, Errors) {
  EXPECT_THROW(fit_margin(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(fit_margin(std::vector<double>{1.0, NAN}),
               std::invalid_argument);
  EXPECT_THROW(fit_margin(std::vector<double>{1.0, INFINITY}),
               std::invalid_argument);
}

TEST(FitMargin, InvariantsOnRandomSamples) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> s;
    const int n = 5 + static_cast<int>(gen() % 200);
    const bool ties = rep % 2 == 0;
    for (int i = 0; i < n; ++i) {
      s.push_back(ties ? static_cast<double>(gen() % 13)
                       : std::uniform_real_distribution<>(0, 1)(gen));
    }
    const EmpiricalMargin m = fit_margin(s);
    double mass = 0.0;
    for (double p : m.masses()) {
      EXPECT_GT(p, 0.0);
      mass += p;
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(m.cdf().back(), 1.0, 1e-12);
    for (std::size_t i = 0; i < m.unique_count(); ++i) {
      EXPECT_DOUBLE_EQ(m.midcdf()[i], m.cdf()[i] - m.masses()[i] / 2.0);
      if (i > 0) EXPECT_GT(m.cdf()[i], m.cdf()[i - 1]);
    }

    // mean of F_mid over the sample is exactly 1/2; variance is
    // (1 - sum p^3)/12 with divisor n
    double mean = 0.0, var = 0.0;
    for (double x : s) mean += m.mid(x);
    mean /= static_cast<double>(n);
    EXPECT_NEAR(mean, 0.5, 1e-12);
    for (double x : s) var += (m.mid(x) - 0.5) * (m.mid(x) - 0.5);
    var /= static_cast<double>(n);
    EXPECT_NEAR(var, (1.0 - m.cube_sum()) / 12.0, 1e-12);
  }
}

TEST(FitMargin, MonotoneTransformInvariance) {
  const std::vector<double> s{4, 1, 1, 3, 9, 9, 9, 2};
  std::vector<double> g;
  for (double x : s) g.push_back(std::exp(x / 3.0));
  const EmpiricalMargin a = fit_margin(s);
  const EmpiricalMargin b = fit_margin(g);
  ASSERT_EQ(a.unique_count(), b.unique_count());
  for (std::size_t i = 0; i < a.unique_count(); ++i) {
    EXPECT_DOUBLE_EQ(a.masses()[i], b.masses()[i]);
    EXPECT_DOUBLE_EQ(a.cdf()[i], b.cdf()[i]);
    EXPECT_DOUBLE_EQ(a.midcdf()[i], b.midcdf()[i]);
  }
}

TEST(MidDistribution, BinaryLookups) {
  // one zero among four points: p(0) = 1/4
  const std::vector<double> s{0, 1, 1, 1};
  const EmpiricalMargin m = fit_margin(s);
  EXPECT_DOUBLE_EQ(lpcop::mid_distribution(m, 0), 0.125);
  EXPECT_DOUBLE_EQ(lpcop::mid_distribution(m, 1), 0.625);
  EXPECT_THROW(lpcop::mid_distribution(m, 0.5), std::invalid_argument);
}

TEST(MidDistribution, MidRankCount) {
  const EmpiricalMargin m = fit_margin(std::vector<double>{3, 1, 2});
  EXPECT_NEAR(lpcop::mid_distribution(m, 2), 0.5, 1e-15);
}

TEST(Quantile, JumpConvention) {
  const EmpiricalMargin m = fit_margin(std::vector<double>{0, 1});
  EXPECT_DOUBLE_EQ(lpcop::quantile(m, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(lpcop::quantile(m, 0.500001), 1.0);
  EXPECT_DOUBLE_EQ(lpcop::quantile(m, 1.0), 1.0);
  EXPECT_THROW(lpcop::quantile(m, 0.0), std::invalid_argument);
  EXPECT_THROW(lpcop::quantile(m, 1.0 + 1e-12), std::invalid_argument);
}

TEST(Quantile, StepsOfThree) {
  const EmpiricalMargin m = fit_margin(std::vector<double>{3, 1, 2});
  EXPECT_DOUBLE_EQ(lpcop::quantile(m, 0.34), 2.0);
  EXPECT_DOUBLE_EQ(lpcop::quantile(m, 1.0 / 3.0), 1.0);
}

TEST(PseudoObservations, Basic) {
  const std::vector<double> x{0, 1}, y{0, 1};
  const auto ps = lpcop::pseudo_observations(x, y);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_DOUBLE_EQ(ps[0].first, 0.25);
  EXPECT_DOUBLE_EQ(ps[0].second, 0.25);
  EXPECT_DOUBLE_EQ(ps[1].first, 0.75);
  EXPECT_DOUBLE_EQ(ps[1].second, 0.75);
}

TEST(PseudoObservations, ReversedRanks) {
  const std::vector<double> x{1, 2, 3}, y{3, 2, 1};
  const auto ps = lpcop::pseudo_observations(x, y);
  const double e[3] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(ps[i].first, e[i], 1e-15);
    EXPECT_NEAR(ps[i].second, e[2 - i], 1e-15);
  }
}

TEST(PseudoObservations, AllTies) {
  const std::vector<double> x{7, 7, 7}, y{1, 2, 3};
  const auto ps = lpcop::pseudo_observations(x, y);
  for (const auto& [u, v] : ps) EXPECT_DOUBLE_EQ(u, 0.5);
}

TEST(PseudoObservations, LengthMismatch) {
  EXPECT_THROW(
      lpcop::pseudo_observations(std::vector<double>{1}, std::vector<double>{}),
      std::invalid_argument);
}

TEST(PseudoObservations, PermutationEquivariance) {
  std::vector<double> x{5, 2, 2, 9, 1}, y{1, 4, 4, 4, 2};
  const auto base = lpcop::pseudo_observations(x, y);
  std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  std::vector<double> xp, yp;
  for (auto i : perm) {
    xp.push_back(x[i]);
    yp.push_back(y[i]);
  }
  const auto permuted = lpcop::pseudo_observations(xp, yp);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_DOUBLE_EQ(permuted[i].first, base[perm[i]].first);
    EXPECT_DOUBLE_EQ(permuted[i].second, base[perm[i]].second);
  }
}
