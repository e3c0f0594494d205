#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "lpcop/lp_basis.hpp"

using lpcop::EmpiricalMargin;
using lpcop::LPBasis;
using lpcop::fit_margin;

namespace {

// Independent construction of the orthonormal system: weighted QR of the
// Vandermonde matrix in the mid-rank score, used as an oracle against the
// Gram-Schmidt path.
Eigen::MatrixXd qr_basis_oracle(const EmpiricalMargin& m, int deg) {
  const int k = static_cast<int>(m.unique_count());
  Eigen::VectorXd p(k), t1(k);
  const double scale = std::sqrt(12.0) / std::sqrt(1.0 - m.cube_sum());
  for (int i = 0; i < k; ++i) {
    p(i) = m.masses()[static_cast<std::size_t>(i)];
    t1(i) = scale * (m.midcdf()[static_cast<std::size_t>(i)] - 0.5);
  }
  Eigen::MatrixXd V(k, deg + 1);
  for (int i = 0; i < k; ++i) {
    double pow = 1.0;
    for (int j = 0; j <= deg; ++j) {
      V(i, j) = pow;
      pow *= t1(i);
    }
  }
  const Eigen::VectorXd w = p.cwiseSqrt();
  const Eigen::MatrixXd WV = w.asDiagonal() * V;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(WV);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(k, deg + 1);
  Eigen::MatrixXd R = qr.matrixQR().topRows(deg + 1).triangularView<Eigen::Upper>();
  // columns of diag(1/w) Q are orthonormal under p; fix signs with R's diagonal
  Eigen::MatrixXd T = w.cwiseInverse().asDiagonal() * Q;
  for (int j = 0; j <= deg; ++j) {
    if (R(j, j) < 0) T.col(j) = -T.col(j);
  }
  return T.rightCols(deg);  // drop the constant column
}

double p_dot(const EmpiricalMargin& m, const Eigen::VectorXd& a,
             const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    s += m.masses()[static_cast<std::size_t>(i)] * a(i) * b(i);
  }
  return s;
}

}  // namespace

TEST(BuildBasis, BalancedBinaryScores) {
  const LPBasis b(fit_margin(std::vector<double>{0, 1, 0, 1}), 1);
  EXPECT_NEAR(b.eval_T(1, 0), -1.0, 1e-12);
  EXPECT_NEAR(b.eval_T(1, 1), 1.0, 1e-12);
}

TEST(BuildBasis, SkewedBinaryScores) {
  // p(0) = 1/4: T1(0) = -sqrt((1-p)/p), T1(1) = sqrt(p/(1-p))
  const LPBasis b(fit_margin(std::vector<double>{0, 1, 1, 1}), 1);
  EXPECT_NEAR(b.eval_T(1, 0), -std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(b.eval_T(1, 1), 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(BuildBasis, TenDistinctValuesLinearColumn) {
  std::vector<double> s(10);
  for (int i = 0; i < 10; ++i) s[static_cast<std::size_t>(i)] = i * 1.5 - 2.0;
  const LPBasis b(fit_margin(s), 4);
  const double denom = std::sqrt(1.0 - 0.01);
  for (int i = 0; i < 10; ++i) {
    const double expect = std::sqrt(12.0) * ((i + 0.5) / 10.0 - 0.5) / denom;
    EXPECT_NEAR(b.table()(i, 0), expect, 1e-12);
  }
}

TEST(BuildBasis, Errors) {
  EXPECT_THROW(LPBasis(fit_margin(std::vector<double>{2, 2, 2}), 1),
               std::invalid_argument);
  EXPECT_THROW(LPBasis(fit_margin(std::vector<double>{1, 2, 3}), 3),
               std::invalid_argument);
  EXPECT_THROW(LPBasis(fit_margin(std::vector<double>{1, 2, 3}), 0),
               std::invalid_argument);
}

TEST(BuildBasis, MatchesQROracle) {
  std::mt19937_64 gen(11);
  std::vector<double> s;
  for (int i = 0; i < 40; ++i) {
    s.push_back(static_cast<double>(gen() % 9));  // heavy ties
  }
  const EmpiricalMargin m = fit_margin(s);
  const int deg = static_cast<int>(m.unique_count()) - 1;
  const LPBasis b(m, static_cast<std::size_t>(deg));
  const Eigen::MatrixXd oracle = qr_basis_oracle(m, deg);
  ASSERT_EQ(b.table().cols(), oracle.cols());
  for (Eigen::Index j = 0; j < oracle.cols(); ++j) {
    for (Eigen::Index i = 0; i < oracle.rows(); ++i) {
      EXPECT_NEAR(b.table()(i, j), oracle(i, j), 1e-8);
    }
  }
}

TEST(BuildBasis, OrthonormalWithAndWithoutTies) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<double> s;
    const int n = 6 + static_cast<int>(gen() % 300);
    const bool ties = rep % 2 == 0;
    for (int i = 0; i < n; ++i) {
      s.push_back(ties ? static_cast<double>(gen() % 17)
                       : std::uniform_real_distribution<>(-3, 3)(gen));
    }
    const EmpiricalMargin m = fit_margin(s);
    if (m.degenerate()) continue;
    const std::size_t deg = std::min<std::size_t>(m.unique_count() - 1, 8);
    const LPBasis b(m, deg);
    for (std::size_t j = 1; j <= b.effective_degree(); ++j) {
      const Eigen::VectorXd cj = b.table().col(static_cast<Eigen::Index>(j - 1));
      EXPECT_NEAR(p_dot(m, cj, Eigen::VectorXd::Ones(cj.size())), 0.0, 1e-9);
      for (std::size_t k = j; k <= b.effective_degree(); ++k) {
        const Eigen::VectorXd ck =
            b.table().col(static_cast<Eigen::Index>(k - 1));
        EXPECT_NEAR(p_dot(m, cj, ck), j == k ? 1.0 : 0.0, 1e-9);
      }
    }
  }
}

TEST(BuildBasis, RankInvariance) {
  const std::vector<double> s{0.3, 1.2, 1.2, 5.0, 2.2, 0.3, 9.1};
  std::vector<double> g;
  for (double x : s) g.push_back(std::atan(x) * 7 + 2);
  const LPBasis a(fit_margin(s), 3);
  const LPBasis b(fit_margin(g), 3);
  ASSERT_EQ(a.effective_degree(), b.effective_degree());
  for (Eigen::Index i = 0; i < a.table().rows(); ++i) {
    for (Eigen::Index j = 0; j < a.table().cols(); ++j) {
      EXPECT_DOUBLE_EQ(a.table()(i, j), b.table()(i, j));
    }
  }
}

TEST(BuildBasis, T1AffineInMidRanksForTieFreeSamples) {
  std::vector<double> s{0.9, 0.1, 0.4, 0.7, 0.2, 0.55};
  const EmpiricalMargin m = fit_margin(s);
  const LPBasis b(m, 2);
  // positive slope against midcdf
  double prev = -1e9;
  for (Eigen::Index i = 0; i < b.table().rows(); ++i) {
    EXPECT_GT(b.table()(i, 0), prev);
    prev = b.table()(i, 0);
  }
}

TEST(BuildBasis, ColumnsArePolynomialsInT1) {
  // exact polynomial regression of column j on powers of T1 leaves no
  // residual
  std::vector<double> s;
  std::mt19937_64 gen(5);
  for (int i = 0; i < 60; ++i) s.push_back(static_cast<double>(gen() % 11));
  const EmpiricalMargin m = fit_margin(s);
  const std::size_t deg = std::min<std::size_t>(m.unique_count() - 1, 5);
  const LPBasis b(m, deg);
  const Eigen::Index k = b.table().rows();
  for (std::size_t j = 1; j <= b.effective_degree(); ++j) {
    Eigen::MatrixXd V(k, static_cast<Eigen::Index>(j) + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      double pw = 1.0;
      for (std::size_t c = 0; c <= j; ++c) {
        V(i, static_cast<Eigen::Index>(c)) = pw;
        pw *= b.table()(i, 0);
      }
    }
    const Eigen::VectorXd col = b.table().col(static_cast<Eigen::Index>(j - 1));
    const Eigen::VectorXd fit = V * V.colPivHouseholderQr().solve(col);
    EXPECT_LT((fit - col).norm(), 1e-9);
  }
}

TEST(BuildBasis, TruncatesAtRankDeficiency) {
  // binary margin: only one basis function can exist, requesting more than
  // unique-1 is an error rather than a truncation
  EXPECT_THROW(LPBasis(fit_margin(std::vector<double>{0, 0, 1, 1}), 2),
               std::invalid_argument);
  // a margin with 30 distinct values truncates well before degree 29
  std::vector<double> s(30);
  for (int i = 0; i < 30; ++i) s[static_cast<std::size_t>(i)] = i;
  const LPBasis b(fit_margin(s), 29);
  EXPECT_LT(b.effective_degree(), 29u);
  EXPECT_GE(b.effective_degree(), 10u);
  // produced columns stay orthonormal
  const EmpiricalMargin m = b.margin();
  for (std::size_t j = 1; j <= b.effective_degree(); ++j) {
    for (std::size_t k = j; k <= b.effective_degree(); ++k) {
      const double dot =
          p_dot(m, b.table().col(static_cast<Eigen::Index>(j - 1)),
                b.table().col(static_cast<Eigen::Index>(k - 1)));
      EXPECT_NEAR(dot, j == k ? 1.0 : 0.0, 1e-9);
    }
  }
}

TEST(EvalT, RangeChecksAndCenterValue) {
  std::vector<double> s{1, 2, 3, 4, 5};
  const LPBasis b(fit_margin(s), 2);
  EXPECT_THROW(b.eval_T(0, 1.0), std::invalid_argument);
  EXPECT_THROW(b.eval_T(3, 1.0), std::invalid_argument);
  EXPECT_THROW(b.eval_T(1, 2.5), std::invalid_argument);
  // median value carries the smallest |T1|
  double best = 1e9;
  for (double x : s) best = std::min(best, std::fabs(b.eval_T(1, x)));
  EXPECT_DOUBLE_EQ(std::fabs(b.eval_T(1, 3.0)), best);
}

TEST(EvalS, StepFunctionAndExactIntegrals) {
  const LPBasis b(fit_margin(std::vector<double>{0, 1, 0, 1}), 1);
  EXPECT_NEAR(b.eval_S(1, 0.25), -1.0, 1e-12);
  EXPECT_NEAR(b.eval_S(1, 0.5), -1.0, 1e-12);
  EXPECT_NEAR(b.eval_S(1, 0.500001), 1.0, 1e-12);
  EXPECT_NEAR(b.eval_S(1, 1.0), 1.0, 1e-12);
  EXPECT_THROW(b.eval_S(1, 0.0), std::invalid_argument);

  // exact piecewise integral over the cdf cells: int S_j du = 0,
  // int S_j S_k du = delta_jk
  std::mt19937_64 gen(19);
  std::vector<double> s;
  for (int i = 0; i < 90; ++i) s.push_back(static_cast<double>(gen() % 7));
  const EmpiricalMargin m = fit_margin(s);
  const LPBasis basis(m, m.unique_count() - 1);
  for (std::size_t j = 1; j <= basis.effective_degree(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.unique_count(); ++i) {
      mean += m.masses()[i] * basis.table()(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j - 1));
    }
    EXPECT_NEAR(mean, 0.0, 1e-9);
    for (std::size_t k = j; k <= basis.effective_degree(); ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m.unique_count(); ++i) {
        dot += m.masses()[i] *
               basis.table()(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j - 1)) *
               basis.table()(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(k - 1));
      }
      EXPECT_NEAR(dot, j == k ? 1.0 : 0.0, 1e-9);
    }
  }
}

TEST(EvalS, MixedMarginShapes) {
  // continuous margin: many small steps; count margin: few coarse steps
  std::mt19937_64 gen(23);
  std::vector<double> cont, disc;
  for (int i = 0; i < 200; ++i) {
    cont.push_back(std::uniform_real_distribution<>(0, 1)(gen));
    disc.push_back(static_cast<double>(gen() % 4));
  }
  const LPBasis bc(fit_margin(cont), 4);
  const LPBasis bd(fit_margin(disc), 3);
  // count distinct S_1 values over a fine u grid
  auto distinct_steps = [](const LPBasis& b) {
    std::vector<double> vals;
    for (int i = 1; i <= 1000; ++i) {
      vals.push_back(b.eval_S(1, i / 1000.0));
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals.size();
  };
  EXPECT_GT(distinct_steps(bc), 150u);
  EXPECT_EQ(distinct_steps(bd), 4u);
}
