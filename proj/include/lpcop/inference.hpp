#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpcop/comeans.hpp"

namespace lpcop {

//! One contributing coefficient of a dependence statistic.
struct TestComponent {
  std::vector<std::size_t> index;
  double value = 0.0;
};

//! Outcome of a chi-square-calibrated dependence or shape test.
struct TestResult {
  double statistic = 0.0;   //!< unscaled statistic (sum of squares form)
  double scaled = 0.0;      //!< n * statistic, the reference-distribution scale
  std::size_t dof = 0;
  double p_value = 1.0;
  std::vector<TestComponent> components;
  bool small_sample = false;  //!< set when n < 30 (asymptotics are dubious)
};

namespace detail {

inline double chi2_upper(double x, std::size_t dof) {
  if (dof == 0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, x));
}

inline double normal_upper(double z) {
  boost::math::normal dist;
  return boost::math::cdf(boost::math::complement(dist, z));
}

}  // namespace detail

//! Aggregate dependence statistic: sum of squared comeans.
//!
//! The raw variant sums every coefficient and is calibrated against
//! chi-square with m1*m2 degrees of freedom. The denoised variant sums only
//! the BIC-selected coefficients; with k survivors it is referred to
//! chi-square(k), except that a single survivor is tested one-sided on the
//! normal scale (the convention used for single-component effect reports).
inline TestResult lpinfor(const ComeanTensor& t, bool denoised = false) {
  if (t.arity() != 2) throw std::invalid_argument("lpinfor expects a matrix");
  const std::size_t n = t.sample_size();
  TestResult r;
  r.small_sample = n < 30;
  r.statistic = t.sum_squares(denoised);
  r.scaled = static_cast<double>(n) * r.statistic;
  if (denoised) {
    r.dof = t.selected_count();
    if (r.dof == 0) {
      r.p_value = 1.0;
    } else if (r.dof == 1) {
      r.p_value = detail::normal_upper(std::sqrt(r.scaled));
    } else {
      r.p_value = detail::chi2_upper(r.scaled, r.dof);
    }
  } else {
    r.dof = t.dims()[0] * t.dims()[1];
    r.p_value = detail::chi2_upper(r.scaled, r.dof);
  }
  for (std::size_t j = 1; j <= t.dims()[0]; ++j) {
    for (std::size_t k = 1; k <= t.dims()[1]; ++k) {
      if (!denoised || t.is_selected(j, k)) {
        r.components.push_back({{j, k}, t.coeff(j, k)});
      }
    }
  }
  std::stable_sort(r.components.begin(), r.components.end(),
                   [](const TestComponent& a, const TestComponent& b) {
                     return std::fabs(a.value) > std::fabs(b.value);
                   });
  return r;
}

//! Exchangeability test: half the squared asymmetry of the comean matrix,
//! computed on the raw coefficients; n * statistic is referred to
//! chi-square with m(m-1)/2 degrees of freedom.
inline TestResult lpsym(const ComeanTensor& t) {
  if (t.arity() != 2 || t.dims()[0] != t.dims()[1]) {
    throw std::invalid_argument("lpsym expects a square comean matrix");
  }
  const std::size_t m = t.dims()[0];
  const std::size_t n = t.sample_size();
  TestResult r;
  r.small_sample = n < 30;
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t k = j + 1; k <= m; ++k) {
      const double d = t.coeff(j, k) - t.coeff(k, j);
      r.statistic += 0.5 * d * d;
      r.components.push_back({{j, k}, d});
    }
  }
  r.scaled = static_cast<double>(n) * r.statistic;
  r.dof = m * (m - 1) / 2;
  r.p_value = detail::chi2_upper(r.scaled, r.dof);
  return r;
}

//! Rank correlation valid for arbitrary (mixed, tied) margins.
struct SpearmanResult {
  double lp11 = 0.0;
  double z = 0.0;            //!< sqrt(n) * lp11
  double p_one_sided = 1.0;  //!< 1 - Phi(z)
  double p_two_sided = 1.0;  //!< 2 (1 - Phi(|z|))
};

//! Generalized Spearman correlation: the (1,1) comean of degree-1 bases.
inline SpearmanResult generalized_spearman(std::span<const double> x,
                                           std::span<const double> y) {
  const LPBasis bx(fit_margin(x), 1);
  const LPBasis by(fit_margin(y), 1);
  const ComeanTensor t = estimate_comeans(bx, by, x, y);
  SpearmanResult r;
  r.lp11 = t.coeff(1, 1);
  r.z = std::sqrt(static_cast<double>(x.size())) * r.lp11;
  r.p_one_sided = detail::normal_upper(r.z);
  r.p_two_sided = 2.0 * detail::normal_upper(std::fabs(r.z));
  return r;
}

}  // namespace lpcop
