#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lpcop {

//! Tie-aware empirical marginal distribution of one variable.
//!
//! Stores the unique sample values together with their probability masses,
//! cumulative probabilities, and mid-probabilities F(x) - p(x)/2. Immutable
//! after construction; safe to share across threads.
class EmpiricalMargin {
public:
  EmpiricalMargin() = default;

  //! Number of unique values in the support.
  std::size_t unique_count() const { return values_.size(); }

  //! Sample size the margin was fitted from.
  std::size_t sample_size() const { return n_; }

  //! Sum of cubed masses; equals 1 only for a one-point (degenerate) margin.
  double cube_sum() const { return cube_sum_; }

  bool degenerate() const { return values_.size() <= 1; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<double>& cdf() const { return cdf_; }
  const std::vector<double>& midcdf() const { return midcdf_; }

  //! Index of x in the support, or an error if x was never observed.
  std::size_t index_of(double x) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), x);
    if (it == values_.end() || *it != x) {
      throw std::invalid_argument("value outside empirical support");
    }
    return static_cast<std::size_t>(it - values_.begin());
  }

  //! Mid-distribution value F(x) - p(x)/2 at an observed x.
  double mid(double x) const { return midcdf_[index_of(x)]; }

  //! Index of the quantile cell: smallest i with cdf[i] >= u, 0 < u <= 1.
  std::size_t quantile_index(double u) const {
    if (!(u > 0.0) || u > 1.0) {
      throw std::invalid_argument("u out of range");
    }
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;  // guard against cdf[last] = 1 - eps
    return static_cast<std::size_t>(it - cdf_.begin());
  }

  //! Left-continuous inverse Q(u) = inf{x : F(x) >= u}.
  double quantile(double u) const { return values_[quantile_index(u)]; }

  //! Builds the margin from a sample. Ties are grouped by exact equality
  //! after canonicalizing signed zeros; no jittering.
  static EmpiricalMargin fit(std::span<const double> sample) {
    if (sample.empty()) throw std::invalid_argument("empty sample");
    std::vector<double> sorted;
    sorted.reserve(sample.size());
    for (double x : sample) {
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite input");
      sorted.push_back(x == 0.0 ? 0.0 : x);
    }
    std::sort(sorted.begin(), sorted.end());

    EmpiricalMargin m;
    m.n_ = sorted.size();
    const double n = static_cast<double>(m.n_);
    std::size_t i = 0, cum = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const std::size_t count = j - i;
      cum += count;
      m.values_.push_back(sorted[i]);
      m.masses_.push_back(static_cast<double>(count) / n);
      m.cdf_.push_back(static_cast<double>(cum) / n);
      m.midcdf_.push_back(m.cdf_.back() - m.masses_.back() / 2.0);
      i = j;
    }
    m.cube_sum_ = 0.0;
    for (double p : m.masses_) m.cube_sum_ += p * p * p;
    return m;
  }

private:
  std::vector<double> values_;
  std::vector<double> masses_;
  std::vector<double> cdf_;
  std::vector<double> midcdf_;
  std::size_t n_ = 0;
  double cube_sum_ = 0.0;
};

//! Convenience wrapper for EmpiricalMargin::fit.
inline EmpiricalMargin fit_margin(std::span<const double> sample) {
  return EmpiricalMargin::fit(sample);
}

//! Mid-distribution lookup at an observed value.
inline double mid_distribution(const EmpiricalMargin& margin, double x) {
  return margin.mid(x);
}

//! Empirical quantile Q(u) = inf{x : F(x) >= u}, 0 < u <= 1.
inline double quantile(const EmpiricalMargin& margin, double u) {
  return margin.quantile(u);
}

//! Transforms paired samples through their own empirical mid-distributions.
inline std::vector<std::pair<double, double>> pseudo_observations(
    std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("paired samples differ in length");
  }
  const EmpiricalMargin mx = fit_margin(x);
  const EmpiricalMargin my = fit_margin(y);
  std::vector<std::pair<double, double>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(mx.mid(x[i]), my.mid(y[i]));
  }
  return out;
}

}  // namespace lpcop
