#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>

#include "lpcop/margins.hpp"

namespace lpcop {

//! Data-adaptive orthonormal polynomial system on an empirical margin.
//!
//! Column j of the score table holds T_j evaluated at the margin's unique
//! values. T_1 is the standardized mid-rank score; higher columns come from
//! Gram-Schmidt on its powers under the mass-weighted inner product, so
//! sum_x p(x) T_j(x) T_k(x) = delta_jk. The unit-interval form S_j composes
//! T_j with the quantile function and is a step function in u.
class LPBasis {
public:
  LPBasis() = default;

  //! Builds a degree-m basis; m may be silently truncated at numerical rank
  //! deficiency (see effective_degree).
  LPBasis(EmpiricalMargin margin, std::size_t m) : margin_(std::move(margin)) {
    if (margin_.degenerate()) throw std::invalid_argument("constant variable");
    const std::size_t k = margin_.unique_count();
    if (m < 1 || m > k - 1) {
      throw std::invalid_argument("basis degree exceeds unique values - 1");
    }
    build(m);
  }

  const EmpiricalMargin& margin() const { return margin_; }

  //! Number of columns actually produced (<= requested degree).
  std::size_t effective_degree() const {
    return static_cast<std::size_t>(table_.cols());
  }

  //! Score table: rows follow margin().values(), columns are T_1..T_m.
  const Eigen::MatrixXd& table() const { return table_; }

  //! T_j at an observed value x (1-based j).
  double eval_T(std::size_t j, double x) const {
    check_degree(j);
    return table_(static_cast<Eigen::Index>(margin_.index_of(x)),
                  static_cast<Eigen::Index>(j - 1));
  }

  //! Unit-interval basis S_j(u) = T_j(Q(u)), 0 < u <= 1.
  double eval_S(std::size_t j, double u) const {
    check_degree(j);
    return table_(static_cast<Eigen::Index>(margin_.quantile_index(u)),
                  static_cast<Eigen::Index>(j - 1));
  }

  //! Row of all S_j(u) values, as a vector of length effective_degree().
  Eigen::VectorXd eval_S_row(double u) const {
    return table_.row(static_cast<Eigen::Index>(margin_.quantile_index(u)))
        .transpose();
  }

  //! n x m matrix of T scores for a raw sample drawn from this margin.
  Eigen::MatrixXd scores(std::span<const double> sample) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(sample.size()),
                        table_.cols());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) =
          table_.row(static_cast<Eigen::Index>(margin_.index_of(sample[i])));
    }
    return out;
  }

private:
  void check_degree(std::size_t j) const {
    if (j < 1 || j > effective_degree()) {
      throw std::invalid_argument("basis index out of range");
    }
  }

  // Modified Gram-Schmidt on powers of T_1, one reorthogonalization pass.
  // Stops early when a residual collapses below 1e-10 of its power's norm.
  void build(std::size_t m) {
    const std::size_t k = margin_.unique_count();
    const Eigen::Map<const Eigen::VectorXd> p(margin_.masses().data(),
                                              static_cast<Eigen::Index>(k));
    Eigen::VectorXd t1(static_cast<Eigen::Index>(k));
    const double scale =
        std::sqrt(12.0) / std::sqrt(1.0 - margin_.cube_sum());
    for (std::size_t i = 0; i < k; ++i) {
      t1(static_cast<Eigen::Index>(i)) =
          scale * (margin_.midcdf()[i] - 0.5);
    }

    Eigen::MatrixXd cols(static_cast<Eigen::Index>(k),
                         static_cast<Eigen::Index>(m));
    cols.col(0) = t1;
    std::size_t built = 1;
    Eigen::VectorXd power = t1;
    for (std::size_t j = 2; j <= m; ++j) {
      power = power.cwiseProduct(t1);
      Eigen::VectorXd v = power;
      const double power_norm = std::sqrt(v.cwiseProduct(v).dot(p));
      for (int pass = 0; pass < 2; ++pass) {
        v.array() -= v.dot(p);
        for (std::size_t c = 0; c < built; ++c) {
          const Eigen::VectorXd& tc = cols.col(static_cast<Eigen::Index>(c));
          v -= tc.cwiseProduct(p).dot(v) * tc;
        }
      }
      const double norm = std::sqrt(v.cwiseProduct(v).dot(p));
      if (norm < 1e-10 * power_norm) break;
      v /= norm;
      if (v.cwiseProduct(p).dot(power) < 0.0) v = -v;
      cols.col(static_cast<Eigen::Index>(built)) = v;
      ++built;
    }
    table_ = cols.leftCols(static_cast<Eigen::Index>(built));
  }

  EmpiricalMargin margin_;
  Eigen::MatrixXd table_;
};

//! Builds the LP basis of (at most) degree m on a fitted margin.
inline LPBasis build_basis(EmpiricalMargin margin, std::size_t m) {
  return LPBasis(std::move(margin), m);
}

//! Degree used when none is requested: min(4, unique values - 1).
inline std::size_t default_degree(const EmpiricalMargin& margin) {
  return std::min<std::size_t>(4, margin.unique_count() - 1);
}

}  // namespace lpcop
