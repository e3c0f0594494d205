#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpcop/lp_basis.hpp"

namespace lpcop {

//! Cross-moment array LP[j,k(,l)] = E[T_j(X) T_k(Y) (T_l(Z))] with a
//! selection mask for denoising.
//!
//! For d = 2 the coefficients form an m1 x m2 matrix over indices j,k >= 1.
//! For d = 3 the array is (m1+1) x (m2+1) x (m3+1) with index 0 standing for
//! the constant factor 1, so mixed-order entries like LP[1,1,0] are
//! addressable; only entries with at least two nonzero indices are treated
//! as dependence coefficients (the rest are structurally 0 or 1).
class ComeanTensor {
public:
  ComeanTensor() = default;

  //! d = 2 tensor from a row-major m1 x m2 coefficient matrix.
  ComeanTensor(std::vector<std::size_t> dims, std::vector<double> coeffs,
               std::size_t n)
      : dims_(std::move(dims)), coeffs_(std::move(coeffs)), n_(n) {
    std::size_t expect = 1;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      expect *= dims_[i] + (dims_.size() == 3 ? 1 : 0);
    }
    if (dims_.size() < 2 || dims_.size() > 3 || coeffs_.size() != expect) {
      throw std::invalid_argument("inconsistent comean tensor shape");
    }
    selected_.assign(coeffs_.size(), 1);
    if (arity() == 3) {
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        selected_[i] = selectable(i) ? 1 : 0;
      }
    }
  }

  std::size_t arity() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t sample_size() const { return n_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<char>& selected() const { return selected_; }

  //! d = 2 coefficient LP[j,k], 1-based indices.
  double coeff(std::size_t j, std::size_t k) const {
    return coeffs_[flat2(j, k)];
  }
  bool is_selected(std::size_t j, std::size_t k) const {
    return selected_[flat2(j, k)] != 0;
  }

  //! d = 3 coefficient LP[j,k,l]; index 0 means the constant factor.
  double coeff3(std::size_t j, std::size_t k, std::size_t l) const {
    return coeffs_[flat3(j, k, l)];
  }
  bool is_selected3(std::size_t j, std::size_t k, std::size_t l) const {
    return selected_[flat3(j, k, l)] != 0;
  }

  //! d = 2 coefficients as a matrix (rows j, columns k).
  Eigen::MatrixXd matrix() const {
    require_arity(2);
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                          Eigen::Dynamic, Eigen::RowMajor>>(
        coeffs_.data(), static_cast<Eigen::Index>(dims_[0]),
        static_cast<Eigen::Index>(dims_[1]));
  }

  //! d = 2 matrix with unselected entries zeroed.
  Eigen::MatrixXd selected_matrix() const {
    Eigen::MatrixXd m = matrix();
    for (std::size_t j = 1; j <= dims_[0]; ++j) {
      for (std::size_t k = 1; k <= dims_[1]; ++k) {
        if (!is_selected(j, k)) {
          m(static_cast<Eigen::Index>(j - 1),
            static_cast<Eigen::Index>(k - 1)) = 0.0;
        }
      }
    }
    return m;
  }

  //! Sum of squared coefficients over the selected (or all) entries,
  //! counting only dependence coefficients for d = 3.
  double sum_squares(bool selected_only) const {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (arity() == 3 && !selectable(i)) continue;
      if (selected_only && !selected_[i]) continue;
      s += coeffs_[i] * coeffs_[i];
    }
    return s;
  }

  std::size_t selected_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (selected_[i] && (arity() == 2 || selectable(i))) ++c;
    }
    return c;
  }

  //! Applies the Schwarz selection rule: sort entries by decreasing
  //! magnitude (lexicographic index order on ties), retain the prefix
  //! maximizing sum of squares - log(n) k / n; empty if no prefix is
  //! positive.
  ComeanTensor select_bic() const {
    if (n_ < 2) throw std::invalid_argument("selection needs n >= 2");
    std::vector<std::size_t> order;
    order.reserve(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (arity() == 2 || selectable(i)) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [this](std::size_t a, std::size_t b) {
                       const double fa = std::fabs(coeffs_[a]);
                       const double fb = std::fabs(coeffs_[b]);
                       if (fa != fb) return fa > fb;
                       return a < b;
                     });
    const double pen = std::log(static_cast<double>(n_)) /
                       static_cast<double>(n_);
    double acc = 0.0, best = 0.0;
    std::size_t best_k = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      acc += coeffs_[order[i]] * coeffs_[order[i]];
      const double bic = acc - pen * static_cast<double>(i + 1);
      if (bic > best) {
        best = bic;
        best_k = i + 1;
      }
    }
    ComeanTensor out = *this;
    std::fill(out.selected_.begin(), out.selected_.end(), 0);
    for (std::size_t i = 0; i < best_k; ++i) out.selected_[order[i]] = 1;
    return out;
  }

  //! Flat entry index decoded to per-axis indices (d = 3 includes zeros).
  std::vector<std::size_t> decode(std::size_t flat) const {
    std::vector<std::size_t> idx(arity());
    if (arity() == 2) {
      idx[0] = flat / dims_[1] + 1;
      idx[1] = flat % dims_[1] + 1;
    } else {
      const std::size_t s2 = dims_[2] + 1, s1 = dims_[1] + 1;
      idx[0] = flat / (s1 * s2);
      idx[1] = (flat / s2) % s1;
      idx[2] = flat % s2;
    }
    return idx;
  }

private:
  void require_arity(std::size_t d) const {
    if (arity() != d) throw std::invalid_argument("wrong comean tensor arity");
  }
  std::size_t flat2(std::size_t j, std::size_t k) const {
    require_arity(2);
    if (j < 1 || j > dims_[0] || k < 1 || k > dims_[1]) {
      throw std::invalid_argument("comean index out of range");
    }
    return (j - 1) * dims_[1] + (k - 1);
  }
  std::size_t flat3(std::size_t j, std::size_t k, std::size_t l) const {
    require_arity(3);
    if (j > dims_[0] || k > dims_[1] || l > dims_[2]) {
      throw std::invalid_argument("comean index out of range");
    }
    return (j * (dims_[1] + 1) + k) * (dims_[2] + 1) + l;
  }
  bool selectable(std::size_t flat) const {
    if (arity() == 2) return true;
    const auto idx = decode(flat);
    int nz = 0;
    for (std::size_t v : idx) nz += v > 0 ? 1 : 0;
    return nz >= 2;
  }

  std::vector<std::size_t> dims_;
  std::vector<double> coeffs_;
  std::vector<char> selected_;
  std::size_t n_ = 0;
};

//! Empirical bivariate comeans LP[j,k] = (1/n) sum T_j(x_i) T_k(y_i).
inline ComeanTensor estimate_comeans(const LPBasis& basis_x,
                                     const LPBasis& basis_y,
                                     std::span<const double> x,
                                     std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("paired samples differ in length");
  }
  if (x.size() != basis_x.margin().sample_size() ||
      y.size() != basis_y.margin().sample_size()) {
    throw std::invalid_argument("basis was built from a different sample size");
  }
  const Eigen::MatrixXd tx = basis_x.scores(x);
  const Eigen::MatrixXd ty = basis_y.scores(y);
  Eigen::MatrixXd lp = tx.transpose() * ty / static_cast<double>(x.size());
  std::vector<double> rm(static_cast<std::size_t>(lp.size()));
  for (Eigen::Index j = 0; j < lp.rows(); ++j) {
    for (Eigen::Index k = 0; k < lp.cols(); ++k) {
      rm[static_cast<std::size_t>(j * lp.cols() + k)] = lp(j, k);
    }
  }
  return ComeanTensor({static_cast<std::size_t>(lp.rows()),
                       static_cast<std::size_t>(lp.cols())},
                      std::move(rm), x.size());
}

//! Empirical trivariate comeans, index 0 denoting the constant factor.
inline ComeanTensor estimate_comeans_3(const LPBasis& b1, const LPBasis& b2,
                                       const LPBasis& b3,
                                       std::span<const double> x1,
                                       std::span<const double> x2,
                                       std::span<const double> x3) {
  if (x1.size() != x2.size() || x1.size() != x3.size()) {
    throw std::invalid_argument("paired samples differ in length");
  }
  const std::size_t n = x1.size();
  const std::size_t m1 = b1.effective_degree(), m2 = b2.effective_degree(),
                    m3 = b3.effective_degree();
  const Eigen::MatrixXd t1 = b1.scores(x1);
  const Eigen::MatrixXd t2 = b2.scores(x2);
  const Eigen::MatrixXd t3 = b3.scores(x3);
  std::vector<double> coeffs((m1 + 1) * (m2 + 1) * (m3 + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= m1; ++j) {
      const double fj = j == 0 ? 1.0 : t1(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j - 1));
      for (std::size_t k = 0; k <= m2; ++k) {
        const double fk = k == 0 ? fj
                                 : fj * t2(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(k - 1));
        for (std::size_t l = 0; l <= m3; ++l) {
          const double fl =
              l == 0 ? fk
                     : fk * t3(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(l - 1));
          coeffs[(j * (m2 + 1) + k) * (m3 + 1) + l] += fl;
        }
      }
    }
  }
  for (double& c : coeffs) c /= static_cast<double>(n);
  return ComeanTensor({m1, m2, m3}, std::move(coeffs), n);
}

//! Denoises a tensor with the Schwarz rule (see ComeanTensor::select_bic).
inline ComeanTensor select_bic(const ComeanTensor& t) { return t.select_bic(); }

//! Null standard deviation 1/sqrt(n) of an empirical comean under
//! independence.
inline double comean_null_sd(std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  return 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace lpcop
