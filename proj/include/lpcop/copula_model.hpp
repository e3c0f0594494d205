#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lpcop/comeans.hpp"
#include "lpcop/inference.hpp"
#include "lpcop/lp_basis.hpp"

namespace lpcop {

//! Singular value decomposition of the comean matrix: the copula principal
//! components. Loadings have unit-norm columns; reconstruction
//! sum_k lambda_k u_k v_k^T recovers the (selected) matrix.
struct SpectralDecomposition {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd left_loadings;   //!< columns u_k, one per component
  Eigen::MatrixXd right_loadings;  //!< columns v_k
};

//! Optimal-transformation summary from the leading singular pair.
struct MaxCorrelation {
  double lpmax = 0.0;    //!< empirical correlation of the transformed sample
  double lambda1 = 0.0;  //!< leading singular value of the comean matrix
  //! (value, score) tables of phi_1 . F_X and psi_1 . F_Y over the supports
  std::vector<std::pair<double, double>> phi_table;
  std::vector<std::pair<double, double>> psi_table;
};

//! Orthogonal-series copula density built from two LP bases and their
//! (optionally denoised) comean matrix. Piecewise constant on the grid of
//! empirical cdf cells. Immutable after construction; evaluation is pure.
class CopulaModel {
public:
  CopulaModel(LPBasis basis_x, LPBasis basis_y, ComeanTensor comeans)
      : basis_x_(std::move(basis_x)),
        basis_y_(std::move(basis_y)),
        comeans_(std::move(comeans)),
        lp_(comeans_.selected_matrix()) {
    if (comeans_.arity() != 2 ||
        comeans_.dims()[0] != basis_x_.effective_degree() ||
        comeans_.dims()[1] != basis_y_.effective_degree()) {
      throw std::invalid_argument("comean tensor does not match bases");
    }
  }

  const LPBasis& basis_x() const { return basis_x_; }
  const LPBasis& basis_y() const { return basis_y_; }
  const ComeanTensor& comeans() const { return comeans_; }

  bool clip_enabled() const { return clip_enabled_; }
  double clip_floor() const { return clip_floor_; }

  //! Switches density() to the floored-and-renormalized view.
  void enable_clipping(double floor = 0.0) {
    if (floor < 0.0) throw std::invalid_argument("clip floor must be >= 0");
    clip_enabled_ = true;
    clip_floor_ = floor;
    clip_norm_ = clipped_integral(floor);
  }
  void disable_clipping() { clip_enabled_ = false; }

  //! Signed series value 1 + sum LP[j,k] S_j(u) S_k(v), 0 < u,v <= 1.
  double raw_density(double u, double v) const {
    const Eigen::Index iu =
        static_cast<Eigen::Index>(basis_x_.margin().quantile_index(u));
    const Eigen::Index iv =
        static_cast<Eigen::Index>(basis_y_.margin().quantile_index(v));
    return 1.0 +
           basis_x_.table().row(iu) * lp_ * basis_y_.table().row(iv).transpose();
  }

  //! Density estimate; equals raw_density unless clipping is enabled.
  double density(double u, double v) const {
    const double raw = raw_density(u, v);
    if (!clip_enabled_) return raw;
    return std::max(raw, clip_floor_) / clip_norm_;
  }

  //! Density evaluated on the lattice (i/(L+1), j/(L+1)), i,j = 1..L.
  Eigen::MatrixXd density_grid(std::size_t grid_size) const {
    if (grid_size < 1) throw std::invalid_argument("grid size must be >= 1");
    const auto L = static_cast<Eigen::Index>(grid_size);
    Eigen::MatrixXd sx(L, lp_.rows()), sy(L, lp_.cols());
    for (Eigen::Index i = 0; i < L; ++i) {
      const double a = static_cast<double>(i + 1) / static_cast<double>(L + 1);
      sx.row(i) = basis_x_.eval_S_row(a).transpose();
      sy.row(i) = basis_y_.eval_S_row(a).transpose();
    }
    Eigen::MatrixXd grid = Eigen::MatrixXd::Ones(L, L) + sx * lp_ * sy.transpose();
    if (clip_enabled_) {
      grid = grid.cwiseMax(clip_floor_) / clip_norm_;
    }
    return grid;
  }

  //! Density values on the empirical cdf cells (rows: x-support cells,
  //! columns: y-support cells). The density is constant on each cell.
  Eigen::MatrixXd cell_values() const {
    const Eigen::MatrixXd raw =
        Eigen::MatrixXd::Ones(basis_x_.table().rows(), basis_y_.table().rows()) +
        basis_x_.table() * lp_ * basis_y_.table().transpose();
    if (!clip_enabled_) return raw;
    return raw.cwiseMax(clip_floor_) / clip_norm_;
  }

  //! Exact integral of the current density view over the unit square
  //! (piecewise integration over the cdf cells).
  double exact_integral() const {
    return weighted_cell_sum([](double c) { return c; });
  }

  //! Exact integral of (density - 1)^2; equals the selected sum of squares.
  double squared_deviation_integral() const {
    return weighted_cell_sum([](double c) { return (c - 1.0) * (c - 1.0); });
  }

  //! Exact integral over u of density(u, v) at fixed v.
  double marginal_integral_x(double v) const {
    const Eigen::Index iv =
        static_cast<Eigen::Index>(basis_y_.margin().quantile_index(v));
    const Eigen::MatrixXd cells = cell_values();
    const auto& px = basis_x_.margin().masses();
    double s = 0.0;
    for (Eigen::Index i = 0; i < cells.rows(); ++i) {
      s += px[static_cast<std::size_t>(i)] * cells(i, iv);
    }
    return s;
  }

  //! Exact integral over v of density(u, v) at fixed u.
  double marginal_integral_y(double u) const {
    const Eigen::Index iu =
        static_cast<Eigen::Index>(basis_x_.margin().quantile_index(u));
    const Eigen::MatrixXd cells = cell_values();
    const auto& py = basis_y_.margin().masses();
    double s = 0.0;
    for (Eigen::Index j = 0; j < cells.cols(); ++j) {
      s += py[static_cast<std::size_t>(j)] * cells(iu, j);
    }
    return s;
  }

  //! Conditional profile E[T_k(Y) | X = Q(u)] = sum_j S_j(u) LP[j,k].
  double conditional_profile(std::size_t k, double u) const {
    if (k < 1 || k > static_cast<std::size_t>(lp_.cols())) {
      throw std::invalid_argument("profile index out of range");
    }
    const Eigen::Index iu =
        static_cast<Eigen::Index>(basis_x_.margin().quantile_index(u));
    return basis_x_.table().row(iu) * lp_.col(static_cast<Eigen::Index>(k - 1));
  }

  //! SVD of the selected comean matrix. Signs are fixed so each left
  //! loading's largest-magnitude entry is positive.
  SpectralDecomposition spectral() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        lp_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SpectralDecomposition s;
    s.singular_values = svd.singularValues();
    s.left_loadings = svd.matrixU();
    s.right_loadings = svd.matrixV();
    for (Eigen::Index c = 0; c < s.left_loadings.cols(); ++c) {
      Eigen::Index imax = 0;
      s.left_loadings.col(c).cwiseAbs().maxCoeff(&imax);
      if (s.left_loadings(imax, c) < 0.0) {
        s.left_loadings.col(c) = -s.left_loadings.col(c);
        s.right_loadings.col(c) = -s.right_loadings.col(c);
      }
    }
    return s;
  }

private:
  template <typename F>
  double weighted_cell_sum(F&& f) const {
    const Eigen::MatrixXd cells = cell_values();
    const auto& px = basis_x_.margin().masses();
    const auto& py = basis_y_.margin().masses();
    double total = 0.0;
    for (Eigen::Index i = 0; i < cells.rows(); ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < cells.cols(); ++j) {
        row += py[static_cast<std::size_t>(j)] * f(cells(i, j));
      }
      total += px[static_cast<std::size_t>(i)] * row;
    }
    return total;
  }

  double clipped_integral(double floor) const {
    const Eigen::MatrixXd raw =
        Eigen::MatrixXd::Ones(basis_x_.table().rows(), basis_y_.table().rows()) +
        basis_x_.table() * lp_ * basis_y_.table().transpose();
    const auto& px = basis_x_.margin().masses();
    const auto& py = basis_y_.margin().masses();
    double total = 0.0;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        total += px[static_cast<std::size_t>(i)] *
                 py[static_cast<std::size_t>(j)] *
                 std::max(raw(i, j), floor);
      }
    }
    if (total <= 0.0) throw std::runtime_error("clipped density integrates to 0");
    return total;
  }

  LPBasis basis_x_;
  LPBasis basis_y_;
  ComeanTensor comeans_;
  Eigen::MatrixXd lp_;  // selected coefficients, zeros where masked out
  bool clip_enabled_ = false;
  double clip_floor_ = 0.0;
  double clip_norm_ = 1.0;
};

//! Fits margins, bases (degree min(m, unique-1) per margin), comeans, and
//! optionally the Schwarz denoising step.
inline CopulaModel fit_copula(std::span<const double> x,
                              std::span<const double> y, std::size_t m = 4,
                              bool denoise = true) {
  EmpiricalMargin mx = fit_margin(x);
  EmpiricalMargin my = fit_margin(y);
  const std::size_t mx_deg = std::min(m, mx.unique_count() - 1);
  const std::size_t my_deg = std::min(m, my.unique_count() - 1);
  LPBasis bx(std::move(mx), mx_deg);
  LPBasis by(std::move(my), my_deg);
  ComeanTensor t = estimate_comeans(bx, by, x, y);
  if (denoise) t = t.select_bic();
  return CopulaModel(std::move(bx), std::move(by), std::move(t));
}

//! Empirical LP-maximal correlation and the optimal transformation tables.
//!
//! The transforms are phi_1(u) = sum_j u_j1 S_j(u) and psi_1 from the right
//! loadings; lpmax is the Pearson correlation of the transformed sample.
inline MaxCorrelation max_correlation(const CopulaModel& model,
                                      std::span<const double> x,
                                      std::span<const double> y) {
  const SpectralDecomposition s = model.spectral();
  if (s.singular_values.size() == 0 || s.singular_values(0) <= 0.0) {
    throw std::runtime_error("no dependence component");
  }
  const Eigen::VectorXd u1 = s.left_loadings.col(0);
  const Eigen::VectorXd v1 = s.right_loadings.col(0);
  const Eigen::VectorXd phi = model.basis_x().scores(x) * u1;
  const Eigen::VectorXd psi = model.basis_y().scores(y) * v1;

  const double mp = phi.mean(), mq = psi.mean();
  double spp = 0.0, sqq = 0.0, spq = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double a = phi(i) - mp, b = psi(i) - mq;
    spp += a * a;
    sqq += b * b;
    spq += a * b;
  }
  if (spp <= 0.0 || sqq <= 0.0) {
    throw std::runtime_error("no dependence component");
  }
  MaxCorrelation out;
  out.lambda1 = s.singular_values(0);
  out.lpmax = spq / std::sqrt(spp * sqq);

  const Eigen::VectorXd phi_vals = model.basis_x().table() * u1;
  const Eigen::VectorXd psi_vals = model.basis_y().table() * v1;
  const auto& xv = model.basis_x().margin().values();
  const auto& yv = model.basis_y().margin().values();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out.phi_table.emplace_back(xv[i], phi_vals(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t i = 0; i < yv.size(); ++i) {
    out.psi_table.emplace_back(yv[i], psi_vals(static_cast<Eigen::Index>(i)));
  }
  return out;
}

//! Dependence tree: a spanning tree over variables whose edges carry
//! bivariate copula models; the joint density is the product over edges.
struct TreeCopula {
  struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    CopulaModel model;
    double weight = 0.0;  //!< LPINFOR of the pair
  };
  std::size_t node_count = 0;
  std::vector<Edge> edges;

  //! Product of edge densities at a point of the unit cube.
  double density(std::span<const double> u) const {
    if (u.size() != node_count) {
      throw std::invalid_argument("point dimension does not match tree");
    }
    double prod = 1.0;
    for (const Edge& e : edges) prod *= e.model.density(u[e.i], u[e.j]);
    return prod;
  }
};

//! Builds the maximum spanning tree under pairwise LPINFOR weights and fits
//! a bivariate model on every edge. Ties break toward smaller index pairs.
inline TreeCopula fit_tree(const std::vector<std::vector<double>>& samples,
                           std::size_t m = 4, bool denoise = true) {
  const std::size_t d = samples.size();
  if (d < 2) throw std::invalid_argument("tree needs at least two variables");
  for (const auto& s : samples) {
    if (s.size() != samples[0].size()) {
      throw std::invalid_argument("paired samples differ in length");
    }
  }

  struct Cand {
    std::size_t i, j;
    double weight;
  };
  std::vector<Cand> cands;
  std::vector<std::vector<CopulaModel>> fitted(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      CopulaModel model = fit_copula(samples[i], samples[j], m, denoise);
      const double w = lpinfor(model.comeans(), /*denoised=*/false).statistic;
      fitted[i].push_back(std::move(model));
      cands.push_back({i, j, w});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };

  TreeCopula tree;
  tree.node_count = d;
  for (const Cand& c : cands) {
    const std::size_t ra = find(c.i), rb = find(c.j);
    if (ra == rb) continue;
    parent[ra] = rb;
    tree.edges.push_back(
        {c.i, c.j, std::move(fitted[c.i][c.j - c.i - 1]), c.weight});
    if (tree.edges.size() == d - 1) break;
  }
  return tree;
}

}  // namespace lpcop
