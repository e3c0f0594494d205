#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpcop/rng.hpp"

namespace lpcop {

enum class FamilyTag {
  independence,
  gaussian,
  student_t,
  frank,
  clayton,
  plackett,
  amh,
  joe,
  gumbel,
  khoudraji,
};

//! A parametric copula family with exact sampler, cdf, and density.
//!
//! Construct through the factory functions below; parameters are validated
//! there. Khoudraji wraps a base family with two shape parameters.
struct CopulaFamily {
  FamilyTag tag = FamilyTag::independence;
  double theta = 0.0;  //!< rho for elliptical families, theta otherwise
  double dof = 5.0;    //!< Student-t degrees of freedom
  double lambda1 = 0.0, lambda2 = 0.0;
  std::shared_ptr<const CopulaFamily> base;

  std::string name() const {
    switch (tag) {
      case FamilyTag::independence: return "independence";
      case FamilyTag::gaussian: return "gaussian";
      case FamilyTag::student_t: return "studentt";
      case FamilyTag::frank: return "frank";
      case FamilyTag::clayton: return "clayton";
      case FamilyTag::plackett: return "plackett";
      case FamilyTag::amh: return "amh";
      case FamilyTag::joe: return "joe";
      case FamilyTag::gumbel: return "gumbel";
      case FamilyTag::khoudraji: return "khoudraji";
    }
    return "?";
  }
};

inline CopulaFamily independence_copula() { return {}; }

inline CopulaFamily gaussian_copula(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::invalid_argument("gaussian rho must lie in (-1, 1)");
  }
  return {FamilyTag::gaussian, rho};
}

inline CopulaFamily student_t_copula(double rho, double dof = 5.0) {
  if (!(rho > -1.0 && rho < 1.0) || !(dof > 0.0)) {
    throw std::invalid_argument("student t needs rho in (-1,1) and dof > 0");
  }
  CopulaFamily f{FamilyTag::student_t, rho};
  f.dof = dof;
  return f;
}

inline CopulaFamily frank_copula(double theta) {
  if (theta == 0.0 || !std::isfinite(theta)) {
    throw std::invalid_argument("frank theta must be finite and nonzero");
  }
  return {FamilyTag::frank, theta};
}

inline CopulaFamily clayton_copula(double theta) {
  if (theta == 0.0 || theta < -1.0 || !std::isfinite(theta)) {
    throw std::invalid_argument("clayton theta must lie in [-1,inf) \\ {0}");
  }
  return {FamilyTag::clayton, theta};
}

inline CopulaFamily plackett_copula(double theta) {
  if (!(theta > 0.0) || theta == 1.0) {
    throw std::invalid_argument("plackett theta must be positive and != 1");
  }
  return {FamilyTag::plackett, theta};
}

inline CopulaFamily amh_copula(double theta) {
  if (!(theta >= -1.0 && theta < 1.0) || theta == 0.0) {
    throw std::invalid_argument("amh theta must lie in [-1,1) \\ {0}");
  }
  return {FamilyTag::amh, theta};
}

inline CopulaFamily joe_copula(double theta) {
  if (!(theta >= 1.0)) throw std::invalid_argument("joe theta must be >= 1");
  return {FamilyTag::joe, theta};
}

inline CopulaFamily gumbel_copula(double theta) {
  if (!(theta >= 1.0)) throw std::invalid_argument("gumbel theta must be >= 1");
  return {FamilyTag::gumbel, theta};
}

inline CopulaFamily khoudraji_copula(CopulaFamily base_family, double lambda1,
                                     double lambda2) {
  if (!(lambda1 > 0.0 && lambda1 < 1.0 && lambda2 > 0.0 && lambda2 < 1.0)) {
    throw std::invalid_argument("khoudraji shapes must lie in (0, 1)");
  }
  if (lambda1 == lambda2) {
    throw std::invalid_argument("khoudraji shapes must differ");
  }
  CopulaFamily f{FamilyTag::khoudraji};
  f.lambda1 = lambda1;
  f.lambda2 = lambda2;
  f.base = std::make_shared<const CopulaFamily>(std::move(base_family));
  return f;
}

namespace detail {

inline void check_interior(double u, double v) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    throw std::invalid_argument("copula evaluation needs (u,v) in (0,1)^2");
  }
}

inline double norm_quantile(double u) {
  static const boost::math::normal_distribution<double> d;
  return boost::math::quantile(d, u);
}
inline double norm_cdf(double x) {
  static const boost::math::normal_distribution<double> d;
  return boost::math::cdf(d, x);
}
inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

//! Bivariate standard normal density with correlation r.
inline double binorm_pdf(double x, double y, double r) {
  const double q = 1.0 - r * r;
  return std::exp(-(x * x - 2.0 * r * x * y + y * y) / (2.0 * q)) /
         (2.0 * M_PI * std::sqrt(q));
}

//! Bivariate standard normal cdf via quadrature of d/dr Phi2 = phi2 over
//! the correlation path (exact at r = 0).
inline double binorm_cdf(double x, double y, double r) {
  // 48-point Gauss-Legendre nodes/weights on [0,1], generated once.
  static const int N = 48;
  static double nodes[N], weights[N];
  static const bool init = [] {
    // Newton iteration on Legendre polynomials over [-1,1], mapped to [0,1].
    for (int i = 0; i < N; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (N + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        const double dp = N * (t * p1 - p0) / (t * t - 1.0);
        const double step = p1 / dp;
        t -= step;
        if (std::fabs(step) < 1e-15) break;
      }
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= N; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double dp = N * (t * p1 - p0) / (t * t - 1.0);
      nodes[i] = 0.5 * (t + 1.0);
      weights[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return true;
  }();
  (void)init;
  double acc = norm_cdf(x) * norm_cdf(y);
  for (int i = 0; i < N; ++i) {
    acc += r * weights[i] * binorm_pdf(x, y, r * nodes[i]);
  }
  return acc;
}

inline double student_t_quantile(double u, double dof) {
  boost::math::students_t_distribution<double> d(dof);
  return boost::math::quantile(d, u);
}
inline double student_t_pdf(double x, double dof) {
  boost::math::students_t_distribution<double> d(dof);
  return boost::math::pdf(d, x);
}

//! Archimedean machinery: families expose the conditional cdf
//! h(v | u) = dC/du and the density in closed form below.

inline double frank_cdf(double u, double v, double th) {
  const double a = std::expm1(-th);
  return -std::log1p(std::expm1(-th * u) * std::expm1(-th * v) / a) / th;
}
inline double frank_pdf(double u, double v, double th) {
  const double e = std::exp(-th * (u + v));
  const double a = std::expm1(-th);
  const double d = a + std::expm1(-th * u) * std::expm1(-th * v);
  return -th * a * e / (d * d);
}
inline double frank_hinv(double u, double p, double th) {
  // solves dC/du (v | u) = p in closed form
  const double a = std::expm1(-th);
  const double x = p * a / (std::exp(-th * u) * (1.0 - p) + p);
  return -std::log1p(x) / th;
}

inline double clayton_cdf(double u, double v, double th) {
  const double w = std::pow(u, -th) + std::pow(v, -th) - 1.0;
  return w > 0.0 ? std::pow(w, -1.0 / th) : 0.0;
}
inline double clayton_pdf(double u, double v, double th) {
  const double w = std::pow(u, -th) + std::pow(v, -th) - 1.0;
  if (w <= 0.0) return 0.0;
  return (1.0 + th) * std::pow(u * v, -th - 1.0) *
         std::pow(w, -2.0 - 1.0 / th);
}
inline double clayton_hinv(double u, double p, double th) {
  const double b = std::pow(u, -th) *
                       (std::pow(p, -th / (1.0 + th)) - 1.0) +
                   1.0;
  return std::pow(b, -1.0 / th);
}

inline double plackett_cdf(double u, double v, double th) {
  const double s = 1.0 + (th - 1.0) * (u + v);
  const double d = std::sqrt(s * s - 4.0 * u * v * th * (th - 1.0));
  return (s - d) / (2.0 * (th - 1.0));
}
inline double plackett_pdf(double u, double v, double th) {
  const double s = 1.0 + (th - 1.0) * (u + v);
  const double d2 = s * s - 4.0 * u * v * th * (th - 1.0);
  return th * (1.0 + (th - 1.0) * (u + v - 2.0 * u * v)) /
         std::pow(d2, 1.5);
}
inline double plackett_hu(double u, double v, double th) {
  const double s = 1.0 + (th - 1.0) * (u + v);
  const double d = std::sqrt(s * s - 4.0 * u * v * th * (th - 1.0));
  return 0.5 * (1.0 - (s - 2.0 * v * th) / d);
}

inline double amh_cdf(double u, double v, double th) {
  return u * v / (1.0 - th * (1.0 - u) * (1.0 - v));
}
inline double amh_pdf(double u, double v, double th) {
  // -phi''(C) phi'(u) phi'(v) / phi'(C)^3 with phi(t) = log((1-th(1-t))/t)
  const double c = amh_cdf(u, v, th);
  return (1.0 - th + 2.0 * th * c) * c * (1.0 - th + th * c) /
         (u * (1.0 - th + th * u) * v * (1.0 - th + th * v));
}
inline double amh_hu(double u, double v, double th) {
  const double d = 1.0 - th * (1.0 - u) * (1.0 - v);
  return v * (1.0 - th * (1.0 - v)) / (d * d);
}

inline double joe_cdf(double u, double v, double th) {
  const double a = std::pow(1.0 - u, th), b = std::pow(1.0 - v, th);
  return 1.0 - std::pow(a + b - a * b, 1.0 / th);
}
inline double joe_pdf(double u, double v, double th) {
  const double a = std::pow(1.0 - u, th), b = std::pow(1.0 - v, th);
  const double s = a + b - a * b;
  return std::pow(s, 1.0 / th - 2.0) * std::pow(1.0 - u, th - 1.0) *
         std::pow(1.0 - v, th - 1.0) * (th - 1.0 + s);
}
inline double joe_hu(double u, double v, double th) {
  const double a = std::pow(1.0 - u, th), b = std::pow(1.0 - v, th);
  const double s = a + b - a * b;
  return std::pow(s, 1.0 / th - 1.0) * std::pow(1.0 - u, th - 1.0) *
         (1.0 - b);
}

inline double gumbel_cdf(double u, double v, double th) {
  const double x = std::pow(-std::log(u), th), y = std::pow(-std::log(v), th);
  return std::exp(-std::pow(x + y, 1.0 / th));
}
inline double gumbel_pdf(double u, double v, double th) {
  const double lx = -std::log(u), ly = -std::log(v);
  const double x = std::pow(lx, th), y = std::pow(ly, th);
  const double s = x + y, r = std::pow(s, 1.0 / th);
  const double c = std::exp(-r);
  return c * std::pow(lx * ly, th - 1.0) / (u * v) *
         std::pow(s, 2.0 / th - 2.0) * (1.0 + (th - 1.0) * std::pow(s, -1.0 / th));
}
inline double gumbel_hu(double u, double v, double th) {
  const double lx = -std::log(u), ly = -std::log(v);
  const double x = std::pow(lx, th), y = std::pow(ly, th);
  const double s = x + y;
  return gumbel_cdf(u, v, th) * std::pow(s, 1.0 / th - 1.0) *
         std::pow(lx, th - 1.0) / u;
}

//! Bracketed bisection for monotone conditional cdfs without closed
//! inverses; tolerance 1e-12 in v.
template <typename H>
double cond_inverse(H&& h, double p) {
  double lo = 1e-14, hi = 1.0 - 1e-14;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

//! Copula cdf C(u, v) on the open unit square.
inline double copula_cdf(const CopulaFamily& fam, double u, double v) {
  detail::check_interior(u, v);
  switch (fam.tag) {
    case FamilyTag::independence:
      return u * v;
    case FamilyTag::gaussian:
      return detail::binorm_cdf(detail::norm_quantile(u),
                                detail::norm_quantile(v), fam.theta);
    case FamilyTag::student_t: {
      // scale mixture of normals: integrate Phi2 over the chi-square mixer
      const double x = detail::student_t_quantile(u, fam.dof);
      const double y = detail::student_t_quantile(v, fam.dof);
      boost::math::chi_squared chi(fam.dof);
      // Gauss-Legendre over the chi-square probability scale
      const int N = 64;
      double acc = 0.0;
      for (int i = 0; i < N; ++i) {
        const double q = (i + 0.5) / N;
        const double s = std::sqrt(boost::math::quantile(chi, q) / fam.dof);
        acc += detail::binorm_cdf(x * s, y * s, fam.theta);
      }
      return acc / N;
    }
    case FamilyTag::frank:
      return detail::frank_cdf(u, v, fam.theta);
    case FamilyTag::clayton:
      return std::max(detail::clayton_cdf(u, v, fam.theta), 0.0);
    case FamilyTag::plackett:
      return detail::plackett_cdf(u, v, fam.theta);
    case FamilyTag::amh:
      return detail::amh_cdf(u, v, fam.theta);
    case FamilyTag::joe:
      return detail::joe_cdf(u, v, fam.theta);
    case FamilyTag::gumbel:
      return detail::gumbel_cdf(u, v, fam.theta);
    case FamilyTag::khoudraji:
      return std::pow(u, 1.0 - fam.lambda1) * std::pow(v, 1.0 - fam.lambda2) *
             copula_cdf(*fam.base, std::pow(u, fam.lambda1),
                        std::pow(v, fam.lambda2));
  }
  throw std::logic_error("unreachable");
}

//! Khoudraji asymmetrization of a base copula cdf.
inline double khoudraji_cdf(const CopulaFamily& base_family, double lambda1,
                            double lambda2, double u, double v) {
  return copula_cdf(khoudraji_copula(base_family, lambda1, lambda2), u, v);
}

//! Copula density c(u, v) in closed form; Khoudraji falls back to a central
//! finite difference of the cdf.
inline double true_density(const CopulaFamily& fam, double u, double v) {
  detail::check_interior(u, v);
  switch (fam.tag) {
    case FamilyTag::independence:
      return 1.0;
    case FamilyTag::gaussian: {
      const double x = detail::norm_quantile(u), y = detail::norm_quantile(v);
      const double r = fam.theta, q = 1.0 - r * r;
      return std::exp(-(r * r * (x * x + y * y) - 2.0 * r * x * y) /
                      (2.0 * q)) /
             std::sqrt(q);
    }
    case FamilyTag::student_t: {
      const double x = detail::student_t_quantile(u, fam.dof);
      const double y = detail::student_t_quantile(v, fam.dof);
      const double r = fam.theta, q = 1.0 - r * r, nu = fam.dof;
      const double joint =
          std::exp(std::lgamma((nu + 2.0) / 2.0) - std::lgamma(nu / 2.0)) /
          (nu * M_PI * std::sqrt(q)) *
          std::pow(1.0 + (x * x - 2.0 * r * x * y + y * y) / (nu * q),
                   -(nu + 2.0) / 2.0);
      return joint /
             (detail::student_t_pdf(x, nu) * detail::student_t_pdf(y, nu));
    }
    case FamilyTag::frank:
      return detail::frank_pdf(u, v, fam.theta);
    case FamilyTag::clayton:
      return detail::clayton_pdf(u, v, fam.theta);
    case FamilyTag::plackett:
      return detail::plackett_pdf(u, v, fam.theta);
    case FamilyTag::amh:
      return detail::amh_pdf(u, v, fam.theta);
    case FamilyTag::joe:
      return detail::joe_pdf(u, v, fam.theta);
    case FamilyTag::gumbel:
      return detail::gumbel_pdf(u, v, fam.theta);
    case FamilyTag::khoudraji: {
      const double h = 1e-5 * std::min({u, 1.0 - u, v, 1.0 - v, 0.5});
      const double cpp = copula_cdf(fam, u + h, v + h);
      const double cpm = copula_cdf(fam, u + h, v - h);
      const double cmp = copula_cdf(fam, u - h, v + h);
      const double cmm = copula_cdf(fam, u - h, v - h);
      return (cpp - cpm - cmp + cmm) / (4.0 * h * h);
    }
  }
  throw std::logic_error("unreachable");
}

//! Draws n i.i.d. pairs from the family; bit-reproducible given the seed.
inline std::vector<std::pair<double, double>> sample(const CopulaFamily& fam,
                                                     std::size_t n,
                                                     std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  const double th = fam.theta;

  if (fam.tag == FamilyTag::khoudraji) {
    // max construction: one base draw plus two independent uniforms per row
    const auto base_draws = sample(*fam.base, n, derive_seed(seed, 1));
    Rng mix(derive_seed(seed, 2));
    for (std::size_t i = 0; i < n; ++i) {
      const auto [s, t] = base_draws[i];
      const double w = mix.uniform(), z = mix.uniform();
      out.emplace_back(
          std::max(std::pow(s, 1.0 / fam.lambda1),
                   std::pow(w, 1.0 / (1.0 - fam.lambda1))),
          std::max(std::pow(t, 1.0 / fam.lambda2),
                   std::pow(z, 1.0 / (1.0 - fam.lambda2))));
    }
    return out;
  }

  Rng rng(seed);
  switch (fam.tag) {
    case FamilyTag::independence:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), v = rng.uniform();
        out.emplace_back(u, v);
      }
      break;
    case FamilyTag::gaussian: {
      const double mix = std::sqrt(1.0 - th * th);
      for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal(), z2 = rng.normal();
        out.emplace_back(detail::norm_cdf(z1),
                         detail::norm_cdf(th * z1 + mix * z2));
      }
      break;
    }
    case FamilyTag::student_t: {
      const double mix = std::sqrt(1.0 - th * th);
      const boost::math::chi_squared chi(fam.dof);
      const boost::math::students_t_distribution<double> tdist(fam.dof);
      for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal(), z2 = rng.normal();
        const double q = boost::math::quantile(chi, rng.uniform());
        const double s = std::sqrt(fam.dof / q);
        out.emplace_back(boost::math::cdf(tdist, z1 * s),
                         boost::math::cdf(tdist, (th * z1 + mix * z2) * s));
      }
      break;
    }
    case FamilyTag::frank:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), p = rng.uniform();
        out.emplace_back(u, detail::frank_hinv(u, p, th));
      }
      break;
    case FamilyTag::clayton:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), p = rng.uniform();
        out.emplace_back(u, detail::clayton_hinv(u, p, th));
      }
      break;
    case FamilyTag::plackett:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), p = rng.uniform();
        out.emplace_back(u, detail::cond_inverse(
                                [&](double v) {
                                  return detail::plackett_hu(u, v, th);
                                },
                                p));
      }
      break;
    case FamilyTag::amh:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), p = rng.uniform();
        out.emplace_back(
            u, detail::cond_inverse(
                   [&](double v) { return detail::amh_hu(u, v, th); }, p));
      }
      break;
    case FamilyTag::joe:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), p = rng.uniform();
        out.emplace_back(
            u, detail::cond_inverse(
                   [&](double v) { return detail::joe_hu(u, v, th); }, p));
      }
      break;
    case FamilyTag::gumbel:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), p = rng.uniform();
        out.emplace_back(
            u, detail::cond_inverse(
                   [&](double v) { return detail::gumbel_hu(u, v, th); }, p));
      }
      break;
    case FamilyTag::khoudraji:
      break;  // handled above
  }
  return out;
}

}  // namespace lpcop
