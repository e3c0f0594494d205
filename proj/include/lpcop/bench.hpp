#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "lpcop/copula_model.hpp"
#include "lpcop/reference_copulas.hpp"

namespace lpcop {

//! Monte-Carlo MIAE run configuration.
struct BenchConfig {
  CopulaFamily family;
  std::size_t n = 1000;     //!< sample size per replication
  std::size_t reps = 250;   //!< Monte-Carlo replications (B)
  std::size_t grid = 50;    //!< evaluation lattice size (L)
  std::size_t degree = 4;   //!< basis degree (m)
  std::uint64_t seed = 1;   //!< master seed; replication b uses derive_seed(seed, b)
  bool denoise = true;
  unsigned threads = 1;     //!< 0 = hardware concurrency

  void validate() const {
    if (reps < 1 || grid < 1 || n < 4) {
      throw std::invalid_argument("bench config out of range");
    }
  }
};

//! Aggregated MIAE result; per-replication errors are kept so that runs can
//! be compared exactly across schedules.
struct BenchReport {
  double miae_mean = 0.0;
  double miae_stderr = 0.0;
  std::vector<double> per_rep;
  double seconds_per_fit = 0.0;  //!< wall-clock mean over replications
};

namespace detail {

//! Grid-average |fitted - true| for one replication.
inline double miae_once(const BenchConfig& cfg, std::uint64_t rep_seed) {
  const auto draws = sample(cfg.family, cfg.n, rep_seed);
  std::vector<double> u(cfg.n), v(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    u[i] = draws[i].first;
    v[i] = draws[i].second;
  }
  const CopulaModel model = fit_copula(u, v, cfg.degree, cfg.denoise);
  const Eigen::MatrixXd grid = model.density_grid(cfg.grid);
  const double L1 = static_cast<double>(cfg.grid + 1);
  double acc = 0.0;
  for (std::size_t i = 1; i <= cfg.grid; ++i) {
    for (std::size_t j = 1; j <= cfg.grid; ++j) {
      const double t = true_density(cfg.family, i / L1, j / L1);
      acc += std::fabs(grid(static_cast<Eigen::Index>(i - 1),
                            static_cast<Eigen::Index>(j - 1)) -
                       t);
    }
  }
  return acc / static_cast<double>(cfg.grid * cfg.grid);
}

}  // namespace detail

//! Runs the Monte-Carlo MIAE protocol. Replications are independent and
//! seeded by index, so any thread count yields identical per-replication
//! errors; aggregation is fixed-order over the replication index.
inline BenchReport run_miae(const BenchConfig& cfg) {
  cfg.validate();
  BenchReport report;
  report.per_rep.assign(cfg.reps, 0.0);

  unsigned threads = cfg.threads == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : cfg.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.reps));

  const auto t0 = std::chrono::steady_clock::now();
  if (threads <= 1) {
    for (std::size_t b = 0; b < cfg.reps; ++b) {
      report.per_rep[b] = detail::miae_once(cfg, derive_seed(cfg.seed, b));
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next.fetch_add(1); b < cfg.reps;
             b = next.fetch_add(1)) {
          report.per_rep[b] = detail::miae_once(cfg, derive_seed(cfg.seed, b));
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  const auto t1 = std::chrono::steady_clock::now();
  report.seconds_per_fit =
      std::chrono::duration<double>(t1 - t0).count() /
      static_cast<double>(cfg.reps);

  double mean = 0.0;
  for (double e : report.per_rep) mean += e;
  mean /= static_cast<double>(cfg.reps);
  double var = 0.0;
  for (double e : report.per_rep) var += (e - mean) * (e - mean);
  report.miae_mean = mean;
  report.miae_stderr =
      cfg.reps > 1 ? std::sqrt(var / static_cast<double>(cfg.reps - 1) /
                               static_cast<double>(cfg.reps))
                   : 0.0;
  return report;
}

//! One timing row: sample size and median seconds for a full fit.
struct TimingRow {
  std::size_t n = 0;
  double seconds = 0.0;
};

//! Measures the median wall-clock of a complete fit (pseudo-observations,
//! bases, comeans, selection) on independent uniform data.
inline std::vector<TimingRow> run_timing(const std::vector<std::size_t>& sizes,
                                         std::size_t reps = 5,
                                         std::size_t degree = 4,
                                         std::uint64_t seed = 1) {
  if (reps < 1) throw std::invalid_argument("timing needs reps >= 1");
  std::vector<TimingRow> rows;
  for (std::size_t n : sizes) {
    std::vector<double> times;
    times.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      Rng rng(derive_seed(seed, rows.size() * reps + r));
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
      }
      const auto t0 = std::chrono::steady_clock::now();
      volatile double sink =
          fit_copula(x, y, degree, true).comeans().sum_squares(true);
      (void)sink;
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    rows.push_back({n, times[times.size() / 2]});
  }
  return rows;
}

}  // namespace lpcop
