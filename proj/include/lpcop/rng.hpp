#pragma once

#include <boost/math/distributions/normal.hpp>
#include <cstdint>

namespace lpcop {

//! splitmix64 finalizer; also used to derive independent per-task seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Seed for subtask `index` of a run with the given master seed. The same
//! (master, index) pair always yields the same stream, so serial and
//! parallel schedules produce identical results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  return splitmix64(s);
}

//! Deterministic generator over a splitmix64 stream.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  //! Uniform draw in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  //! Standard normal via the inverse-cdf transform (deterministic).
  double normal() {
    static const boost::math::normal_distribution<double> dist;
    return boost::math::quantile(dist, uniform());
  }

private:
  std::uint64_t state_;
};

}  // namespace lpcop
