#pragma once

#include <cstdint>
#include <random>

namespace nest {

//! SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

//! Seed for sub-stream `stream` (and optional `sub`) of a master seed.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::uint64_t stream,
                          std::uint64_t sub = 0);

//! Portable random source.
//!
//! The engine is std::mt19937_64, whose output sequence is fixed by the C++
//! standard. The standard distributions are implementation-defined, so every
//! variate below is built directly from raw 64-bit draws:
//!  - uniform(): top 53 bits scaled by 2^-53, in [0, 1);
//!  - below(n): Lemire's multiply-shift with rejection, exact and unbiased;
//!  - normal(): Marsaglia polar method, caching the second variate.
class Rng
{
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

} // namespace nest
