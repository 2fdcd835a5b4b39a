#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bmv {

/// Inverse-CDF exponential sample: -ln(u)/rate for u in (0, 1).
inline double exp_from_uniform(double u, double rate) { return -std::log(u) / rate; }

/// Seed for the `index`-th member of a family derived from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Deterministic random stream keyed by (seed, stream_index).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard; uniforms are built from the top 53 bits by hand rather than
/// through std::uniform_real_distribution, whose algorithm is
/// implementation-defined. The same key therefore yields the same sequence
/// on every conforming platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double exp_sample(double rate) { return exp_from_uniform(uniform(), rate); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

}  // namespace bmv
