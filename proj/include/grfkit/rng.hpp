#pragma once

#include <array>
#include <cstdint>

namespace grfkit {

/// Names one reproducible random stream.  Equal (seed, stream_id) pairs
/// always yield identical draws, on any platform and thread count.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

namespace rng {

/// One application of the Philox-4x64-10 bijection: 4 counter words ->
/// 4 pseudo-random words under a 2-word key.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Standard-normal quantile function on (0,1).  Rational initial guess
/// polished with one Halley step against erfc; absolute error < 1e-13
/// over the full open interval.
double normal_icdf(double u);

}  // namespace rng

/// Stateless counter-based generator: draw i of a stream is a pure function
/// of (seed, stream_id, i), so parallel consumers can index draws directly.
class CounterRng {
 public:
  explicit CounterRng(RandomStream s) : key_{s.seed, s.stream_id} {}

  /// 64 uniform random bits for draw index i.
  std::uint64_t raw(std::uint64_t i) const {
    const std::array<std::uint64_t, 4> block = rng::philox4x64({i >> 2, 0, 0, 0}, key_);
    return block[i & 3];
  }

  /// Uniform on the open interval (0,1): ((bits >> 11) + 0.5) * 2^-53.
  double uniform01(std::uint64_t i) const {
    return (static_cast<double>(raw(i) >> 11) + 0.5) * 0x1p-53;
  }

  /// Standard normal via the quantile transform (monotone in the uniform).
  double normal(std::uint64_t i) const { return rng::normal_icdf(uniform01(i)); }

 private:
  std::array<std::uint64_t, 2> key_;
};

}  // namespace grfkit
