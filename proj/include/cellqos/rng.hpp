#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cellqos {

/// Stream tags mixed into derive_seed so that different consumers of one
/// root seed never share a stream.
enum class StreamTag : std::uint64_t {
  kFactorSample = 1,
  kBlockingRealization = 2,
  kPoissonLayout = 3,
  kLossSystem = 4,
};

/// SplitMix64 step. Advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed-expansion rule used for every derived stream:
///   seed = splitmix64 chain over (root, tag, index), i.e.
///   s = root; s ^= mix(tag); s ^= mix(index); return mix(s)
/// where mix is one SplitMix64 finalization. Streams for distinct
/// (tag, index) pairs are therefore decorrelated, and the value depends
/// only on the triple, not on thread count or scheduling.
std::uint64_t derive_seed(std::uint64_t root, StreamTag tag, std::uint64_t index);

/// xoshiro256++; satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 52 random mantissa bits.
  double uniform();

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Four independent xoshiro256++ generators stored lane-major, so that one
/// step yields four 64-bit outputs. The SIMD kernels advance all lanes in
/// one vector operation; the scalar kernels advance them in a loop. Both
/// produce the same bits.
class LaneRng {
 public:
  static constexpr int kLanes = 4;

  explicit LaneRng(std::uint64_t seed);

  /// state[word][lane]
  alignas(32) std::uint64_t state[4][kLanes];

  /// Scalar step of all four lanes; writes one output per lane.
  void next(std::uint64_t (&out)[kLanes]);
};

/// 52-bit uniform in [0, 1) built by exponent stuffing; identical in every
/// kernel implementation.
double bits_to_unit(std::uint64_t bits);

}  // namespace cellqos
