#include "cellqos/rng.hpp"

#include <bit>
#include <cstring>

namespace cellqos {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  return mix(state);
}

std::uint64_t derive_seed(std::uint64_t root, StreamTag tag, std::uint64_t index) {
  std::uint64_t s = root;
  s ^= mix(static_cast<std::uint64_t>(tag) + 0x9e3779b97f4a7c15ULL);
  s = mix(s);
  s ^= mix(index + 0x3c6ef372fe94f82aULL);
  return mix(s);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64(sm);
}

Xoshiro256pp::result_type Xoshiro256pp::operator()() {
  const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double Xoshiro256pp::uniform() { return bits_to_unit((*this)()); }

LaneRng::LaneRng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (int lane = 0; lane < kLanes; ++lane)
    for (int w = 0; w < 4; ++w) state[w][lane] = splitmix64(sm);
}

void LaneRng::next(std::uint64_t (&out)[kLanes]) {
  for (int lane = 0; lane < kLanes; ++lane) {
    std::uint64_t& s0 = state[0][lane];
    std::uint64_t& s1 = state[1][lane];
    std::uint64_t& s2 = state[2][lane];
    std::uint64_t& s3 = state[3][lane];
    out[lane] = std::rotl(s0 + s3, 23) + s0;
    const std::uint64_t t = s1 << 17;
    s2 ^= s0;
    s3 ^= s1;
    s1 ^= s2;
    s0 ^= s3;
    s2 ^= t;
    s3 = std::rotl(s3, 45);
  }
}

double bits_to_unit(std::uint64_t bits) {
  const std::uint64_t one_to_two = (bits >> 12) | 0x3ff0000000000000ULL;
  return std::bit_cast<double>(one_to_two) - 1.0;
}

}  // namespace cellqos
