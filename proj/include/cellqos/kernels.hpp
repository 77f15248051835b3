#pragma once

#include <cstddef>
#include <span>

#include "cellqos/rng.hpp"

// Data-parallel inner loops of the simulator. Each kernel has a scalar
// reference and an AVX2 variant; the public entry points dispatch on the
// active level, which defaults to the best level the CPU supports.
//
// Bit-exactness between levels:
//   fill_uniform             identical bits
//   fill_normal, gain_reduce agree to a few ulp (the AVX2 variant uses its
//                            own exp/log/sin/cos polynomials)
// CSV output is therefore byte-reproducible for a fixed kernel level.
namespace cellqos::kernels {

enum class Level { Scalar, Avx2 };

Level detected_level();
Level active_level();
/// Requests a level; falls back to Scalar if the CPU lacks support.
void set_level(Level level);
const char* level_name(Level level);

/// Per-station inputs for gain_reduce. Gains are taken relative to K^beta:
///   g_i = S_i * r_i^(-beta),  r_i^2 = max(torus_sq_dist(bs_i, user), min_sq_dist)
/// with log S_i = sigma * z_i - sigma^2 / 2 (S_i = 1 when `normals` is empty).
struct GainInputs {
  std::span<const double> xs;
  std::span<const double> ys;
  double user_x = 0.0;
  double user_y = 0.0;
  double width = 0.0;
  double height = 0.0;
  double half_beta = 0.0;
  double sigma = 0.0;
  std::span<const double> normals;
  double min_sq_dist = 0.0;
};

struct GainSummary {
  double sum = 0.0;            // sum of all gains
  double max_gain = 0.0;       // strongest gain
  std::size_t argmax = 0;      // lowest index achieving max_gain
  std::size_t nearest = 0;     // lowest index achieving the smallest distance
  double nearest_sq_dist = 0.0;
  double nearest_gain = 0.0;
};

/// Uniforms on [0, 1), four lanes per step; a partial trailing group still
/// consumes a full step.
void fill_uniform(LaneRng& rng, std::span<double> out);

/// Standard normals by Box-Muller: each step draws u1, u2 per lane and
/// writes the four cosine outputs, then the four sine outputs.
void fill_normal(LaneRng& rng, std::span<double> out);

/// Requires xs.size() == ys.size() > 0 and normals empty or the same size.
GainSummary gain_reduce(const GainInputs& in);

void exp_array(std::span<const double> in, std::span<double> out);
void log_array(std::span<const double> in, std::span<double> out);

namespace scalar {
void fill_uniform(LaneRng& rng, std::span<double> out);
void fill_normal(LaneRng& rng, std::span<double> out);
GainSummary gain_reduce(const GainInputs& in);
void exp_array(std::span<const double> in, std::span<double> out);
void log_array(std::span<const double> in, std::span<double> out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define CELLQOS_HAVE_AVX2_KERNELS 1
namespace avx2 {
void fill_uniform(LaneRng& rng, std::span<double> out);
void fill_normal(LaneRng& rng, std::span<double> out);
GainSummary gain_reduce(const GainInputs& in);
void exp_array(std::span<const double> in, std::span<double> out);
void log_array(std::span<const double> in, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace cellqos::kernels
