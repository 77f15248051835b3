// Scalar reference kernels. These define the semantics that the SIMD
// variants must reproduce.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "cellqos/kernels.hpp"

namespace cellqos::kernels::scalar {

void fill_uniform(LaneRng& rng, std::span<double> out) {
  std::uint64_t bits[LaneRng::kLanes];
  for (std::size_t i = 0; i < out.size(); i += LaneRng::kLanes) {
    rng.next(bits);
    const std::size_t m = std::min<std::size_t>(LaneRng::kLanes, out.size() - i);
    for (std::size_t k = 0; k < m; ++k) out[i + k] = bits_to_unit(bits[k]);
  }
}

void fill_normal(LaneRng& rng, std::span<double> out) {
  constexpr std::size_t kStep = 2 * LaneRng::kLanes;
  std::uint64_t b1[LaneRng::kLanes];
  std::uint64_t b2[LaneRng::kLanes];
  double z[kStep];
  for (std::size_t i = 0; i < out.size(); i += kStep) {
    rng.next(b1);
    rng.next(b2);
    for (int k = 0; k < LaneRng::kLanes; ++k) {
      const double u1 = 1.0 - bits_to_unit(b1[k]);  // (0, 1]
      const double u2 = bits_to_unit(b2[k]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double theta = 2.0 * std::numbers::pi * u2;
      z[k] = radius * std::cos(theta);
      z[k + LaneRng::kLanes] = radius * std::sin(theta);
    }
    const std::size_t m = std::min(kStep, out.size() - i);
    std::copy_n(z, m, out.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

GainSummary gain_reduce(const GainInputs& in) {
  const std::size_t n = in.xs.size();
  const bool shadowed = !in.normals.empty();
  const double half_sigma2 = 0.5 * in.sigma * in.sigma;
  GainSummary s;
  s.max_gain = -1.0;
  s.nearest_sq_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double dx = std::abs(in.xs[i] - in.user_x);
    dx = std::min(dx, in.width - dx);
    double dy = std::abs(in.ys[i] - in.user_y);
    dy = std::min(dy, in.height - dy);
    const double d2 = dx * dx + dy * dy;
    const double t = in.half_beta * std::log(std::max(d2, in.min_sq_dist));
    const double e = shadowed ? (in.sigma * in.normals[i] - half_sigma2) - t : -t;
    const double g = std::exp(e);
    s.sum += g;
    if (g > s.max_gain) {
      s.max_gain = g;
      s.argmax = i;
    }
    if (d2 < s.nearest_sq_dist) {
      s.nearest_sq_dist = d2;
      s.nearest = i;
      s.nearest_gain = g;
    }
  }
  return s;
}

void exp_array(std::span<const double> in, std::span<double> out) {
  std::transform(in.begin(), in.end(), out.begin(), [](double x) { return std::exp(x); });
}

void log_array(std::span<const double> in, std::span<double> out) {
  std::transform(in.begin(), in.end(), out.begin(), [](double x) { return std::log(x); });
}

}  // namespace cellqos::kernels::scalar
