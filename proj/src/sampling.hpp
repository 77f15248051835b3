#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "cellqos/geometry.hpp"
#include "cellqos/kernels.hpp"
#include "cellqos/qos.hpp"
#include "cellqos/rng.hpp"

namespace cellqos::detail {

/// Station coordinates in structure-of-arrays form for the gain kernels.
struct StationBuffers {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> scratch;

  void assign(const BaseStationLayout& layout) {
    xs.resize(layout.size());
    ys.resize(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
      xs[i] = layout.positions[i].x;
      ys[i] = layout.positions[i].y;
    }
  }

  /// Poisson(intensity * area) stations placed uniformly with the lane
  /// generator. Returns the station count (possibly 0).
  std::size_t draw_poisson(const PoissonModel& model, Xoshiro256pp& scalar_rng, LaneRng& lanes) {
    std::poisson_distribution<std::int64_t> count_dist(model.intensity * model.torus.area());
    const auto count = static_cast<std::size_t>(count_dist(scalar_rng));
    xs.resize(count);
    ys.resize(count);
    kernels::fill_uniform(lanes, xs);
    kernels::fill_uniform(lanes, ys);
    const double w = model.torus.width();
    const double h = model.torus.height();
    for (std::size_t i = 0; i < count; ++i) {
      xs[i] = (xs[i] - 0.5) * w;
      ys[i] = (ys[i] - 0.5) * h;
    }
    return count;
  }
};

inline Point2D uniform_point(const TorusSpec& torus, Xoshiro256pp& rng) {
  const double x = (rng.uniform() - 0.5) * torus.width();
  const double y = (rng.uniform() - 0.5) * torus.height();
  return torus.canonical({x, y});
}

}  // namespace cellqos::detail
