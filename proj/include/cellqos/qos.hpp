#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>

#include "cellqos/geometry.hpp"
#include "cellqos/propagation.hpp"

namespace cellqos {

enum class HandoverPolicy { SmallestPathLoss, GeographicallyClosest };

/// One user draw: serving station, path-loss factor l, interference factor f.
struct QosSample {
  std::size_t serving_index = 0;
  double l = 0.0;
  double f = 0.0;
};

struct FactorEstimate {
  double mean_f = 0.0;
  double se_f = 0.0;
  double mean_l = 0.0;
  double se_l = 0.0;
  double mean_l_db = 0.0;     // 10 log10(mean_l)
  double mean_of_l_db = 0.0;  // mean of 10 log10(l)
  double se_of_l_db = 0.0;
  std::size_t n_samples = 0;
  std::size_t resamples = 0;  // empty Poisson layouts redrawn
};

struct HexModel {
  TorusSpec torus;
};

struct PoissonModel {
  TorusSpec torus;
  double intensity;  // BS per km^2
};

using LayoutModel = std::variant<HexModel, PoissonModel>;

const TorusSpec& model_torus(const LayoutModel& model);

/// Index of the smallest path-loss; ties go to the lowest index.
/// Throws DegenerateLayoutError on an empty list.
std::size_t serving_bs(std::span<const PathLoss> path_losses);

/// Reference evaluation of l and f for one user location given the linear
/// shadowing value of every station.
QosSample qos_sample(const BaseStationLayout& layout, Point2D user, std::span<const double> shadowing,
                     const DistanceLossParams& params, HandoverPolicy policy);

struct FactorOptions {
  ShadowingModel shadowing = ShadowingModel::none();
  DistanceLossParams loss{8667.0, 3.38};
  HandoverPolicy policy = HandoverPolicy::SmallestPathLoss;
  std::size_t n_samples = 100000;
  std::uint64_t root_seed = 1;
  unsigned threads = 1;
};

/// Samples per work unit. Results are bit-identical for any thread count
/// because each sample draws from its own derived stream and block partial
/// sums are merged in block order.
inline constexpr std::size_t kFactorBlockSize = 1024;

/// Monte Carlo estimate of E[f] and E[l]: the user is uniform on the torus;
/// Poisson layouts are redrawn for every sample; shadowing is fresh per
/// station and sample.
FactorEstimate estimate_factors(const LayoutModel& model, const FactorOptions& options);

/// Fast path used by the estimators: the same quantity as qos_sample but
/// evaluated through the gain kernels. Exposed for equivalence tests.
QosSample qos_sample_kernel(std::span<const double> xs, std::span<const double> ys, const TorusSpec& torus,
                            Point2D user, const ShadowingModel& shadowing, std::span<const double> normals,
                            const DistanceLossParams& params, HandoverPolicy policy);

}  // namespace cellqos
