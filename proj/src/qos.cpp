#include "cellqos/qos.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "cellqos/error.hpp"
#include "cellqos/kernels.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace cellqos {

const TorusSpec& model_torus(const LayoutModel& model) {
  return std::visit([](const auto& m) -> const TorusSpec& { return m.torus; }, model);
}

std::size_t serving_bs(std::span<const PathLoss> path_losses) {
  if (path_losses.empty()) throw DegenerateLayoutError();
  std::size_t best = 0;
  for (std::size_t i = 1; i < path_losses.size(); ++i)
    if (path_losses[i].value < path_losses[best].value) best = i;
  return best;
}

QosSample qos_sample(const BaseStationLayout& layout, Point2D user, std::span<const double> shadowing,
                     const DistanceLossParams& params, HandoverPolicy policy) {
  if (layout.empty()) throw DegenerateLayoutError();
  if (shadowing.size() != layout.size())
    throw Error(fmt::format("expected {} shadowing values, got {}", layout.size(), shadowing.size()));

  std::vector<PathLoss> losses;
  losses.reserve(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i)
    losses.push_back(path_loss(layout.positions[i], user, shadowing[i], params, layout.torus));

  std::size_t serving = 0;
  if (policy == HandoverPolicy::SmallestPathLoss) {
    serving = serving_bs(losses);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const double d2 = toroidal_sq_distance(layout.positions[i], user, layout.torus);
      if (d2 < best) {
        best = d2;
        serving = i;
      }
    }
  }

  QosSample out;
  out.serving_index = serving;
  out.l = losses[serving].value;
  for (std::size_t i = 0; i < losses.size(); ++i)
    if (i != serving) out.f += out.l / losses[i].value;
  return out;
}

QosSample qos_sample_kernel(std::span<const double> xs, std::span<const double> ys, const TorusSpec& torus,
                            Point2D user, const ShadowingModel& shadowing, std::span<const double> normals,
                            const DistanceLossParams& params, HandoverPolicy policy) {
  if (xs.empty()) throw DegenerateLayoutError();
  kernels::GainInputs in;
  in.xs = xs;
  in.ys = ys;
  in.user_x = user.x;
  in.user_y = user.y;
  in.width = torus.width();
  in.height = torus.height();
  in.half_beta = 0.5 * params.beta;
  in.min_sq_dist = kMinDistanceKm * kMinDistanceKm;
  if (!shadowing.is_trivial()) {
    in.sigma = shadowing.sigma();
    in.normals = normals;
  }
  const kernels::GainSummary g = kernels::gain_reduce(in);
  const bool strongest = policy == HandoverPolicy::SmallestPathLoss;
  const double serving_gain = strongest ? g.max_gain : g.nearest_gain;
  QosSample out;
  out.serving_index = strongest ? g.argmax : g.nearest;
  out.l = std::pow(params.k_per_km, params.beta) / serving_gain;
  out.f = (g.sum - serving_gain) / serving_gain;
  return out;
}

namespace {

struct BlockStats {
  detail::Moments f;
  detail::Moments l;
  detail::Moments l_db;
  std::size_t resamples = 0;
};

struct Workspace {
  detail::StationBuffers stations;
  std::vector<double> normals;
};

BlockStats run_block(const LayoutModel& model, const FactorOptions& opt, const detail::StationBuffers* hex,
                     std::size_t first, std::size_t count, Workspace& ws) {
  BlockStats stats;
  const TorusSpec& torus = model_torus(model);
  const bool shadowed = !opt.shadowing.is_trivial();
  for (std::size_t s = first; s < first + count; ++s) {
    Xoshiro256pp rng(derive_seed(opt.root_seed, StreamTag::kFactorSample, s));
    LaneRng lanes(rng());
    const Point2D user = detail::uniform_point(torus, rng);

    const detail::StationBuffers* stations = hex;
    if (const auto* poisson = std::get_if<PoissonModel>(&model)) {
      while (ws.stations.draw_poisson(*poisson, rng, lanes) == 0) ++stats.resamples;
      stations = &ws.stations;
    }
    const std::size_t n_bs = stations->xs.size();
    if (shadowed) {
      ws.normals.resize(n_bs);
      kernels::fill_normal(lanes, ws.normals);
    }
    const QosSample q = qos_sample_kernel(stations->xs, stations->ys, torus, user, opt.shadowing,
                                          shadowed ? std::span<const double>(ws.normals) : std::span<const double>(),
                                          opt.loss, opt.policy);
    stats.f.add(q.f);
    stats.l.add(q.l);
    stats.l_db.add(10.0 * std::log10(q.l));
  }
  return stats;
}

}  // namespace

FactorEstimate estimate_factors(const LayoutModel& model, const FactorOptions& opt) {
  if (opt.n_samples < 2) throw Error(fmt::format("n_samples must be at least 2, got {}", opt.n_samples));

  detail::StationBuffers hex_stations;
  const detail::StationBuffers* hex = nullptr;
  if (const auto* h = std::get_if<HexModel>(&model)) {
    hex_stations.assign(hex_layout(h->torus));
    hex = &hex_stations;
  } else if (!(std::get<PoissonModel>(model).intensity > 0.0)) {
    throw Error("Poisson intensity must be positive");
  }

  const std::size_t blocks = (opt.n_samples + kFactorBlockSize - 1) / kFactorBlockSize;
  std::vector<BlockStats> results(blocks);
  const unsigned workers = std::max(1u, opt.threads);
  std::vector<Workspace> spaces(workers);
  detail::parallel_for(blocks, workers, [&](std::size_t b, unsigned worker) {
    const std::size_t first = b * kFactorBlockSize;
    const std::size_t count = std::min(kFactorBlockSize, opt.n_samples - first);
    results[b] = run_block(model, opt, hex, first, count, spaces[worker]);
  });

  BlockStats total;
  for (const auto& r : results) {
    total.f.merge(r.f);
    total.l.merge(r.l);
    total.l_db.merge(r.l_db);
    total.resamples += r.resamples;
  }

  FactorEstimate est;
  est.n_samples = total.f.n;
  est.mean_f = total.f.mean;
  est.se_f = total.f.standard_error();
  est.mean_l = total.l.mean;
  est.se_l = total.l.standard_error();
  est.mean_l_db = 10.0 * std::log10(total.l.mean);
  est.mean_of_l_db = total.l_db.mean;
  est.se_of_l_db = total.l_db.standard_error();
  est.resamples = total.resamples;
  return est;
}

}  // namespace cellqos
