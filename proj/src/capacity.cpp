#include "cellqos/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "cellqos/error.hpp"
#include "cellqos/kernels.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace cellqos {

void RadioParams::validate() const {
  if (!(bandwidth_hz > 0.0)) throw Error(fmt::format("bandwidth must be positive, got {}", bandwidth_hz));
  if (!(common_channel_fraction >= 0.0 && common_channel_fraction < 1.0))
    throw Error(fmt::format("common channel fraction must lie in [0, 1), got {}", common_channel_fraction));
  if (!(orthogonality >= 0.0 && orthogonality <= 1.0))
    throw Error(fmt::format("orthogonality factor must lie in [0, 1], got {}", orthogonality));
  if (!(psi_scale > 0.0 && psi_scale <= 1.0))
    throw Error(fmt::format("link performance scale must lie in (0, 1], got {}", psi_scale));
  if (!std::isfinite(max_power_dbm) || !std::isfinite(noise_power_dbm)) throw Error("powers must be finite");
}

double RadioParams::noise_to_power() const { return dbm_to_mw(noise_power_dbm) / dbm_to_mw(max_power_dbm); }

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double psi(double xi, double a) {
  if (!(xi >= 0.0)) throw Error(fmt::format("SINR must be non-negative, got {}", xi));
  return a * std::log2(1.0 + xi);
}

double psi_inverse(double u, double a) { return std::exp2(u / a) - 1.0; }

double sinr_ofdma(double l, double f, const RadioParams& radio) {
  return (1.0 - radio.common_channel_fraction) / (radio.noise_to_power() * l + radio.orthogonality + f);
}

double phi_ofdma(double l, double f, const RadioParams& radio, const ServiceClass& svc) {
  if (!(l > 0.0) || !(f >= 0.0)) throw Error(fmt::format("phi_ofdma needs l > 0 and f >= 0, got l={} f={}", l, f));
  const double rate = psi(sinr_ofdma(l, f, radio), radio.psi_scale);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return svc.bit_rate_bps / (radio.bandwidth_hz * rate);
}

double phi_cdma(double l, double f, const RadioParams& radio, double xi_threshold) {
  if (!(l > 0.0) || !(f >= 0.0)) throw Error(fmt::format("phi_cdma needs l > 0 and f >= 0, got l={} f={}", l, f));
  if (!(xi_threshold > 0.0)) throw Error(fmt::format("SINR threshold must be positive, got {}", xi_threshold));
  const double alpha = radio.orthogonality;
  return xi_threshold / (1.0 + alpha * xi_threshold) / (1.0 - radio.common_channel_fraction) *
         (radio.noise_to_power() * l + alpha + f);
}

double cdma_threshold(const RadioParams& radio, const ServiceClass& svc) {
  return psi_inverse(svc.bit_rate_bps / radio.bandwidth_hz, radio.psi_scale);
}

std::int64_t discretize_demand(double phi, int capacity_units) {
  if (!(phi > 0.0)) throw Error(fmt::format("phi must be positive, got {}", phi));
  if (capacity_units < 1) throw Error(fmt::format("capacity must be at least 1 unit, got {}", capacity_units));
  constexpr auto kSaturated = std::int64_t{1} << 62;
  const double units = std::ceil(phi * capacity_units);
  if (!(units < static_cast<double>(kSaturated))) return kSaturated;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(units));
}

KaufmanRobertsResult kaufman_roberts(std::span<const TrafficClass> classes, int capacity_units) {
  if (capacity_units < 1) throw Error(fmt::format("capacity must be at least 1 unit, got {}", capacity_units));
  const auto c = static_cast<std::size_t>(capacity_units);

  // Offered load per demand size: a_d = d * sum of rho over classes of size d.
  std::map<std::int64_t, double> load;
  for (const auto& k : classes) {
    if (!(k.rho >= 0.0)) throw Error(fmt::format("traffic intensity must be non-negative, got {}", k.rho));
    if (k.demand < 1) throw Error(fmt::format("demand must be at least 1 unit, got {}", k.demand));
    if (k.demand <= capacity_units) load[k.demand] += k.rho * static_cast<double>(k.demand);
  }
  std::vector<std::pair<std::size_t, double>> terms;
  for (const auto& [d, a] : load)
    if (a > 0.0) terms.emplace_back(static_cast<std::size_t>(d), a);

  std::vector<double> g(c + 1, 0.0);
  g[0] = 1.0;
  constexpr double kRescaleAbove = 1e250;
  for (std::size_t n = 1; n <= c; ++n) {
    double acc = 0.0;
    for (const auto& [d, a] : terms) {
      if (d > n) break;
      acc += a * g[n - d];
    }
    g[n] = acc / static_cast<double>(n);
    if (g[n] > kRescaleAbove)
      for (std::size_t m = 0; m <= n; ++m) g[m] /= kRescaleAbove;
  }

  double total = 0.0;
  for (double v : g) total += v;
  KaufmanRobertsResult out;
  out.occupancy.resize(c + 1);
  for (std::size_t n = 0; n <= c; ++n) out.occupancy[n] = g[n] / total;

  // tail[n] = sum_{m >= n} pi(m)
  std::vector<double> tail(c + 2, 0.0);
  for (std::size_t n = c + 1; n-- > 0;) tail[n] = tail[n + 1] + out.occupancy[n];

  out.blocking.reserve(classes.size());
  for (const auto& k : classes) {
    if (k.demand > capacity_units) {
      out.blocking.push_back(1.0);
    } else {
      out.blocking.push_back(std::min(1.0, tail[c - static_cast<std::size_t>(k.demand) + 1]));
    }
  }
  return out;
}

double arrival_weighted_blocking(std::span<const CellDemandProfile> profiles) {
  double blocked = 0.0;
  double offered = 0.0;
  for (const auto& p : profiles) {
    if (p.classes.empty()) continue;
    const auto kr = kaufman_roberts(p.classes, p.capacity_units);
    for (std::size_t j = 0; j < p.classes.size(); ++j) {
      blocked += p.classes[j].rho * kr.blocking[j];
      offered += p.classes[j].rho;
    }
  }
  return offered > 0.0 ? blocked / offered : 0.0;
}

BlockingResult blocking_probability(const LayoutModel& model, const BlockingOptions& opt) {
  if (opt.locations < 1) throw Error("need at least one user location per realization");
  if (opt.realizations < 1) throw Error("need at least one realization");
  if (opt.capacity_units < 1) throw Error(fmt::format("capacity must be at least 1 unit, got {}", opt.capacity_units));
  if (!(opt.traffic.density_erlang_per_km2 >= 0.0))
    throw Error(fmt::format("traffic density must be non-negative, got {}", opt.traffic.density_erlang_per_km2));
  if (!(opt.service.bit_rate_bps > 0.0)) throw Error("bit rate must be positive");
  opt.radio.validate();

  const TorusSpec& torus = model_torus(model);
  const double rho = opt.traffic.density_erlang_per_km2 * torus.area() / static_cast<double>(opt.locations);
  const double xi_threshold = cdma_threshold(opt.radio, opt.service);
  const bool shadowed = !opt.shadowing.is_trivial();

  detail::StationBuffers hex_stations;
  const bool is_hex = std::holds_alternative<HexModel>(model);
  if (is_hex) hex_stations.assign(hex_layout(torus));

  std::vector<double> per_realization(opt.realizations);
  std::vector<std::size_t> resamples(opt.realizations, 0);
  detail::parallel_for(opt.realizations, opt.threads, [&](std::size_t r, unsigned) {
    Xoshiro256pp rng(derive_seed(opt.root_seed, StreamTag::kBlockingRealization, r));
    LaneRng lanes(rng());
    detail::StationBuffers poisson_stations;
    const detail::StationBuffers* stations = &hex_stations;
    if (!is_hex) {
      while (poisson_stations.draw_poisson(std::get<PoissonModel>(model), rng, lanes) == 0) ++resamples[r];
      stations = &poisson_stations;
    }
    const std::size_t n_bs = stations->xs.size();
    std::vector<CellDemandProfile> profiles(n_bs);
    for (std::size_t b = 0; b < n_bs; ++b) {
      profiles[b].bs_index = b;
      profiles[b].capacity_units = opt.capacity_units;
    }
    std::vector<double> normals(shadowed ? n_bs : 0);
    for (std::size_t m = 0; m < opt.locations; ++m) {
      const Point2D user = detail::uniform_point(torus, rng);
      if (shadowed) kernels::fill_normal(lanes, normals);
      const QosSample q = qos_sample_kernel(stations->xs, stations->ys, torus, user, opt.shadowing, normals,
                                            opt.loss, HandoverPolicy::SmallestPathLoss);
      if (rho <= 0.0) continue;
      const double phi = opt.tech == Technology::Ofdma ? phi_ofdma(q.l, q.f, opt.radio, opt.service)
                                                       : phi_cdma(q.l, q.f, opt.radio, xi_threshold);
      profiles[q.serving_index].classes.push_back({rho, discretize_demand(phi, opt.capacity_units)});
    }
    per_realization[r] = arrival_weighted_blocking(profiles);
  });

  detail::Moments m;
  for (double b : per_realization) m.add(b);
  BlockingResult out;
  out.mean_blocking = m.mean;
  out.se = m.standard_error();
  out.per_realization = std::move(per_realization);
  for (auto k : resamples) out.resamples += k;
  return out;
}

}  // namespace cellqos
