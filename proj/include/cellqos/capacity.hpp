#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cellqos/propagation.hpp"
#include "cellqos/qos.hpp"

namespace cellqos {

/// Down-link radio parameters. Defaults: 5 MHz, 43 dBm + 9 dBi, 12% common
/// channels, perfect orthogonality, -103 dBm noise, Shannon link.
struct RadioParams {
  double bandwidth_hz = 5e6;
  double max_power_dbm = 52.0;
  double common_channel_fraction = 0.12;
  double orthogonality = 0.0;
  double noise_power_dbm = -103.0;
  double psi_scale = 1.0;

  /// Throws Error on out-of-range values.
  void validate() const;
  /// Noise-to-power ratio in linear units.
  double noise_to_power() const;
};

struct ServiceClass {
  double bit_rate_bps = 180e3;
};

struct TrafficSpec {
  double density_erlang_per_km2 = 46.2;
};

enum class Technology { Ofdma, Cdma };

double dbm_to_mw(double dbm);

/// a log2(1 + xi)
double psi(double xi, double a = 1.0);
/// 2^{u/a} - 1
double psi_inverse(double u, double a = 1.0);

/// SINR under the OFDMA admission model, (1-eps) / (N l / P + alpha + f).
double sinr_ofdma(double l, double f, const RadioParams& radio);

/// Fraction of the station's resource one user takes, r / (W psi(sinr)).
/// Infinite when the SINR is 0.
double phi_ofdma(double l, double f, const RadioParams& radio, const ServiceClass& svc);

/// xi/(1 + alpha xi) * 1/(1-eps) * (N l / P + alpha + f)
double phi_cdma(double l, double f, const RadioParams& radio, double xi_threshold);

/// SINR threshold psi^{-1}(r/W) for CDMA.
double cdma_threshold(const RadioParams& radio, const ServiceClass& svc);

/// Unit count of a user on a station of C units: ceil(phi C), at least 1.
/// Saturates at a large finite value for infinite phi.
std::int64_t discretize_demand(double phi, int capacity_units);

struct TrafficClass {
  double rho;           // Erlang
  std::int64_t demand;  // resource units
};

struct KaufmanRobertsResult {
  std::vector<double> occupancy;  // pi(0..C)
  std::vector<double> blocking;   // per input class
};

/// Occupancy distribution and per-class blocking of a multi-rate Erlang loss
/// system with C units. Classes demanding more than C units are blocked
/// with probability 1 and do not enter the recursion.
KaufmanRobertsResult kaufman_roberts(std::span<const TrafficClass> classes, int capacity_units);

/// Traffic offered to one station: one class per user location it serves.
struct CellDemandProfile {
  std::size_t bs_index = 0;
  std::vector<TrafficClass> classes;
  int capacity_units = 1000;
};

/// Arrival-weighted blocking sum(rho_j B_j) / sum(rho_j) over the profiles.
/// Profiles without classes contribute nothing.
double arrival_weighted_blocking(std::span<const CellDemandProfile> profiles);

struct BlockingOptions {
  ShadowingModel shadowing = ShadowingModel::none();
  DistanceLossParams loss{8667.0, 3.38};
  RadioParams radio{};
  ServiceClass service{};
  TrafficSpec traffic{};
  Technology tech = Technology::Ofdma;
  int capacity_units = 1000;
  std::size_t locations = 1080;   // M per realization
  std::size_t realizations = 4;   // R
  std::uint64_t root_seed = 1;
  unsigned threads = 1;
};

struct BlockingResult {
  double mean_blocking = 0.0;
  double se = 0.0;
  std::vector<double> per_realization;
  std::size_t resamples = 0;
};

/// Mean blocking over R network realizations. Each realization places M
/// uniform user locations with fresh shadowing to every station, serves
/// each by the smallest path-loss, turns each location into a class of
/// density*area/M Erlang, and runs Kaufman-Roberts per station.
BlockingResult blocking_probability(const LayoutModel& model, const BlockingOptions& options);

}  // namespace cellqos
