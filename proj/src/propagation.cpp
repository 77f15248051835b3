#include "cellqos/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "cellqos/error.hpp"

namespace cellqos {

DistanceLossParams::DistanceLossParams(double k, double b) : k_per_km(k), beta(b) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(fmt::format("K must be positive, got {}", k));
  if (!(b > 2.0) || !std::isfinite(b)) throw Error(fmt::format("beta must exceed 2, got {}", b));
}

double PathLoss::db() const { return 10.0 * std::log10(value); }

ShadowingModel ShadowingModel::none() { return {Variant::NoShadowing, 0.0}; }

ShadowingModel ShadowingModel::log_normal(double v_db) {
  if (!(v_db >= 0.0) || v_db > kMaxLogSdDb)
    throw Error(fmt::format("log-SD must lie in [0, {}] dB, got {}", kMaxLogSdDb, v_db));
  return {Variant::LogNormal, v_db};
}

double ShadowingModel::sigma() const { return variant_ == Variant::NoShadowing ? 0.0 : sigma_from_v(v_db_); }

PathLoss distance_loss(double r_km, const DistanceLossParams& params) {
  if (!(r_km >= 0.0)) throw Error(fmt::format("distance must be non-negative, got {}", r_km));
  const double r = std::max(r_km, kMinDistanceKm);
  return {std::pow(params.k_per_km * r, params.beta)};
}

double sigma_from_v(double v_db) { return v_db * std::numbers::ln10 / 10.0; }

double sample_shadowing(const ShadowingModel& model, Xoshiro256pp& rng) {
  if (model.is_trivial()) return 1.0;
  const double sigma = model.sigma();
  std::normal_distribution<double> normal;
  return std::exp(-0.5 * sigma * sigma + sigma * normal(rng));
}

double lognormal_moment(double v_db, double p) {
  const double sigma = sigma_from_v(v_db);
  return std::exp(sigma * sigma * p * (p - 1.0) / 2.0);
}

PathLoss path_loss(Point2D bs, Point2D user, double shadowing, const DistanceLossParams& params,
                   const TorusSpec& torus) {
  if (!(shadowing > 0.0)) throw Error(fmt::format("shadowing must be positive, got {}", shadowing));
  return {distance_loss(toroidal_distance(bs, user, torus), params).value / shadowing};
}

}  // namespace cellqos
