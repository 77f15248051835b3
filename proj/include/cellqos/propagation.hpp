#pragma once

#include "cellqos/geometry.hpp"
#include "cellqos/rng.hpp"

namespace cellqos {

/// Clamp applied to base-station/user distances before evaluating the
/// distance-loss, so that a coincident user never yields an infinite gain.
inline constexpr double kMinDistanceKm = 1e-6;

/// Largest supported log-SD of the shadowing. Linear power quantities stay
/// within double range up to here (sigma <= 9.21).
inline constexpr double kMaxLogSdDb = 40.0;

/// L(r) = (K r)^beta. Requires K > 0 and beta > 2.
struct DistanceLossParams {
  double k_per_km;
  double beta;

  DistanceLossParams(double k_per_km, double beta);
};

/// Linear attenuation ratio; received power = emitted power / value.
struct PathLoss {
  double value;

  double db() const;
  friend auto operator<=>(const PathLoss&, const PathLoss&) = default;
};

/// Mean-one shadowing S. NoShadowing is S == 1; LogNormal is
/// S = exp(-sigma^2/2 + sigma z) with sigma derived from the dB log-SD.
class ShadowingModel {
 public:
  enum class Variant { NoShadowing, LogNormal };

  static ShadowingModel none();
  /// Throws Error unless 0 <= v_db <= kMaxLogSdDb.
  static ShadowingModel log_normal(double v_db);

  Variant variant() const { return variant_; }
  double log_sd_db() const { return v_db_; }
  double sigma() const;
  /// True when draws are identically 1 (no shadowing, or log-normal with v = 0).
  bool is_trivial() const { return variant_ == Variant::NoShadowing || v_db_ == 0.0; }

 private:
  ShadowingModel(Variant variant, double v_db) : variant_(variant), v_db_(v_db) {}
  Variant variant_;
  double v_db_;
};

PathLoss distance_loss(double r_km, const DistanceLossParams& params);

/// sigma = v ln(10) / 10
double sigma_from_v(double v_db);

double sample_shadowing(const ShadowingModel& model, Xoshiro256pp& rng);

/// E[S^p] = exp(sigma^2 p (p - 1) / 2) for mean-one log-normal S.
double lognormal_moment(double v_db, double p);

/// L(|bs - user|) / s on the torus.
PathLoss path_loss(Point2D bs, Point2D user, double shadowing, const DistanceLossParams& params,
                   const TorusSpec& torus);

}  // namespace cellqos
