#include "cellqos/oracle.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "cellqos/error.hpp"
#include "cellqos/propagation.hpp"

namespace cellqos::oracle {

namespace {

void require_beta(double beta) {
  if (!(beta > 2.0)) throw Error(fmt::format("beta must exceed 2, got {}", beta));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw Error(fmt::format("{} must be positive, got {}", name, v));
}

}  // namespace

double gamma(double x) { return std::tgamma(x); }

double poisson_mean_f(double beta) {
  require_beta(beta);
  return 2.0 / (beta - 2.0);
}

double poisson_mean_l(double beta, double k_per_km, double lambda, double moment_2_over_beta) {
  require_beta(beta);
  require_positive(k_per_km, "K");
  require_positive(lambda, "lambda");
  require_positive(moment_2_over_beta, "E[S^(2/beta)]");
  return std::pow(k_per_km, beta) * gamma(1.0 + beta / 2.0) /
         std::pow(std::numbers::pi * lambda * moment_2_over_beta, beta / 2.0);
}

double poisson_mean_l_lognormal(double beta, double k_per_km, double lambda, double v_db) {
  require_beta(beta);
  require_positive(k_per_km, "K");
  require_positive(lambda, "lambda");
  const double sigma = sigma_from_v(v_db);
  return std::pow(k_per_km, beta) * gamma(1.0 + beta / 2.0) * std::exp((1.0 - 2.0 / beta) * sigma * sigma / 2.0) /
         std::pow(std::numbers::pi * lambda, beta / 2.0);
}

double hex_mean_f_approx(double beta) {
  require_beta(beta);
  return 0.9365 / (beta - 2.0);
}

double hex_mean_l_approx(double beta, double k_per_km, double lambda) {
  require_beta(beta);
  require_positive(k_per_km, "K");
  require_positive(lambda, "lambda");
  return std::pow(k_per_km, beta) / (std::pow(std::numbers::pi * lambda, beta / 2.0) * (1.0 + beta / 2.0));
}

double closest_bs_poisson_mean_f(double beta, double v_db) {
  require_beta(beta);
  const double sigma = sigma_from_v(v_db);
  return std::exp(sigma * sigma) * beta / (beta - 2.0) - 1.0;
}

double closest_bs_poisson_mean_f_serving_excluded(double beta, double v_db) {
  require_beta(beta);
  const double sigma = sigma_from_v(v_db);
  return std::exp(sigma * sigma) * 2.0 / (beta - 2.0);
}

double closest_bs_penalty_db(double v_db) {
  const double sigma = sigma_from_v(v_db);
  return 10.0 * std::log10(std::exp(sigma * sigma));
}

}  // namespace cellqos::oracle
