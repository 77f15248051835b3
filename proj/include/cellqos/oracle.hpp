#pragma once

// Closed-form and approximate mean values of the interference and path-loss
// factors. Pure arithmetic: no randomness, no I/O.
namespace cellqos::oracle {

/// Infinite Poisson network, any shadowing: E[f] = 2/(beta-2).
double poisson_mean_f(double beta);

/// Infinite Poisson network:
///   E[l] = K^beta Gamma(1+beta/2) / (pi lambda E[S^{2/beta}])^{beta/2}
double poisson_mean_l(double beta, double k_per_km, double lambda, double moment_2_over_beta);

/// Same, with log-normal shadowing of log-SD v written in closed form:
///   K^beta Gamma(1+beta/2) exp[(1-2/beta) sigma^2/2] / (pi lambda)^{beta/2}
double poisson_mean_l_lognormal(double beta, double k_per_km, double lambda, double v_db);

/// Hexagonal network without shadowing, E[f] ~ 0.9365/(beta-2).
double hex_mean_f_approx(double beta);

/// Hexagonal network without shadowing, E[l] ~ K^beta / ((pi lambda)^{beta/2} (1+beta/2)).
double hex_mean_l_approx(double beta, double k_per_km, double lambda);

/// Poisson network served by the geographically closest station with
/// log-normal shadowing, in the literal form
///   E[1/S] * E[sum_X L(|X0|)/L(|X|)] - 1 = e^{sigma^2} beta/(beta-2) - 1,
/// which lets the serving term carry the factor E[1/S] as well.
double closest_bs_poisson_mean_f(double beta, double v_db);

/// Same network, with the serving term contributing exactly 1:
///   E[sum_{X != X0} S_X/S_0 L(|X0|)/L(|X|)] = e^{sigma^2} 2/(beta-2).
double closest_bs_poisson_mean_f_serving_excluded(double beta, double v_db);

/// Increase in dB of the mean interference factor when the handover
/// ignores log-normal shadowing: 10 log10(e^{sigma^2}) = v^2 ln(10)/10.
double closest_bs_penalty_db(double v_db);

double gamma(double x);

}  // namespace cellqos::oracle
