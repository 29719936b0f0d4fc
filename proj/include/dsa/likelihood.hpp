#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dsa/model.hpp"
#include "dsa/simulate.hpp"

namespace dsa {

// Log-likelihood value. -infinity means zero probability; NaN and +infinity
// are rejected at construction because they always indicate a bug upstream.
struct LogLikelihood {
  double value = 0;
  static LogLikelihood of(double v);
  bool is_finite() const;
};

// Asymptotic fraction of the susceptible pool ever infected, i.e. the root
// tau of 1 - tau = exp(-r0 (rho + tau)) in (0, 1).
struct FinalSize {
  double tau = 0;
};

FinalSize solve_tau(double r0, double rho);

// log of the instantaneous infection intensity -ds/dt at time t, evaluated
// from the model drift on the interpolated state. -infinity when the
// intensity vanishes (or goes negative past the network equilibrium).
double log_event_intensity(const Trajectory& traj, const ModelParams& params, double t);

// Density of the infection time conditioned on infection by `horizon`:
// -s'(t) / (1 - s(horizon)).
double density_infection(const Trajectory& traj, const ModelParams& params, double t,
                         double horizon);

// Density of the recovery time of an ever-infected individual over an
// unbounded horizon: (gamma / tau) * (iota(t) - rho exp(-gamma t)).
// Defined for StandardSIR (and GammaFrailty with nu = 0).
double density_recovery(const Trajectory& traj, const ModelParams& params, double t);

// Complete-data log-likelihood of an observed outbreak: infection times plus
// per-individual infectious periods with right censoring at the horizon.
// Defined for the sir and frailty variants.
LogLikelihood loglik_complete(const Trajectory& traj, const ModelParams& params,
                              const EventRecord& events);
LogLikelihood loglik_complete(const ModelParams& params, const EventRecord& events);

// Log-likelihood of exact infection times only. With n_susceptible present the
// never-infected contribute (n - k) log s(horizon); otherwise the density is
// conditioned on infection by the horizon (the -k log(1 - s(horizon)) form).
LogLikelihood loglik_infection_times(const Trajectory& traj, const ModelParams& params,
                                     std::span<const double> times, double horizon,
                                     std::optional<long long> n_susceptible);
LogLikelihood loglik_infection_times(const ModelParams& params, std::span<const double> times,
                                     double horizon, std::optional<long long> n_susceptible);

// Marginal log-likelihood of interval counts:
// (n - k) log s(X_P) + sum_j Y_j log(s(X_{j-1}) - s(X_j)),
// with the log differences computed in log space. Requires data.n.
// The trajectory grid must contain every schedule point.
LogLikelihood loglik_counts(const Trajectory& traj, const ModelParams& params,
                            const CountData& data);
LogLikelihood loglik_counts(const ModelParams& params, const CountData& data);

// Same quantity computed through the censoring route: direct interval
// probabilities s(X_{j-1}) - s(X_j) via the survival interpolant.
LogLikelihood loglik_counts_censored(const Trajectory& traj, const ModelParams& params,
                                     const CountData& data);

// Plug-in population estimate round(k / (1 - s(horizon))).
long long estimate_population(const CountData& data, const Trajectory& traj);

// Step length used by the convenience overloads that solve internally.
double default_likelihood_step(double horizon);

// Grid-aligned solve covering the observation schedule of `data`.
Trajectory solve_for_counts(const ModelParams& params, const CountData& data);

}  // namespace dsa
