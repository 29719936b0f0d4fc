#include "dsa/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dsa {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LogLikelihood LogLikelihood::of(double v) {
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
    throw DomainError("log-likelihood must be finite or -infinity");
  return LogLikelihood{v};
}

bool LogLikelihood::is_finite() const { return std::isfinite(value); }

FinalSize solve_tau(double r0, double rho) {
  if (!(r0 > 0) || !std::isfinite(r0)) throw DomainError("r0 must be finite and > 0");
  if (!(rho > 0) || !(rho < 1)) throw DomainError("rho must lie in (0, 1)");
  // g(tau) = 1 - tau - exp(-r0 (rho + tau)); g(0) > 0 > g(1)
  auto g = [&](double tau) { return 1.0 - tau - std::exp(-r0 * (rho + tau)); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return FinalSize{0.5 * (lo + hi)};
}

double log_event_intensity(const Trajectory& traj, const ModelParams& params, double t) {
  if (traj.variant != params.variant) throw ConfigError("trajectory/parameter variant mismatch");
  double s = eval_survival(traj, t);
  switch (params.variant) {
    case Variant::StandardSIR: {
      double i = eval_infected(traj, t);
      if (!(s > 0) || !(i > 0) || !(params.beta > 0)) return kNegInf;
      return std::log(params.beta) + std::log(s) + std::log(i);
    }
    case Variant::GammaFrailty: {
      double i = eval_infected(traj, t);
      if (!(s > 0) || !(i > 0) || !(params.beta > 0)) return kNegInf;
      return std::log(params.beta) + (1.0 + params.nu * params.nu) * std::log(s) + std::log(i);
    }
    case Variant::PoissonNetwork: {
      if (!(s > 0) || !(params.beta > 0)) return kNegInf;
      double v = params.beta * s *
                 (1.0 + params.rho - s + (params.gamma / params.beta) * std::log(s));
      if (!(v > 0)) return kNegInf;
      return std::log(v);
    }
  }
  return kNegInf;
}

double density_infection(const Trajectory& traj, const ModelParams& params, double t,
                         double horizon) {
  double s_h = eval_survival(traj, horizon);
  double mass = 1.0 - s_h;
  if (!(mass > 0)) throw DomainError("no infection mass by the horizon");
  double li = log_event_intensity(traj, params, t);
  return std::exp(li) / mass;
}

double density_recovery(const Trajectory& traj, const ModelParams& params, double t) {
  bool plain = params.variant == Variant::StandardSIR ||
               (params.variant == Variant::GammaFrailty && params.nu == 0);
  if (!plain)
    throw DomainError("recovery density is defined for the standard dynamics");
  if (traj.variant != params.variant) throw ConfigError("trajectory/parameter variant mismatch");
  double tau = solve_tau(params.r0(), params.rho).tau;
  double i = eval_infected(traj, t);
  double v = params.gamma / tau * (i - params.rho * std::exp(-params.gamma * t));
  if (v < 0 && v > -1e-12) v = 0;  // round-off at t near 0
  return v;
}

namespace {

double recovery_terms(const ModelParams& params, const EventRecord& events) {
  double sum_w = 0;
  long long uncensored = 0;
  for (const auto& p : events.periods) {
    sum_w += p.duration;
    if (!p.censored) ++uncensored;
  }
  double sum_eps = 0;
  for (double e : events.initial_recoveries) sum_eps += e;
  long long l_init = static_cast<long long>(events.initial_recoveries.size());
  long long still_infected_init = events.m - l_init;
  double ll = static_cast<double>(uncensored + l_init) * std::log(params.gamma);
  ll -= params.gamma *
        (sum_w + sum_eps + static_cast<double>(still_infected_init) * events.horizon);
  return ll;
}

}  // namespace

LogLikelihood loglik_complete(const Trajectory& traj, const ModelParams& params,
                              const EventRecord& events) {
  if (params.variant == Variant::PoissonNetwork)
    throw ConfigError("complete-data likelihood covers the sir and frailty variants");
  if (traj.variant != params.variant) throw ConfigError("trajectory/parameter variant mismatch");
  events.validate();
  double s_h = eval_survival(traj, events.horizon);
  long long k = events.total_infected();
  double ll = static_cast<double>(events.n - k) * std::log(s_h);
  for (double t : events.infection_times) {
    double li = log_event_intensity(traj, params, t);
    if (li == kNegInf) return LogLikelihood::of(kNegInf);
    ll += li;
  }
  ll += recovery_terms(params, events);
  return LogLikelihood::of(ll);
}

LogLikelihood loglik_complete(const ModelParams& params, const EventRecord& events) {
  events.validate();
  GridSpec grid{events.horizon,
                static_cast<int>(std::ceil(events.horizon / default_likelihood_step(events.horizon)))};
  return loglik_complete(solve(params, grid), params, events);
}

LogLikelihood loglik_infection_times(const Trajectory& traj, const ModelParams& params,
                                     std::span<const double> times, double horizon,
                                     std::optional<long long> n_susceptible) {
  if (traj.variant != params.variant) throw ConfigError("trajectory/parameter variant mismatch");
  if (!(horizon > 0) || horizon > traj.t_end()) throw DomainError("horizon must lie in (0, t_end]");
  long long k = static_cast<long long>(times.size());
  if (n_susceptible && *n_susceptible < k)
    throw DomainError("more infection times than susceptibles");
  double ll = 0;
  for (double t : times) {
    if (!(t >= 0) || t > horizon) throw DomainError("infection time outside [0, horizon]");
    double li = log_event_intensity(traj, params, t);
    if (li == kNegInf) return LogLikelihood::of(kNegInf);
    ll += li;
  }
  double s_h = eval_survival(traj, horizon);
  if (n_susceptible) {
    ll += static_cast<double>(*n_susceptible - k) * std::log(s_h);
  } else {
    double mass = 1.0 - s_h;
    if (!(mass > 0)) return LogLikelihood::of(k > 0 ? kNegInf : 0.0);
    ll -= static_cast<double>(k) * std::log(mass);
  }
  return LogLikelihood::of(ll);
}

LogLikelihood loglik_infection_times(const ModelParams& params, std::span<const double> times,
                                     double horizon, std::optional<long long> n_susceptible) {
  GridSpec grid{horizon, static_cast<int>(std::ceil(horizon / default_likelihood_step(horizon)))};
  return loglik_infection_times(solve(params, grid), params, times, horizon, n_susceptible);
}

namespace {

// Indices of the schedule points in the trajectory grid; fails when the grid
// was not built over the schedule.
std::vector<std::size_t> schedule_indices(const Trajectory& traj, const CountData& data) {
  std::vector<std::size_t> idx(data.schedule.size());
  double tol = 1e-9 * std::max(1.0, data.horizon());
  for (std::size_t j = 0; j < data.schedule.size(); ++j) {
    double x = data.schedule[j];
    auto it = std::lower_bound(traj.times.begin(), traj.times.end(), x - tol);
    if (it == traj.times.end() || std::abs(*it - x) > tol)
      throw ConfigError("trajectory grid does not contain the observation schedule");
    idx[j] = static_cast<std::size_t>(it - traj.times.begin());
  }
  return idx;
}

}  // namespace

LogLikelihood loglik_counts(const Trajectory& traj, const ModelParams& params,
                            const CountData& data) {
  if (traj.variant != params.variant) throw ConfigError("trajectory/parameter variant mismatch");
  data.validate();
  if (!data.n)
    throw ConfigError("count likelihood conditions on the susceptible pool size; set n");
  auto idx = schedule_indices(traj, data);
  long long k = data.total();
  double ll = static_cast<double>(*data.n - k) * std::log(traj.s[idx.back()]);
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    long long y = data.counts[j];
    if (y == 0) continue;
    double sa = traj.s[idx[j]];
    double sb = traj.s[idx[j + 1]];
    if (!(sa > 0) || !(sb < sa)) return LogLikelihood::of(kNegInf);
    // log(sa - sb) without cancellation: la + log(1 - exp(lb - la))
    double la = std::log(sa);
    double lb = std::log(sb);
    double diff = la + std::log1p(-std::exp(lb - la));
    if (diff == kNegInf) return LogLikelihood::of(kNegInf);
    ll += static_cast<double>(y) * diff;
  }
  return LogLikelihood::of(ll);
}

LogLikelihood loglik_counts(const ModelParams& params, const CountData& data) {
  return loglik_counts(solve_for_counts(params, data), params, data);
}

LogLikelihood loglik_counts_censored(const Trajectory& traj, const ModelParams& params,
                                     const CountData& data) {
  if (traj.variant != params.variant) throw ConfigError("trajectory/parameter variant mismatch");
  data.validate();
  if (!data.n)
    throw ConfigError("count likelihood conditions on the susceptible pool size; set n");
  long long k = data.total();
  double ll = static_cast<double>(*data.n - k) * std::log(eval_survival(traj, data.horizon()));
  for (std::size_t j = 0; j < data.counts.size(); ++j) {
    long long y = data.counts[j];
    if (y == 0) continue;
    double p = eval_survival(traj, data.schedule[j]) - eval_survival(traj, data.schedule[j + 1]);
    if (!(p > 0)) return LogLikelihood::of(kNegInf);
    ll += static_cast<double>(y) * std::log(p);
  }
  return LogLikelihood::of(ll);
}

long long estimate_population(const CountData& data, const Trajectory& traj) {
  data.validate();
  double s_h = eval_survival(traj, data.horizon());
  double mass = 1.0 - s_h;
  if (!(mass > 0)) throw DomainError("no infection mass by the horizon");
  return llround(static_cast<double>(data.total()) / mass);
}

double default_likelihood_step(double horizon) {
  return std::min(horizon / 2000.0, 1.0 / 200.0);
}

Trajectory solve_for_counts(const ModelParams& params, const CountData& data) {
  data.validate();
  return solve_at(params, data.schedule, default_likelihood_step(data.horizon()));
}

}  // namespace dsa
