#include "dsa/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace dsa {

void EventRecord::validate() const {
  if (n < 0 || m < 1) throw DomainError("need n >= 0 and m >= 1");
  if (!(horizon > 0)) throw DomainError("horizon must be > 0");
  if (infection_times.size() != periods.size())
    throw DomainError("each infection needs exactly one infectious period");
  if (total_infected() > n) throw DomainError("more infections than susceptibles");
  double prev = 0;
  for (std::size_t i = 0; i < infection_times.size(); ++i) {
    double t = infection_times[i];
    if (!(t >= prev) || !(t <= horizon)) throw DomainError("infection times must be sorted in [0, horizon]");
    prev = t;
    const auto& p = periods[i];
    if (!(p.duration >= 0)) throw DomainError("negative infectious period");
    if (t + p.duration > horizon * (1 + 1e-12) && !p.censored)
      throw DomainError("uncensored period extends past the horizon");
  }
  if (static_cast<long long>(initial_recoveries.size()) > m)
    throw DomainError("more initial recoveries than initially infected");
  for (double t : initial_recoveries)
    if (!(t >= 0) || !(t <= horizon)) throw DomainError("initial recovery outside [0, horizon]");
}

long long CountData::total() const {
  long long k = 0;
  for (long long c : counts) k += c;
  return k;
}

void CountData::validate() const {
  if (schedule.size() < 2) throw DomainError("schedule needs at least two points");
  if (schedule.front() != 0) throw DomainError("schedule must start at 0");
  for (std::size_t j = 1; j < schedule.size(); ++j)
    if (!(schedule[j] > schedule[j - 1])) throw DomainError("schedule must be strictly increasing");
  if (counts.size() + 1 != schedule.size())
    throw DomainError("need one count per schedule interval");
  for (long long c : counts)
    if (c < 0) throw DomainError("counts must be nonnegative");
  if (n && *n < 0) throw DomainError("n must be nonnegative");
  if (m && *m < 1) throw DomainError("m must be >= 1");
  if (n && total() > *n) throw DomainError("counts exceed the susceptible pool");
}

namespace {

EventRecord sellke_impl(const ModelParams& params, long long n, long long m, double horizon,
                        SeededRng& rng, bool frailty) {
  params.validate();
  if (n < 1 || m < 1) throw DomainError("need n >= 1 and m >= 1");
  if (!(horizon > 0) || !std::isfinite(horizon)) throw DomainError("horizon must be finite and > 0");

  // Exposure thresholds, then initial infectious periods, then periods drawn
  // at each infection event: the draw order is part of the output contract.
  std::vector<double> q(static_cast<std::size_t>(n));
  double nu2 = params.nu * params.nu;
  for (auto& qi : q) {
    double x = 1.0;
    if (frailty && nu2 > 0) x = rng.gamma(1.0 / nu2, 1.0 / nu2);
    qi = rng.exponential(1.0) / x;
  }
  std::sort(q.begin(), q.end());

  std::priority_queue<double, std::vector<double>, std::greater<double>> recoveries;
  std::vector<double> initial_durations(static_cast<std::size_t>(m));
  for (auto& d : initial_durations) {
    d = rng.exponential(params.gamma);
    recoveries.push(d);
  }

  double t = 0;
  double pressure = 0;  // cumulative (beta / n) * integral of infected count
  long long infected = m;
  std::size_t next_q = 0;
  std::vector<double> inf_times;
  std::vector<double> inf_recovery_abs;

  while (infected > 0) {
    double t_rec = recoveries.top();
    double t_inf = std::numeric_limits<double>::infinity();
    if (params.beta > 0 && next_q < q.size())
      t_inf = t + (q[next_q] - pressure) * static_cast<double>(n) /
                      (params.beta * static_cast<double>(infected));
    double t_next = std::min(t_inf, t_rec);
    if (t_next > horizon) break;
    pressure += params.beta / static_cast<double>(n) * static_cast<double>(infected) * (t_next - t);
    t = t_next;
    if (t_inf <= t_rec) {
      inf_times.push_back(t);
      double w = rng.exponential(params.gamma);
      recoveries.push(t + w);
      inf_recovery_abs.push_back(t + w);
      ++infected;
      ++next_q;
    } else {
      recoveries.pop();
      --infected;
    }
  }

  EventRecord rec;
  rec.n = n;
  rec.m = m;
  rec.horizon = horizon;
  rec.infection_times = std::move(inf_times);
  rec.periods.reserve(rec.infection_times.size());
  for (std::size_t i = 0; i < rec.infection_times.size(); ++i) {
    double end = inf_recovery_abs[i];
    if (end <= horizon)
      rec.periods.push_back({end - rec.infection_times[i], false});
    else
      rec.periods.push_back({horizon - rec.infection_times[i], true});
  }
  for (double d : initial_durations)
    if (d <= horizon) rec.initial_recoveries.push_back(d);
  std::sort(rec.initial_recoveries.begin(), rec.initial_recoveries.end());
  return rec;
}

}  // namespace

EventRecord sellke_simulate(const ModelParams& params, long long n, long long m, double horizon,
                            SeededRng& rng) {
  if (params.variant == Variant::PoissonNetwork)
    throw ConfigError("threshold simulation covers the sir and frailty variants");
  return sellke_impl(params, n, m, horizon, rng, false);
}

EventRecord sellke_simulate_frailty(const ModelParams& params, long long n, long long m,
                                    double horizon, SeededRng& rng) {
  if (params.variant != Variant::GammaFrailty)
    throw ConfigError("frailty simulation needs the frailty variant");
  return sellke_impl(params, n, m, horizon, rng, true);
}

double sample_infection_time(const Trajectory& traj, double horizon, SeededRng& rng) {
  if (!(horizon > 0) || horizon > traj.t_end())
    throw DomainError("horizon must lie in (0, t_end]");
  double s_h = eval_survival(traj, horizon);
  double u = rng.uniform();
  double target = 1.0 - u * (1.0 - s_h);
  if (!(target < 1.0)) return invert_survival(traj, traj.s.front());
  return invert_survival(traj, target);
}

std::vector<double> simulate_dsa_times(const Trajectory& traj, long long n, double horizon,
                                       SeededRng& rng) {
  if (n < 0) throw DomainError("n must be nonnegative");
  double s_h = eval_survival(traj, horizon);
  long long k = rng.binomial(n, 1.0 - s_h);
  std::vector<double> times(static_cast<std::size_t>(k));
  for (auto& t : times) t = sample_infection_time(traj, horizon, rng);
  std::sort(times.begin(), times.end());
  return times;
}

CountData simulate_dsa_counts(const ModelParams& params, long long n, long long m,
                              const std::vector<double>& schedule, SeededRng& rng) {
  if (schedule.size() < 2 || schedule.front() != 0)
    throw DomainError("schedule must start at 0 and contain an interval");
  double horizon = schedule.back();
  Trajectory traj = solve_at(params, schedule, GridSpec::dense(horizon).step());
  std::vector<double> times = simulate_dsa_times(traj, n, horizon, rng);
  CountData data;
  data.schedule = schedule;
  data.counts.assign(schedule.size() - 1, 0);
  for (double t : times) {
    auto it = std::lower_bound(schedule.begin() + 1, schedule.end(), t);
    data.counts[static_cast<std::size_t>(it - schedule.begin()) - 1] += 1;
  }
  data.n = n;
  data.m = m;
  data.validate();
  return data;
}

CountData aggregate_counts(const EventRecord& events, const std::vector<double>& schedule) {
  events.validate();
  if (schedule.size() < 2 || schedule.front() != 0)
    throw DomainError("schedule must start at 0 and contain an interval");
  for (std::size_t j = 1; j < schedule.size(); ++j)
    if (!(schedule[j] > schedule[j - 1])) throw DomainError("schedule must be strictly increasing");
  CountData data;
  data.schedule = schedule;
  data.counts.assign(schedule.size() - 1, 0);
  for (double t : events.infection_times) {
    if (t > schedule.back()) throw DomainError("infection time past the schedule end");
    auto it = std::lower_bound(schedule.begin() + 1, schedule.end(), t);
    data.counts[static_cast<std::size_t>(it - schedule.begin()) - 1] += 1;
  }
  data.n = events.n;
  data.m = events.m;
  data.validate();
  return data;
}

}  // namespace dsa
