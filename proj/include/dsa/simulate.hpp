#pragma once

#include <optional>
#include <vector>

#include "dsa/model.hpp"
#include "dsa/rng.hpp"

namespace dsa {

// One completed or right-censored infectious period.
struct InfectiousPeriod {
  double duration = 0;     // time infected within [0, horizon]
  bool censored = false;   // true when still infected at the horizon
};

// Complete record of one finite-population outbreak observed on [0, horizon].
// infection_times is sorted ascending; periods[i] belongs to infection i.
// initial_recoveries holds recovery times of initially infected individuals
// that recovered before the horizon; the remaining m - initial_recoveries.size()
// were still infected at the horizon.
struct EventRecord {
  long long n = 0;  // initially susceptible
  long long m = 0;  // initially infected
  double horizon = 0;
  std::vector<double> infection_times;
  std::vector<InfectiousPeriod> periods;
  std::vector<double> initial_recoveries;

  long long total_infected() const { return static_cast<long long>(infection_times.size()); }
  void validate() const;  // throws DomainError
};

// Interval counts of new infections. schedule = {0 = X_0 < X_1 < ... < X_P};
// counts[j-1] individuals were infected in (X_{j-1}, X_j].
struct CountData {
  std::vector<double> schedule;
  std::vector<long long> counts;
  std::optional<long long> n;  // initially susceptible, when known
  std::optional<long long> m;  // initially infected, when known

  double horizon() const { return schedule.back(); }
  long long total() const;
  void validate() const;  // throws DomainError
};

// Exact finite-population outbreak via per-individual exposure thresholds.
// Standard dynamics: unit-exponential thresholds against cumulative pressure
// (beta / n) * integral of the infected count.
EventRecord sellke_simulate(const ModelParams& params, long long n, long long m, double horizon,
                            SeededRng& rng);

// Same construction with per-individual susceptibility drawn from
// Gamma(1/nu^2, 1/nu^2); nu = 0 consumes the identical draw sequence as the
// standard construction and reproduces it exactly.
EventRecord sellke_simulate_frailty(const ModelParams& params, long long n, long long m,
                                    double horizon, SeededRng& rng);

// One infection time on [0, horizon] distributed with density
// -s'(t) / (1 - s(horizon)) by inverting the survival interpolant.
double sample_infection_time(const Trajectory& traj, double horizon, SeededRng& rng);

// Large-population approximation: K ~ Binomial(n, 1 - s(horizon)) infections,
// each time drawn independently from the survival density; returned sorted.
std::vector<double> simulate_dsa_times(const Trajectory& traj, long long n, double horizon,
                                       SeededRng& rng);

// As above, aggregated over the observation schedule.
CountData simulate_dsa_counts(const ModelParams& params, long long n, long long m,
                              const std::vector<double>& schedule, SeededRng& rng);

// Bin infection times into schedule intervals (X_{j-1}, X_j].
// Throws DomainError if any time exceeds the schedule end.
CountData aggregate_counts(const EventRecord& events, const std::vector<double>& schedule);

}  // namespace dsa
