#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dsa/rng.hpp"

namespace dsa::mcmc {

struct Config {
  long n_draws = 20000;
  long burn_in = 10000;     // adaptation happens only here; -1 means n_draws / 2
  std::uint64_t seed = 1;
  bool adapt = true;
  double init_scale = 0.1;      // initial per-coordinate proposal sd
  double target_accept = 0.234;
  long stuck_window = 1000;     // zero accepts in a window during burn-in aborts

  long effective_burn_in() const { return burn_in < 0 ? n_draws / 2 : burn_in; }
  void validate(std::size_t dim) const;
};

// Raw chain in the sampled coordinate space.
struct CoreChain {
  std::vector<std::vector<double>> draws;  // n_draws states after the initial point
  std::vector<double> log_density;
  long burn_in = 0;
  long long accepted_post_burn_in = 0;
  long long proposals_post_burn_in = 0;
  double wall_seconds = 0;
  std::uint64_t seed = 0;

  double acceptance_rate() const;
  std::size_t retained() const { return draws.size() - static_cast<std::size_t>(burn_in); }
};

// Random-walk Metropolis with Gaussian proposals. During burn-in the proposal
// covariance adapts to the running sample covariance (diagonal for the first
// half of burn-in, full afterwards) and the global scale follows a
// Robbins-Monro drift toward target_accept. Both freeze at the end of burn-in.
// Throws InitError when log_target(init) is not finite and DiagnosticsError
// when an adaptation window sees no accepted proposal.
CoreChain adaptive_metropolis(const std::function<double(const std::vector<double>&)>& log_target,
                              const std::vector<double>& init, const Config& cfg);

// Initial-positive-sequence autocorrelation estimate of the effective sample
// size. A constant sequence returns 1 by convention.
double ess_autocorr(const std::vector<double>& x);

// Equal-tailed empirical quantile (linear interpolation between order
// statistics); q in [0, 1].
double quantile(std::vector<double> x, double q);

}  // namespace dsa::mcmc
