#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dsa/inference.hpp"
#include "dsa/simulate.hpp"

namespace dsa {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Interval counts as CSV. Layout:
//   # N=1000
//   # M=50
//   # T=10
//   interval_end,count
//   1,12
// The N/M/T metadata lines are optional on input; T defaults to the last
// interval end. Throws ParseError with a 1-based line number.
CountData parse_counts_csv(const std::filesystem::path& path);
void write_counts_csv(const std::filesystem::path& path, const CountData& data);

// Event records as JSON (n, m, horizon, infection_times, periods,
// initial_recoveries).
EventRecord parse_events_json(const std::filesystem::path& path);
void write_events_json(const std::filesystem::path& path, const EventRecord& events);

// Retained posterior draws, one row per draw:
//   chain,<sampled params...>,log_posterior
void write_draws_csv(const std::filesystem::path& path, const std::vector<Chain>& chains);

// Infection-time density on a uniform grid of n_points over [0, horizon]:
//   t,density
void write_density_csv(const std::filesystem::path& path, const Trajectory& traj,
                       const ModelParams& params, double horizon, int n_points = 500);

std::string summary_to_json(const PosteriorSummary& summary,
                            const std::vector<std::pair<std::string, std::string>>& extra = {});
std::string coverage_to_json(const CoverageReport& report);

std::string summary_table(const PosteriorSummary& summary);
std::string coverage_table(const CoverageReport& report);

}  // namespace dsa
