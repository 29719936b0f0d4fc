#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dsa/likelihood.hpp"
#include "dsa/mcmc.hpp"
#include "dsa/model.hpp"
#include "dsa/simulate.hpp"

namespace dsa {

enum class ParamId { Beta, Gamma, Rho, Nu };
const char* param_name(ParamId id);

// Prior density for one scalar parameter, restricted to (lo, hi).
struct ParamPrior {
  enum class Kind { GammaDist, UniformDist };
  Kind kind = Kind::GammaDist;
  double a = 0.1;  // shape | lower endpoint
  double b = 0.1;  // rate  | upper endpoint
  double lo = 0;   // support bound (open)
  double hi = std::numeric_limits<double>::infinity();

  static ParamPrior gamma_dist(double shape, double rate, double lo = 0,
                               double hi = std::numeric_limits<double>::infinity());
  static ParamPrior uniform_dist(double lo, double hi);
  // log density, -infinity outside (lo, hi); the truncation is not renormalized.
  double log_pdf(double x) const;
};

struct PriorSpec {
  ParamPrior beta = ParamPrior::gamma_dist(0.1, 0.1);
  ParamPrior gamma = ParamPrior::gamma_dist(0.1, 0.1);
  ParamPrior rho = ParamPrior::gamma_dist(0.1, 0.1, 0, 1);
  ParamPrior nu = ParamPrior::gamma_dist(1, 1);
  bool require_rate_order = false;  // enforce gamma < beta (network fits)

  static PriorSpec defaults(Variant v);
};

double log_prior(const PriorSpec& spec, const ModelParams& p);

enum class LikelihoodKind { Counts, InfectionTimes, InfectionTimesGivenN, Complete };
const char* likelihood_name(LikelihoodKind k);
LikelihoodKind likelihood_from_name(const std::string& name);

// Exactly one of counts/events is set.
struct Dataset {
  std::optional<CountData> counts;
  std::optional<EventRecord> events;

  static Dataset from(CountData d);
  static Dataset from(EventRecord e);
  double horizon() const;
};

// Unnormalized log posterior in natural parameter space. Throws ConfigError
// on a selector/data mismatch at construction time; at evaluation time,
// parameters where the integrator blows up get log density -infinity.
std::function<double(const ModelParams&)> make_log_posterior(const PriorSpec& priors,
                                                             const Dataset& data,
                                                             LikelihoodKind kind);

// Values pinned during sampling (e.g. a known removal rate).
struct FixedParams {
  std::optional<double> beta, gamma, rho, nu;
};

// Mapping between ModelParams and the unconstrained sampling vector:
// log for rates and nu, scaled logit for rho on (lo, hi).
struct SamplingLayout {
  Variant variant = Variant::StandardSIR;
  std::vector<ParamId> sampled;
  FixedParams fixed;
  double rho_lo = 0, rho_hi = 1;

  static SamplingLayout make(Variant v, const FixedParams& fixed, const PriorSpec& priors);
  std::size_t dim() const { return sampled.size(); }
  std::vector<double> to_unconstrained(const ModelParams& p) const;
  ModelParams to_params(const std::vector<double>& z) const;
  double log_jacobian(const std::vector<double>& z) const;
};

struct Chain {
  std::vector<ModelParams> draws;  // includes burn-in
  std::vector<std::vector<double>> draws_unconstrained;  // sampling-scale states
  std::vector<double> log_post;
  long burn_in = 0;
  std::uint64_t seed = 0;
  long long accepted_post_burn_in = 0;
  long long proposals_post_burn_in = 0;
  double wall_seconds = 0;
  SamplingLayout layout;

  double acceptance_rate() const;
  std::size_t retained() const { return draws.size() - static_cast<std::size_t>(burn_in); }
  // retained draws of one coordinate
  std::vector<double> component(ParamId id) const;
};

Chain run_chain(const std::function<double(const ModelParams&)>& log_posterior,
                const ModelParams& init, const SamplingLayout& layout, const mcmc::Config& cfg);

struct ParamSummary {
  ParamId id;
  double mean = 0, sd = 0, ci_lo = 0, ci_hi = 0, ess = 0, ess_per_sec = 0;
};

struct PosteriorSummary {
  std::vector<ParamSummary> params;
  double ci_level = 0.95;
  std::size_t n_retained = 0;
  double wall_seconds = 0;
  double mean_log_post = 0;
};

PosteriorSummary summarize(const Chain& chain, double ci_level = 0.95);
// Pooled over several chains of identical layout; ESS adds across chains.
PosteriorSummary summarize(const std::vector<Chain>& chains, double ci_level = 0.95);

// Mean parameters of the retained draws.
ModelParams posterior_mean_params(const Chain& chain);
ModelParams posterior_mean_params(const std::vector<Chain>& chains);

enum class Generator { Sellke, Dsa };
const char* generator_name(Generator g);
Generator generator_from_name(const std::string& name);

// One synthetic-data study: `replicates` independent datasets from the truth,
// one chain each, credible-interval coverage aggregated per parameter.
struct Scenario {
  ModelParams truth;
  long long n_susceptible = 1000;
  long long n_initial_infected = 50;
  double horizon = 10;
  std::vector<double> schedule;  // empty: unit-spaced 0..horizon
  int replicates = 50;
  Generator generator = Generator::Dsa;
  LikelihoodKind likelihood = LikelihoodKind::Counts;
  PriorSpec priors;
  FixedParams fixed;
  mcmc::Config mcmc;
  double ci_level = 0.95;

  void validate() const;
};

struct CoverageEntry {
  ParamId id;
  double truth = 0;
  double coverage = 0;        // fraction of replicates whose CI contains truth
  double mean_post_mean = 0;
  double mean_post_sd = 0;
  double mean_ess_per_sec = 0;
};

struct CoverageReport {
  std::vector<CoverageEntry> params;
  int replicates = 0;
  int completed = 0;  // replicates that produced a chain
  std::uint64_t seed = 0;
  double wall_seconds = 0;
};

CoverageReport replicate_study(const Scenario& scenario, std::uint64_t seed);

}  // namespace dsa
