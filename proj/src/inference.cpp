#include "dsa/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace dsa {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* param_name(ParamId id) {
  switch (id) {
    case ParamId::Beta: return "beta";
    case ParamId::Gamma: return "gamma";
    case ParamId::Rho: return "rho";
    case ParamId::Nu: return "nu";
  }
  return "?";
}

ParamPrior ParamPrior::gamma_dist(double shape, double rate, double lo, double hi) {
  if (!(shape > 0) || !(rate > 0)) throw DomainError("gamma prior needs shape > 0 and rate > 0");
  if (!(lo < hi)) throw DomainError("prior support must be a nonempty interval");
  return ParamPrior{Kind::GammaDist, shape, rate, lo, hi};
}

ParamPrior ParamPrior::uniform_dist(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("uniform prior needs finite lo < hi");
  return ParamPrior{Kind::UniformDist, lo, hi, lo, hi};
}

double ParamPrior::log_pdf(double x) const {
  if (!(x > lo) || !(x < hi)) return kNegInf;
  switch (kind) {
    case Kind::GammaDist:
      return (a - 1.0) * std::log(x) - b * x + a * std::log(b) - std::lgamma(a);
    case Kind::UniformDist:
      return -std::log(b - a);
  }
  return kNegInf;
}

PriorSpec PriorSpec::defaults(Variant v) {
  PriorSpec s;
  if (v == Variant::PoissonNetwork) s.require_rate_order = false;
  return s;
}

double log_prior(const PriorSpec& spec, const ModelParams& p) {
  double lp = spec.beta.log_pdf(p.beta) + spec.gamma.log_pdf(p.gamma) + spec.rho.log_pdf(p.rho);
  if (p.variant == Variant::GammaFrailty) lp += spec.nu.log_pdf(p.nu);
  if (spec.require_rate_order && !(p.gamma < p.beta)) return kNegInf;
  return lp;
}

const char* likelihood_name(LikelihoodKind k) {
  switch (k) {
    case LikelihoodKind::Counts: return "counts";
    case LikelihoodKind::InfectionTimes: return "times";
    case LikelihoodKind::InfectionTimesGivenN: return "times-n";
    case LikelihoodKind::Complete: return "complete";
  }
  return "?";
}

LikelihoodKind likelihood_from_name(const std::string& name) {
  if (name == "counts") return LikelihoodKind::Counts;
  if (name == "times") return LikelihoodKind::InfectionTimes;
  if (name == "times-n") return LikelihoodKind::InfectionTimesGivenN;
  if (name == "complete") return LikelihoodKind::Complete;
  throw DomainError("unknown likelihood: " + name);
}

Dataset Dataset::from(CountData d) {
  d.validate();
  Dataset ds;
  ds.counts = std::move(d);
  return ds;
}

Dataset Dataset::from(EventRecord e) {
  e.validate();
  Dataset ds;
  ds.events = std::move(e);
  return ds;
}

double Dataset::horizon() const {
  if (counts) return counts->horizon();
  if (events) return events->horizon;
  throw ConfigError("empty dataset");
}

std::function<double(const ModelParams&)> make_log_posterior(const PriorSpec& priors,
                                                             const Dataset& data,
                                                             LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::Counts:
      if (!data.counts) throw ConfigError("count likelihood needs interval count data");
      if (!data.counts->n)
        throw ConfigError("count likelihood conditions on the susceptible pool size; set n");
      break;
    case LikelihoodKind::InfectionTimes:
      if (!data.events) throw ConfigError("time likelihood needs an event record");
      break;
    case LikelihoodKind::InfectionTimesGivenN:
    case LikelihoodKind::Complete:
      if (!data.events) throw ConfigError("this likelihood needs an event record");
      break;
  }
  // copy the data into the closure; evaluation is self-contained
  Dataset ds = data;
  PriorSpec pr = priors;
  return [ds = std::move(ds), pr, kind](const ModelParams& p) -> double {
    double lp = log_prior(pr, p);
    if (lp == kNegInf) return kNegInf;
    try {
      LogLikelihood ll{0};
      switch (kind) {
        case LikelihoodKind::Counts:
          ll = loglik_counts(p, *ds.counts);
          break;
        case LikelihoodKind::InfectionTimes:
          ll = loglik_infection_times(p, ds.events->infection_times, ds.events->horizon,
                                      std::nullopt);
          break;
        case LikelihoodKind::InfectionTimesGivenN:
          ll = loglik_infection_times(p, ds.events->infection_times, ds.events->horizon,
                                      ds.events->n);
          break;
        case LikelihoodKind::Complete:
          ll = loglik_complete(p, *ds.events);
          break;
      }
      return lp + ll.value;
    } catch (const IntegrationError&) {
      return kNegInf;  // blown-up dynamics carry no posterior mass
    } catch (const DomainError&) {
      return kNegInf;
    }
  };
}

SamplingLayout SamplingLayout::make(Variant v, const FixedParams& fixed, const PriorSpec& priors) {
  SamplingLayout lay;
  lay.variant = v;
  lay.fixed = fixed;
  lay.rho_lo = std::max(0.0, priors.rho.lo);
  lay.rho_hi = std::min(1.0, priors.rho.hi);
  if (!(lay.rho_lo < lay.rho_hi)) throw ConfigError("empty rho support");
  if (!fixed.beta) lay.sampled.push_back(ParamId::Beta);
  if (!fixed.gamma) lay.sampled.push_back(ParamId::Gamma);
  if (!fixed.rho) lay.sampled.push_back(ParamId::Rho);
  if (v == Variant::GammaFrailty && !fixed.nu) lay.sampled.push_back(ParamId::Nu);
  if (lay.sampled.empty()) throw ConfigError("all parameters fixed; nothing to sample");
  return lay;
}

namespace {

double logit_scaled(double x, double lo, double hi) {
  double u = (x - lo) / (hi - lo);
  return std::log(u) - std::log1p(-u);
}

double inv_logit_scaled(double z, double lo, double hi) {
  double u = 1.0 / (1.0 + std::exp(-z));
  return lo + (hi - lo) * u;
}

}  // namespace

std::vector<double> SamplingLayout::to_unconstrained(const ModelParams& p) const {
  std::vector<double> z;
  z.reserve(sampled.size());
  for (ParamId id : sampled) {
    switch (id) {
      case ParamId::Beta: z.push_back(std::log(p.beta)); break;
      case ParamId::Gamma: z.push_back(std::log(p.gamma)); break;
      case ParamId::Rho: z.push_back(logit_scaled(p.rho, rho_lo, rho_hi)); break;
      case ParamId::Nu: z.push_back(std::log(p.nu)); break;
    }
  }
  return z;
}

ModelParams SamplingLayout::to_params(const std::vector<double>& z) const {
  if (z.size() != sampled.size()) throw DomainError("layout/vector size mismatch");
  ModelParams p;
  p.variant = variant;
  p.beta = fixed.beta.value_or(0);
  p.gamma = fixed.gamma.value_or(0);
  p.rho = fixed.rho.value_or(0);
  p.nu = variant == Variant::GammaFrailty ? fixed.nu.value_or(0) : 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    switch (sampled[i]) {
      case ParamId::Beta: p.beta = std::exp(z[i]); break;
      case ParamId::Gamma: p.gamma = std::exp(z[i]); break;
      case ParamId::Rho: p.rho = inv_logit_scaled(z[i], rho_lo, rho_hi); break;
      case ParamId::Nu: p.nu = std::exp(z[i]); break;
    }
  }
  return p;
}

double SamplingLayout::log_jacobian(const std::vector<double>& z) const {
  if (z.size() != sampled.size()) throw DomainError("layout/vector size mismatch");
  double lj = 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    if (sampled[i] == ParamId::Rho) {
      // d rho / d z = (hi - lo) sig(z) (1 - sig(z))
      double zi = z[i];
      lj += std::log(rho_hi - rho_lo) - std::log1p(std::exp(-zi)) - std::log1p(std::exp(zi));
    } else {
      lj += z[i];  // d exp(z) / d z
    }
  }
  return lj;
}

double Chain::acceptance_rate() const {
  if (proposals_post_burn_in == 0) return 0;
  return static_cast<double>(accepted_post_burn_in) /
         static_cast<double>(proposals_post_burn_in);
}

std::vector<double> Chain::component(ParamId id) const {
  std::vector<double> out;
  out.reserve(retained());
  for (std::size_t i = static_cast<std::size_t>(burn_in); i < draws.size(); ++i) {
    const ModelParams& p = draws[i];
    switch (id) {
      case ParamId::Beta: out.push_back(p.beta); break;
      case ParamId::Gamma: out.push_back(p.gamma); break;
      case ParamId::Rho: out.push_back(p.rho); break;
      case ParamId::Nu: out.push_back(p.nu); break;
    }
  }
  return out;
}

Chain run_chain(const std::function<double(const ModelParams&)>& log_posterior,
                const ModelParams& init, const SamplingLayout& layout, const mcmc::Config& cfg) {
  init.validate();
  auto target = [&](const std::vector<double>& z) {
    ModelParams p = layout.to_params(z);
    return log_posterior(p) + layout.log_jacobian(z);
  };
  mcmc::CoreChain core = adaptive_metropolis(target, layout.to_unconstrained(init), cfg);
  Chain chain;
  chain.layout = layout;
  chain.burn_in = core.burn_in;
  chain.seed = core.seed;
  chain.accepted_post_burn_in = core.accepted_post_burn_in;
  chain.proposals_post_burn_in = core.proposals_post_burn_in;
  chain.wall_seconds = core.wall_seconds;
  chain.draws.reserve(core.draws.size());
  for (const auto& z : core.draws) chain.draws.push_back(layout.to_params(z));
  chain.draws_unconstrained = std::move(core.draws);
  chain.log_post = std::move(core.log_density);
  return chain;
}

namespace {

ParamSummary summarize_component(ParamId id, const std::vector<std::vector<double>>& per_chain,
                                 double ci_level, double total_wall) {
  ParamSummary s;
  s.id = id;
  std::vector<double> pooled;
  double ess = 0;
  for (const auto& x : per_chain) {
    pooled.insert(pooled.end(), x.begin(), x.end());
    ess += mcmc::ess_autocorr(x);
  }
  double n = static_cast<double>(pooled.size());
  double mean = 0;
  for (double v : pooled) mean += v;
  mean /= n;
  double var = 0;
  for (double v : pooled) var += (v - mean) * (v - mean);
  var = pooled.size() > 1 ? var / (n - 1.0) : 0.0;
  s.mean = mean;
  s.sd = std::sqrt(var);
  double alpha = 1.0 - ci_level;
  s.ci_lo = mcmc::quantile(pooled, alpha / 2);
  s.ci_hi = mcmc::quantile(pooled, 1.0 - alpha / 2);
  s.ess = ess;
  s.ess_per_sec = total_wall > 0 ? ess / total_wall : 0;
  return s;
}

}  // namespace

PosteriorSummary summarize(const std::vector<Chain>& chains, double ci_level) {
  if (chains.empty()) throw DomainError("no chains to summarize");
  if (!(ci_level > 0) || !(ci_level < 1)) throw DomainError("ci_level must lie in (0, 1)");
  const auto& sampled = chains.front().layout.sampled;
  for (const auto& c : chains)
    if (c.layout.sampled != sampled) throw ConfigError("chains have different layouts");
  PosteriorSummary sum;
  sum.ci_level = ci_level;
  double wall = 0;
  for (const auto& c : chains) {
    sum.n_retained += c.retained();
    wall += c.wall_seconds;
  }
  sum.wall_seconds = wall;
  for (ParamId id : sampled) {
    std::vector<std::vector<double>> per_chain;
    per_chain.reserve(chains.size());
    for (const auto& c : chains) per_chain.push_back(c.component(id));
    sum.params.push_back(summarize_component(id, per_chain, ci_level, wall));
  }
  double mlp = 0;
  std::size_t cnt = 0;
  for (const auto& c : chains)
    for (std::size_t i = static_cast<std::size_t>(c.burn_in); i < c.log_post.size(); ++i) {
      mlp += c.log_post[i];
      ++cnt;
    }
  sum.mean_log_post = cnt ? mlp / static_cast<double>(cnt) : 0;
  return sum;
}

PosteriorSummary summarize(const Chain& chain, double ci_level) {
  return summarize(std::vector<Chain>{chain}, ci_level);
}

ModelParams posterior_mean_params(const std::vector<Chain>& chains) {
  if (chains.empty()) throw DomainError("no chains");
  const Chain& first = chains.front();
  ModelParams p = first.layout.to_params(
      std::vector<double>(first.layout.dim(), 0.0));  // fixed values + placeholders
  auto mean_of = [&](ParamId id) {
    double m = 0;
    std::size_t n = 0;
    for (const auto& c : chains) {
      auto x = c.component(id);
      for (double v : x) m += v;
      n += x.size();
    }
    return m / static_cast<double>(n);
  };
  for (ParamId id : first.layout.sampled) {
    switch (id) {
      case ParamId::Beta: p.beta = mean_of(id); break;
      case ParamId::Gamma: p.gamma = mean_of(id); break;
      case ParamId::Rho: p.rho = mean_of(id); break;
      case ParamId::Nu: p.nu = mean_of(id); break;
    }
  }
  return p;
}

ModelParams posterior_mean_params(const Chain& chain) {
  return posterior_mean_params(std::vector<Chain>{chain});
}

const char* generator_name(Generator g) {
  return g == Generator::Sellke ? "sellke" : "dsa";
}

Generator generator_from_name(const std::string& name) {
  if (name == "sellke") return Generator::Sellke;
  if (name == "dsa") return Generator::Dsa;
  throw DomainError("unknown generator: " + name);
}

void Scenario::validate() const {
  truth.validate();
  if (n_susceptible < 1 || n_initial_infected < 1)
    throw DomainError("need n_susceptible >= 1 and n_initial_infected >= 1");
  if (!(horizon > 0)) throw DomainError("horizon must be > 0");
  if (replicates < 1) throw DomainError("need at least one replicate");
  if (!(ci_level > 0) || !(ci_level < 1)) throw DomainError("ci_level must lie in (0, 1)");
  if (generator == Generator::Sellke && truth.variant == Variant::PoissonNetwork)
    throw ConfigError("threshold simulation covers the sir and frailty variants");
  if (generator == Generator::Dsa && likelihood != LikelihoodKind::Counts)
    throw ConfigError("the dsa generator yields interval counts; use the counts likelihood");
}

namespace {

std::vector<double> unit_schedule(double horizon) {
  std::vector<double> sched;
  int p = static_cast<int>(std::ceil(horizon - 1e-9));
  for (int j = 0; j <= p; ++j) sched.push_back(std::min(static_cast<double>(j), horizon));
  if (sched.back() < horizon) sched.push_back(horizon);
  return sched;
}

struct ReplicateResult {
  bool ok = false;
  PosteriorSummary summary;
};

ReplicateResult one_replicate(const Scenario& sc, const std::vector<double>& schedule,
                              std::uint64_t study_seed, int rep) {
  SeededRng root(study_seed);
  SeededRng data_rng = root.derive(2 * static_cast<std::uint64_t>(rep));
  std::uint64_t chain_seed = root.derive(2 * static_cast<std::uint64_t>(rep) + 1).seed();

  Dataset data = [&] {
    if (sc.generator == Generator::Sellke) {
      EventRecord ev = sc.truth.variant == Variant::GammaFrailty
                           ? sellke_simulate_frailty(sc.truth, sc.n_susceptible,
                                                     sc.n_initial_infected, sc.horizon, data_rng)
                           : sellke_simulate(sc.truth, sc.n_susceptible, sc.n_initial_infected,
                                             sc.horizon, data_rng);
      if (sc.likelihood == LikelihoodKind::Counts)
        return Dataset::from(aggregate_counts(ev, schedule));
      return Dataset::from(std::move(ev));
    }
    return Dataset::from(simulate_dsa_counts(sc.truth, sc.n_susceptible, sc.n_initial_infected,
                                             schedule, data_rng));
  }();

  auto target = make_log_posterior(sc.priors, data, sc.likelihood);
  SamplingLayout layout = SamplingLayout::make(sc.truth.variant, sc.fixed, sc.priors);
  mcmc::Config cfg = sc.mcmc;
  cfg.seed = chain_seed;

  ModelParams init = sc.truth;
  ReplicateResult res;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      Chain chain = run_chain(target, init, layout, cfg);
      res.summary = summarize(chain, sc.ci_level);
      res.ok = true;
      return res;
    } catch (const InitError&) {
      // jitter the start once, then give up on this replicate
      SeededRng jr(chain_seed ^ 0xA5A5A5A5ULL);
      init.beta = sc.truth.beta * std::exp(0.2 * jr.normal());
      init.gamma = sc.truth.gamma * std::exp(0.2 * jr.normal());
    } catch (const DiagnosticsError&) {
      break;
    }
  }
  return res;
}

}  // namespace

CoverageReport replicate_study(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> schedule =
      scenario.schedule.empty() ? unit_schedule(scenario.horizon) : scenario.schedule;

  std::vector<ReplicateResult> results(static_cast<std::size_t>(scenario.replicates));
  unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                           static_cast<unsigned>(scenario.replicates)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int rep = next.fetch_add(1);
      if (rep >= scenario.replicates) break;
      results[static_cast<std::size_t>(rep)] = one_replicate(scenario, schedule, seed, rep);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SamplingLayout layout = SamplingLayout::make(scenario.truth.variant, scenario.fixed,
                                               scenario.priors);
  CoverageReport report;
  report.replicates = scenario.replicates;
  report.seed = seed;
  auto truth_of = [&](ParamId id) {
    switch (id) {
      case ParamId::Beta: return scenario.truth.beta;
      case ParamId::Gamma: return scenario.truth.gamma;
      case ParamId::Rho: return scenario.truth.rho;
      case ParamId::Nu: return scenario.truth.nu;
    }
    return 0.0;
  };
  for (ParamId id : layout.sampled) {
    CoverageEntry e;
    e.id = id;
    e.truth = truth_of(id);
    report.params.push_back(e);
  }
  for (const auto& res : results) {
    if (!res.ok) continue;
    ++report.completed;
    for (std::size_t i = 0; i < layout.sampled.size(); ++i) {
      const ParamSummary& ps = res.summary.params[i];
      CoverageEntry& e = report.params[i];
      if (ps.ci_lo <= e.truth && e.truth <= ps.ci_hi) e.coverage += 1;
      e.mean_post_mean += ps.mean;
      e.mean_post_sd += ps.sd;
      e.mean_ess_per_sec += ps.ess_per_sec;
    }
  }
  if (report.completed > 0) {
    double denom = static_cast<double>(report.completed);
    for (auto& e : report.params) {
      e.coverage /= denom;
      e.mean_post_mean /= denom;
      e.mean_post_sd /= denom;
      e.mean_ess_per_sec /= denom;
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace dsa
