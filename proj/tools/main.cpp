#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dsa/inference.hpp"
#include "dsa/likelihood.hpp"
#include "dsa/model.hpp"
#include "dsa/serialize.hpp"
#include "dsa/simulate.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ModelOpts {
  std::string model = "sir";
  double beta = 1.0;
  double gamma = 1.0;
  double rho = 0.05;
  double nu = 0.5;
};

void add_model_opts(CLI::App* cmd, ModelOpts& o, const char* role) {
  cmd->add_option("--model", o.model, "model variant: sir, frailty, network")
      ->check(CLI::IsMember({"sir", "frailty", "network"}));
  cmd->add_option("--beta", o.beta, std::string("contact rate (") + role + ")");
  cmd->add_option("--gamma", o.gamma, std::string("removal rate (") + role + ")");
  cmd->add_option("--rho", o.rho, std::string("initial infected fraction (") + role + ")");
  cmd->add_option("--nu", o.nu, std::string("frailty scale (") + role + ", frailty model)");
}

dsa::ModelParams to_params(const ModelOpts& o) {
  dsa::ModelParams p;
  p.variant = dsa::variant_from_name(o.model);
  p.beta = o.beta;
  p.gamma = o.gamma;
  p.rho = o.rho;
  p.nu = p.variant == dsa::Variant::GammaFrailty ? o.nu : 0.0;
  p.validate();
  return p;
}

struct PriorOpts {
  std::string beta = "gamma:0.1,0.1";
  std::string gamma = "gamma:0.1,0.1";
  std::string rho = "gamma:0.1,0.1";
  std::string nu = "gamma:1,1";
  std::string beta_range, gamma_range, rho_range, nu_range;
  bool rate_order = false;
};

void add_prior_opts(CLI::App* cmd, PriorOpts& o) {
  cmd->add_option("--prior-beta", o.beta, "prior: gamma:shape,rate or uniform:lo,hi");
  cmd->add_option("--prior-gamma", o.gamma, "prior for gamma");
  cmd->add_option("--prior-rho", o.rho, "prior for rho (restricted to (0,1))");
  cmd->add_option("--prior-nu", o.nu, "prior for nu (frailty model)");
  cmd->add_option("--range-beta", o.beta_range, "extra support bound lo,hi (inf allowed)");
  cmd->add_option("--range-gamma", o.gamma_range, "extra support bound lo,hi");
  cmd->add_option("--range-rho", o.rho_range, "extra support bound lo,hi");
  cmd->add_option("--range-nu", o.nu_range, "extra support bound lo,hi");
  cmd->add_flag("--constrain-rate-order", o.rate_order,
                "restrict the posterior to gamma < beta (network fits)");
}

double parse_number(const std::string& tok) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw dsa::ConfigError("bad number '" + tok + "'");
  }
  if (pos != tok.size()) throw dsa::ConfigError("bad number '" + tok + "'");
  return v;
}

std::pair<double, double> parse_pair(const std::string& spec) {
  auto comma = spec.find(',');
  if (comma == std::string::npos) throw dsa::ConfigError("expected 'a,b' in '" + spec + "'");
  return {parse_number(spec.substr(0, comma)), parse_number(spec.substr(comma + 1))};
}

dsa::ParamPrior parse_prior(const std::string& spec, const std::string& range, double lo_cap,
                            double hi_cap) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw dsa::ConfigError("prior must look like gamma:shape,rate or uniform:lo,hi");
  std::string kind = spec.substr(0, colon);
  auto [a, b] = parse_pair(spec.substr(colon + 1));
  dsa::ParamPrior p;
  if (kind == "gamma")
    p = dsa::ParamPrior::gamma_dist(a, b);
  else if (kind == "uniform")
    p = dsa::ParamPrior::uniform_dist(a, b);
  else
    throw dsa::ConfigError("unknown prior family '" + kind + "'");
  if (!range.empty()) {
    auto [lo, hi] = parse_pair(range);
    p.lo = std::max(p.lo, lo);
    p.hi = std::min(p.hi, hi);
  }
  p.lo = std::max(p.lo, lo_cap);
  p.hi = std::min(p.hi, hi_cap);
  if (!(p.lo < p.hi)) throw dsa::ConfigError("empty prior support after bounds");
  return p;
}

dsa::PriorSpec to_priors(const PriorOpts& o) {
  double inf = std::numeric_limits<double>::infinity();
  dsa::PriorSpec s;
  s.beta = parse_prior(o.beta, o.beta_range, 0, inf);
  s.gamma = parse_prior(o.gamma, o.gamma_range, 0, inf);
  s.rho = parse_prior(o.rho, o.rho_range, 0, 1);
  s.nu = parse_prior(o.nu, o.nu_range, 0, inf);
  s.require_rate_order = o.rate_order;
  return s;
}

struct SamplerOpts {
  long draws = 20000;
  long burn = -1;
  int chains = 1;
  double ci = 0.95;
};

void add_sampler_opts(CLI::App* cmd, SamplerOpts& o) {
  cmd->add_option("--draws", o.draws, "total draws per chain (burn-in included)");
  cmd->add_option("--burn-in", o.burn, "burn-in draws; default half of --draws");
  cmd->add_option("--chains", o.chains, "independent chains")->check(CLI::PositiveNumber);
  cmd->add_option("--ci", o.ci, "credible interval level, e.g. 0.95");
}

struct FixOpts {
  double beta = -1, gamma = -1, rho = -1, nu = -1;
  bool has_beta = false, has_gamma = false, has_rho = false, has_nu = false;
};

void add_fix_opts(CLI::App* cmd, FixOpts& o) {
  cmd->add_option("--fix-beta", o.beta, "pin beta during sampling");
  cmd->add_option("--fix-gamma", o.gamma, "pin gamma during sampling");
  cmd->add_option("--fix-rho", o.rho, "pin rho during sampling");
  cmd->add_option("--fix-nu", o.nu, "pin nu during sampling");
}

dsa::FixedParams to_fixed(const CLI::App* cmd, const FixOpts& o) {
  dsa::FixedParams f;
  if (cmd->count("--fix-beta")) f.beta = o.beta;
  if (cmd->count("--fix-gamma")) f.gamma = o.gamma;
  if (cmd->count("--fix-rho")) f.rho = o.rho;
  if (cmd->count("--fix-nu")) f.nu = o.nu;
  return f;
}

std::vector<double> build_schedule(double t_end, double obs_dt,
                                   const std::vector<double>& explicit_sched) {
  std::vector<double> sched;
  if (!explicit_sched.empty()) {
    sched.push_back(0.0);
    for (double x : explicit_sched) {
      if (x == 0) continue;
      if (!(x > sched.back())) throw dsa::ConfigError("schedule must be strictly increasing");
      sched.push_back(x);
    }
    if (sched.size() < 2) throw dsa::ConfigError("schedule needs at least one interval");
    return sched;
  }
  if (!(obs_dt > 0)) throw dsa::ConfigError("obs-dt must be > 0");
  if (!(t_end > 0)) throw dsa::ConfigError("t-end must be > 0");
  sched.push_back(0.0);
  for (double x = obs_dt; x < t_end - 1e-9 * t_end; x += obs_dt) sched.push_back(x);
  sched.push_back(t_end);
  return sched;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::json& options, const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["options"] = options;
  m["outputs"] = outputs;
  std::ofstream out(dir / "manifest.json");
  if (!out)
    throw fs::filesystem_error("cannot write", dir / "manifest.json",
                               std::make_error_code(std::errc::permission_denied));
  out << m.dump(2) << "\n";
}

// ---- simulate ----

struct SimulateArgs {
  ModelOpts model;
  long long n = 1000;
  long long m = 50;
  double t_end = 10;
  double obs_dt = 1.0;
  std::vector<double> schedule;
  std::string generator = "sellke";
  std::string emit = "counts";
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  dsa::ModelParams params = to_params(a.model);
  std::vector<double> sched = build_schedule(a.t_end, a.obs_dt, a.schedule);
  double horizon = sched.back();
  dsa::SeededRng rng(a.seed);
  fs::path dir(a.out);
  fs::create_directories(dir);

  std::vector<std::string> outputs;
  long long total = 0;
  if (a.generator == "sellke") {
    dsa::EventRecord ev =
        params.variant == dsa::Variant::GammaFrailty
            ? dsa::sellke_simulate_frailty(params, a.n, a.m, horizon, rng)
            : dsa::sellke_simulate(params, a.n, a.m, horizon, rng);
    total = ev.total_infected();
    if (a.emit == "events" || a.emit == "both") {
      dsa::write_events_json(dir / "events.json", ev);
      outputs.push_back("events.json");
    }
    if (a.emit == "counts" || a.emit == "both") {
      dsa::write_counts_csv(dir / "counts.csv", dsa::aggregate_counts(ev, sched));
      outputs.push_back("counts.csv");
    }
  } else {
    if (a.emit != "counts")
      throw dsa::ConfigError("the dsa generator yields interval counts only");
    dsa::CountData counts = dsa::simulate_dsa_counts(params, a.n, a.m, sched, rng);
    total = counts.total();
    dsa::write_counts_csv(dir / "counts.csv", counts);
    outputs.push_back("counts.csv");
  }

  nlohmann::json opts{{"model", a.model.model},
                      {"beta", a.model.beta},
                      {"gamma", a.model.gamma},
                      {"rho", a.model.rho},
                      {"n", a.n},
                      {"m", a.m},
                      {"schedule", sched},
                      {"generator", a.generator},
                      {"emit", a.emit},
                      {"seed", a.seed}};
  if (params.variant == dsa::Variant::GammaFrailty) opts["nu"] = params.nu;
  write_manifest(dir, "simulate", opts, outputs);
  std::cout << total << " infections on [0, " << dsa::format_double(horizon) << "] -> "
            << dir.string() << "\n";
  return 0;
}

// ---- fit ----

struct FitArgs {
  ModelOpts model;
  std::string counts_path;
  std::string events_path;
  std::string likelihood = "counts";
  long long n_override = -1;
  PriorOpts priors;
  SamplerOpts sampler;
  FixOpts fix;
  const CLI::App* cmd = nullptr;
  std::uint64_t seed = 1;
  std::string out;
};

int run_fit(const FitArgs& a) {
  if (a.counts_path.empty() == a.events_path.empty())
    throw dsa::ConfigError("provide exactly one of --data (counts) or --events");
  dsa::LikelihoodKind kind = dsa::likelihood_from_name(a.likelihood);
  dsa::Dataset data = [&] {
    if (!a.counts_path.empty()) {
      dsa::CountData c = dsa::parse_counts_csv(a.counts_path);
      if (a.n_override >= 0) c.n = a.n_override;
      return dsa::Dataset::from(std::move(c));
    }
    return dsa::Dataset::from(dsa::parse_events_json(a.events_path));
  }();

  dsa::ModelParams init = to_params(a.model);
  dsa::PriorSpec priors = to_priors(a.priors);
  dsa::FixedParams fixed = to_fixed(a.cmd, a.fix);
  if (fixed.beta) init.beta = *fixed.beta;
  if (fixed.gamma) init.gamma = *fixed.gamma;
  if (fixed.rho) init.rho = *fixed.rho;
  if (fixed.nu && init.variant == dsa::Variant::GammaFrailty) init.nu = *fixed.nu;
  init.validate();

  auto target = dsa::make_log_posterior(priors, data, kind);
  dsa::SamplingLayout layout = dsa::SamplingLayout::make(init.variant, fixed, priors);

  dsa::SeededRng root(a.seed);
  std::vector<dsa::Chain> chains;
  for (int c = 0; c < a.sampler.chains; ++c) {
    dsa::mcmc::Config cfg;
    cfg.n_draws = a.sampler.draws;
    cfg.burn_in = a.sampler.burn;
    cfg.seed = a.sampler.chains == 1 ? a.seed : root.derive(static_cast<std::uint64_t>(c)).seed();
    chains.push_back(dsa::run_chain(target, init, layout, cfg));
  }
  dsa::PosteriorSummary summary = dsa::summarize(chains, a.sampler.ci);

  fs::path dir(a.out);
  fs::create_directories(dir);
  dsa::write_draws_csv(dir / "draws.csv", chains);

  dsa::ModelParams pm = dsa::posterior_mean_params(chains);
  double horizon = data.horizon();
  dsa::Trajectory traj = dsa::solve(pm, dsa::GridSpec::dense(horizon));
  dsa::write_density_csv(dir / "density.csv", traj, pm, horizon);

  double acc = 0;
  for (const auto& c : chains) acc += c.acceptance_rate();
  acc /= static_cast<double>(chains.size());
  std::vector<std::pair<std::string, std::string>> extra;
  extra.push_back({"acceptance_rate", dsa::format_double(acc)});
  if (data.counts) {
    long long n_hat = dsa::estimate_population(*data.counts, traj);
    extra.push_back({"n_hat", std::to_string(n_hat)});
  }
  {
    std::ofstream sj(dir / "summary.json");
    if (!sj)
      throw fs::filesystem_error("cannot write", dir / "summary.json",
                                 std::make_error_code(std::errc::permission_denied));
    sj << dsa::summary_to_json(summary, extra);
  }

  nlohmann::json opts{{"model", a.model.model},
                      {"likelihood", a.likelihood},
                      {"data", a.counts_path.empty() ? a.events_path : a.counts_path},
                      {"draws", a.sampler.draws},
                      {"burn_in", a.sampler.burn},
                      {"chains", a.sampler.chains},
                      {"ci", a.sampler.ci},
                      {"seed", a.seed},
                      {"init", {{"beta", init.beta},
                                {"gamma", init.gamma},
                                {"rho", init.rho},
                                {"nu", init.nu}}},
                      {"priors", {{"beta", a.priors.beta},
                                  {"gamma", a.priors.gamma},
                                  {"rho", a.priors.rho},
                                  {"nu", a.priors.nu}}},
                      {"constrain_rate_order", a.priors.rate_order}};
  if (fixed.beta) opts["fix_beta"] = *fixed.beta;
  if (fixed.gamma) opts["fix_gamma"] = *fixed.gamma;
  if (fixed.rho) opts["fix_rho"] = *fixed.rho;
  if (fixed.nu) opts["fix_nu"] = *fixed.nu;
  write_manifest(dir, "fit", opts, {"draws.csv", "summary.json", "density.csv"});

  std::cout << dsa::summary_table(summary);
  return 0;
}

// ---- replicate ----

struct ReplicateArgs {
  ModelOpts model;
  long long n = 1000;
  long long m = 50;
  double t_end = 10;
  double obs_dt = 1.0;
  std::vector<double> schedule;
  std::string generator = "dsa";
  std::string likelihood = "counts";
  int replicates = 50;
  PriorOpts priors;
  SamplerOpts sampler;
  FixOpts fix;
  const CLI::App* cmd = nullptr;
  std::uint64_t seed = 1;
  std::string out;
};

int run_replicate(const ReplicateArgs& a) {
  dsa::Scenario sc;
  sc.truth = to_params(a.model);
  sc.n_susceptible = a.n;
  sc.n_initial_infected = a.m;
  sc.horizon = a.schedule.empty() ? a.t_end : build_schedule(a.t_end, a.obs_dt, a.schedule).back();
  sc.schedule = build_schedule(sc.horizon, a.obs_dt, a.schedule);
  sc.replicates = a.replicates;
  sc.generator = dsa::generator_from_name(a.generator);
  sc.likelihood = dsa::likelihood_from_name(a.likelihood);
  sc.priors = to_priors(a.priors);
  sc.fixed = to_fixed(a.cmd, a.fix);
  sc.mcmc.n_draws = a.sampler.draws;
  sc.mcmc.burn_in = a.sampler.burn;
  sc.ci_level = a.sampler.ci;

  dsa::CoverageReport report = dsa::replicate_study(sc, a.seed);

  fs::path dir(a.out);
  fs::create_directories(dir);
  {
    std::ofstream cj(dir / "coverage.json");
    if (!cj)
      throw fs::filesystem_error("cannot write", dir / "coverage.json",
                                 std::make_error_code(std::errc::permission_denied));
    cj << dsa::coverage_to_json(report);
  }
  nlohmann::json opts{{"model", a.model.model},
                      {"beta", a.model.beta},
                      {"gamma", a.model.gamma},
                      {"rho", a.model.rho},
                      {"n", a.n},
                      {"m", a.m},
                      {"schedule", sc.schedule},
                      {"generator", a.generator},
                      {"likelihood", a.likelihood},
                      {"replicates", a.replicates},
                      {"draws", a.sampler.draws},
                      {"burn_in", a.sampler.burn},
                      {"ci", a.sampler.ci},
                      {"seed", a.seed}};
  if (sc.truth.variant == dsa::Variant::GammaFrailty) opts["nu"] = sc.truth.nu;
  write_manifest(dir, "replicate", opts, {"coverage.json"});

  std::cout << dsa::coverage_table(report);
  return 0;
}

// ---- tau ----

struct TauArgs {
  double r0 = 2;
  double rho = 0.05;
};

int run_tau(const TauArgs& a) {
  std::cout << dsa::format_double(dsa::solve_tau(a.r0, a.rho).tau) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamical survival analysis for epidemic data"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* csim = app.add_subcommand("simulate", "generate synthetic outbreak data");
  add_model_opts(csim, sim.model, "truth");
  csim->add_option("--n", sim.n, "initially susceptible")->check(CLI::PositiveNumber);
  csim->add_option("--m", sim.m, "initially infected")->check(CLI::PositiveNumber);
  csim->add_option("--t-end", sim.t_end, "observation horizon");
  csim->add_option("--obs-dt", sim.obs_dt, "uniform observation interval");
  csim->add_option("--schedule", sim.schedule, "explicit interval ends")->delimiter(',');
  csim->add_option("--generator", sim.generator, "sellke (exact) or dsa (large-population)")
      ->check(CLI::IsMember({"sellke", "dsa"}));
  csim->add_option("--emit", sim.emit, "counts, events, or both")
      ->check(CLI::IsMember({"counts", "events", "both"}));
  csim->add_option("--seed", sim.seed, "RNG seed");
  csim->add_option("--out", sim.out, "output directory")->required();

  FitArgs fit;
  CLI::App* cfit = app.add_subcommand("fit", "sample the posterior for one dataset");
  add_model_opts(cfit, fit.model, "initial value");
  cfit->add_option("--data", fit.counts_path, "interval counts CSV");
  cfit->add_option("--events", fit.events_path, "event record JSON");
  cfit->add_option("--likelihood", fit.likelihood, "counts, times, times-n, complete")
      ->check(CLI::IsMember({"counts", "times", "times-n", "complete"}));
  cfit->add_option("--n", fit.n_override, "susceptible pool size when absent from the data");
  add_prior_opts(cfit, fit.priors);
  add_sampler_opts(cfit, fit.sampler);
  add_fix_opts(cfit, fit.fix);
  cfit->add_option("--seed", fit.seed, "RNG seed");
  cfit->add_option("--out", fit.out, "output directory")->required();
  fit.cmd = cfit;

  ReplicateArgs rep;
  CLI::App* crep = app.add_subcommand("replicate", "synthetic-data coverage study");
  add_model_opts(crep, rep.model, "truth");
  crep->add_option("--n", rep.n, "initially susceptible")->check(CLI::PositiveNumber);
  crep->add_option("--m", rep.m, "initially infected")->check(CLI::PositiveNumber);
  crep->add_option("--t-end", rep.t_end, "observation horizon");
  crep->add_option("--obs-dt", rep.obs_dt, "uniform observation interval");
  crep->add_option("--schedule", rep.schedule, "explicit interval ends")->delimiter(',');
  crep->add_option("--generator", rep.generator, "sellke or dsa")
      ->check(CLI::IsMember({"sellke", "dsa"}));
  crep->add_option("--likelihood", rep.likelihood, "counts, times, times-n, complete")
      ->check(CLI::IsMember({"counts", "times", "times-n", "complete"}));
  crep->add_option("--replicates", rep.replicates, "number of synthetic datasets")
      ->check(CLI::PositiveNumber);
  add_prior_opts(crep, rep.priors);
  add_sampler_opts(crep, rep.sampler);
  add_fix_opts(crep, rep.fix);
  crep->add_option("--seed", rep.seed, "RNG seed");
  crep->add_option("--out", rep.out, "output directory")->required();
  rep.cmd = crep;

  TauArgs tau;
  CLI::App* ctau = app.add_subcommand("tau", "asymptotic final size");
  ctau->add_option("--r0", tau.r0, "basic reproduction number")->required();
  ctau->add_option("--rho", tau.rho, "initial infected fraction")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (csim->parsed()) return run_simulate(sim);
    if (cfit->parsed()) return run_fit(fit);
    if (crep->parsed()) return run_replicate(rep);
    if (ctau->parsed()) return run_tau(tau);
  } catch (const dsa::ParseError& e) {
    std::cerr << "parse error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 3;
  } catch (const dsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const dsa::IntegrationError& e) {
    std::cerr << "numerical error at t=" << e.time << ": " << e.what() << "\n";
    return 5;
  } catch (const dsa::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 5;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 6;
  } catch (const dsa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
