#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dsa/likelihood.hpp"
#include "dsa/model.hpp"
#include "dsa/simulate.hpp"

using namespace dsa;

namespace {

ModelParams sir(double beta, double gamma, double rho) {
  return ModelParams{Variant::StandardSIR, beta, gamma, rho, 0};
}

// trapezoid over the trajectory grid restricted to [a, b] (grid-aligned ends)
double trapz_intensity(const Trajectory& tr, const ModelParams& p, double a, double b) {
  double acc = 0;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    if (tr.times[k] < a - 1e-12 || tr.times[k + 1] > b + 1e-12) continue;
    double fa = std::exp(log_event_intensity(tr, p, tr.times[k]));
    double fb = std::exp(log_event_intensity(tr, p, tr.times[k + 1]));
    acc += 0.5 * (fa + fb) * (tr.times[k + 1] - tr.times[k]);
  }
  return acc;
}

}  // namespace

TEST_CASE("log-likelihood construction rejects NaN and +inf") {
  CHECK_NOTHROW(LogLikelihood::of(-1.5));
  CHECK_NOTHROW(LogLikelihood::of(-std::numeric_limits<double>::infinity()));
  CHECK_FALSE(LogLikelihood::of(-std::numeric_limits<double>::infinity()).is_finite());
  CHECK_THROWS_AS(LogLikelihood::of(std::nan("")), DomainError);
  CHECK_THROWS_AS(LogLikelihood::of(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("final size solves its fixed point") {
  FinalSize fs = solve_tau(2.0, 0.05);
  CHECK(fs.tau == doctest::Approx(0.82687727687458525).epsilon(1e-10));
  CHECK(std::abs(1.0 - fs.tau - std::exp(-2.0 * (0.05 + fs.tau))) < 1e-12);
  CHECK(solve_tau(4.0, 0.05).tau == doctest::Approx(0.98401424011907467).epsilon(1e-10));
  CHECK(solve_tau(0.01, 0.05).tau < 1e-3);  // vanishing outbreak as r0 -> 0
  CHECK_THROWS_AS(solve_tau(0.0, 0.05), DomainError);
  CHECK_THROWS_AS(solve_tau(2.0, 0.0), DomainError);
}

TEST_CASE("final size agrees with the long-horizon dynamics") {
  ModelParams p = sir(2, 1, 0.05);
  Trajectory tr = solve(p, GridSpec::dense(200));
  CHECK(std::abs((1.0 - tr.s_end()) - solve_tau(2.0, 0.05).tau) < 1e-4);
}

TEST_CASE("infection density integrates to one and matches the survival CDF") {
  for (ModelParams p : {sir(2, 1, 0.05), ModelParams{Variant::GammaFrailty, 2, 0.7, 0.05, 0.4},
                        ModelParams{Variant::PoissonNetwork, 1.0, 0.5, 0.05, 0}}) {
    double T = 10;
    Trajectory tr = solve(p, GridSpec::dense(T));
    double total = 0;
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
      double fa = density_infection(tr, p, tr.times[k], T);
      double fb = density_infection(tr, p, tr.times[k + 1], T);
      total += 0.5 * (fa + fb) * (tr.times[k + 1] - tr.times[k]);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    double denom = 1.0 - eval_survival(tr, T);
    for (double x : {1.0, 2.5, 5.0, 8.0}) {
      double cdf_closed = (1.0 - eval_survival(tr, x)) / denom;
      double cdf_quad = trapz_intensity(tr, p, 0, x) / denom;
      CHECK(cdf_quad == doctest::Approx(cdf_closed).epsilon(1e-6));
    }
  }
}

TEST_CASE("frailty density at nu = 0 equals the standard density") {
  ModelParams fr{Variant::GammaFrailty, 2, 1, 0.05, 0};
  ModelParams base = sir(2, 1, 0.05);
  Trajectory trf = solve(fr, GridSpec::dense(10));
  Trajectory trb = solve(base, GridSpec::dense(10));
  for (double t : {0.5, 1.0, 3.0, 7.0})
    CHECK(density_infection(trf, fr, t, 10) ==
          doctest::Approx(density_infection(trb, base, t, 10)).epsilon(1e-10));
}

TEST_CASE("recovery density: boundary, positivity, convolution identity") {
  ModelParams p = sir(2, 1, 0.05);
  Trajectory tr = solve(p, GridSpec::dense(12));
  CHECK(density_recovery(tr, p, 0.0) == 0.0);
  for (std::size_t k = 0; k < tr.size(); k += 40) CHECK(density_recovery(tr, p, tr.times[k]) >= 0);

  // T_R = T_I + Exp(gamma): g(t) = int_0^t (beta s_u iota_u / tau) gamma e^{-gamma (t-u)} du
  double tau = solve_tau(p.r0(), p.rho).tau;
  for (double t : {1.0, 2.5, 5.0, 8.0}) {
    double conv = 0;
    for (std::size_t k = 0; k + 1 < tr.size() && tr.times[k + 1] <= t + 1e-12; ++k) {
      auto g = [&](double u) {
        return std::exp(log_event_intensity(tr, p, u)) / tau * p.gamma *
               std::exp(-p.gamma * (t - u));
      };
      conv += 0.5 * (g(tr.times[k]) + g(tr.times[k + 1])) * (tr.times[k + 1] - tr.times[k]);
    }
    CHECK(conv == doctest::Approx(density_recovery(tr, p, t)).epsilon(1e-5));
  }

  ModelParams nw{Variant::PoissonNetwork, 1.0, 0.5, 0.05, 0};
  Trajectory trn = solve(nw, GridSpec::dense(12));
  CHECK_THROWS_AS(density_recovery(trn, nw, 1.0), DomainError);
}

TEST_CASE("complete-data likelihood reductions") {
  ModelParams p = sir(1.5, 0.8, 0.1);
  double T = 5;
  Trajectory tr = solve(p, GridSpec::dense(T));

  EventRecord empty;
  empty.n = 10;
  empty.m = 2;
  empty.horizon = T;
  double expect = 10.0 * std::log(eval_survival(tr, T)) - p.gamma * 2 * T;
  CHECK(loglik_complete(tr, p, empty).value == doctest::Approx(expect).epsilon(1e-12));

  // adding one individual, infected and censored exactly at the horizon,
  // multiplies the likelihood by beta s_T iota_T
  EventRecord plus = empty;
  plus.n = 11;
  plus.infection_times.push_back(T);
  plus.periods.push_back({0.0, true});
  double delta = loglik_complete(tr, p, plus).value - loglik_complete(tr, p, empty).value;
  CHECK(delta == doctest::Approx(std::log(p.beta * eval_survival(tr, T) * eval_infected(tr, T)))
                     .epsilon(1e-10));
}

TEST_CASE("complete-data likelihood matches a hand expansion") {
  ModelParams p = sir(1.5, 0.8, 0.1);
  double T = 4;
  Trajectory tr = solve(p, GridSpec::dense(T));
  EventRecord ev;
  ev.n = 5;
  ev.m = 1;
  ev.horizon = T;
  ev.infection_times = {0.5, 1.2, 3.0};
  ev.periods = {{0.7, false}, {2.0, false}, {1.0, true}};  // third censored at T
  ev.initial_recoveries = {0.9};

  double hand = (5.0 - 3.0) * std::log(eval_survival(tr, T));
  hand += 3.0 * std::log(p.gamma);  // two recovered infections + one initial recovery
  hand -= p.gamma * ((0.7 + 2.0 + 1.0) + 0.9 + 0.0 * T);
  for (double t : ev.infection_times)
    hand += std::log(p.beta * eval_survival(tr, t) * eval_infected(tr, t));
  CHECK(loglik_complete(tr, p, ev).value == doctest::Approx(hand).epsilon(1e-12));

  EventRecord bad = ev;
  bad.infection_times[2] = 4.5;  // beyond the horizon
  CHECK_THROWS_AS(loglik_complete(tr, p, bad), DomainError);
  ModelParams nw{Variant::PoissonNetwork, 1.0, 0.5, 0.05, 0};
  CHECK_THROWS_AS(loglik_complete(nw, ev), ConfigError);
}

TEST_CASE("times likelihood: single-time and with/without-N relation") {
  ModelParams p = sir(2, 1, 0.05);
  double T = 10;
  Trajectory tr = solve(p, GridSpec::dense(T));
  std::vector<double> one{2.3};
  CHECK(loglik_infection_times(tr, p, one, T, std::nullopt).value ==
        doctest::Approx(std::log(density_infection(tr, p, 2.3, T))).epsilon(1e-12));

  std::vector<double> times{0.8, 1.7, 2.2, 4.9, 7.5};
  long long n = 40;
  double with_n = loglik_infection_times(tr, p, times, T, n).value;
  double without = loglik_infection_times(tr, p, times, T, std::nullopt).value;
  double k = static_cast<double>(times.size());
  double s_t = eval_survival(tr, T);
  CHECK(with_n - without ==
        doctest::Approx((n - k) * std::log(s_t) + k * std::log1p(-s_t)).epsilon(1e-10));

  CHECK_THROWS_AS(loglik_infection_times(tr, p, times, T, 3ll), DomainError);
  std::vector<double> late{10.5};
  CHECK_THROWS_AS(loglik_infection_times(tr, p, late, T, std::nullopt), DomainError);
}

TEST_CASE("count likelihood reductions") {
  ModelParams p = sir(2, 1, 0.05);
  CountData zero;
  zero.schedule = {0, 2, 4, 6, 8, 10};
  zero.counts = {0, 0, 0, 0, 0};
  zero.n = 25;
  Trajectory tr = solve_for_counts(p, zero);
  CHECK(loglik_counts(tr, p, zero).value ==
        doctest::Approx(25.0 * std::log(eval_survival(tr, 10))).epsilon(1e-12));

  CountData single;
  single.schedule = {0, 10};
  single.counts = {7};
  single.n = 25;
  Trajectory tr1 = solve_for_counts(p, single);
  double s_t = eval_survival(tr1, 10);
  CHECK(loglik_counts(tr1, p, single).value ==
        doctest::Approx(18.0 * std::log(s_t) + 7.0 * std::log1p(-s_t)).epsilon(1e-13));
}

TEST_CASE("count likelihood equals a per-interval quadrature oracle") {
  ModelParams p = sir(2, 1, 0.05);
  CountData data;
  data.schedule = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  data.counts = {5, 9, 13, 17, 12, 8, 5, 3, 2, 1};
  data.n = 100;
  Trajectory fine = solve_at(p, data.schedule, 10.0 / 40000);
  double oracle = (100.0 - 75.0) * std::log(eval_survival(fine, 10));
  for (std::size_t j = 0; j < data.counts.size(); ++j)
    oracle += data.counts[j] *
              std::log(trapz_intensity(fine, p, data.schedule[j], data.schedule[j + 1]));
  double ll = loglik_counts(p, data).value;
  CHECK(ll == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("count likelihood equals the interval-censored survival form") {
  SeededRng rng(77);
  for (int inst = 0; inst < 5; ++inst) {
    ModelParams p = sir(0.8 + 2 * rng.uniform(), 0.3 + rng.uniform(), 0.02 + 0.1 * rng.uniform());
    CountData data = simulate_dsa_counts(p, 400, 20, {0, 1, 2, 3, 4, 5, 6, 7, 8}, rng);
    Trajectory tr = solve_for_counts(p, data);
    double a = loglik_counts(tr, p, data).value;
    double b = loglik_counts_censored(tr, p, data).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("count likelihood configuration errors") {
  ModelParams p = sir(2, 1, 0.05);
  CountData data;
  data.schedule = {0, 0.333, 10};
  data.counts = {3, 4};
  data.n = 50;
  Trajectory misaligned = solve(p, GridSpec::dense(10));  // 0.333 is not a node
  CHECK_THROWS_AS(loglik_counts(misaligned, p, data), ConfigError);
  CHECK_NOTHROW(loglik_counts(p, data));  // aligned solve handles it

  CountData no_n = data;
  no_n.n.reset();
  CHECK_THROWS_AS(loglik_counts(p, no_n), ConfigError);

  CountData overfull = data;
  overfull.counts = {30, 30};
  CHECK_THROWS_AS(loglik_counts(p, overfull), DomainError);
}

TEST_CASE("frailty count likelihood reduces to standard at nu = 0") {
  CountData data;
  data.schedule = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  data.counts = {5, 9, 13, 17, 12, 8, 5, 3, 2, 1};
  data.n = 100;
  ModelParams fr{Variant::GammaFrailty, 2, 1, 0.05, 0};
  ModelParams base = sir(2, 1, 0.05);
  CHECK(loglik_counts(fr, data).value ==
        doctest::Approx(loglik_counts(base, data).value).epsilon(1e-10));
}

TEST_CASE("count likelihood is stable under grid refinement and continuous in beta") {
  ModelParams p = sir(2, 1, 0.05);
  CountData data;
  data.schedule = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  data.counts = {5, 9, 13, 17, 12, 8, 5, 3, 2, 1};
  data.n = 100;
  double base = loglik_counts(p, data).value;
  double halved =
      loglik_counts(solve_at(p, data.schedule, default_likelihood_step(10) / 2), p, data).value;
  CHECK(std::abs(base - halved) < 1e-5);

  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double beta = 1.9; beta <= 2.1 + 1e-9; beta += 1e-3) {
    double v = loglik_counts(sir(beta, 1, 0.05), data).value;
    REQUIRE(std::isfinite(v));
    if (!std::isnan(prev)) CHECK(std::abs(v - prev) < 10.0);
    prev = v;
  }
}

TEST_CASE("two-interval marginalization spot check") {
  // exp(count loglik) equals the double integral of the exact-times likelihood
  // with each labeled time confined to its interval
  ModelParams p = sir(2, 1, 0.05);
  CountData data;
  data.schedule = {0, 3, 10};
  data.counts = {1, 1};
  data.n = 3;
  Trajectory tr = solve_for_counts(p, data);
  double ll_counts = loglik_counts(tr, p, data).value;

  auto integral_over = [&](double a, double b) {
    int panels = 512;  // Simpson
    double h = (b - a) / panels;
    double acc = 0;
    for (int k = 0; k <= panels; ++k) {
      double w = (k == 0 || k == panels) ? 1 : (k % 2 ? 4 : 2);
      acc += w * std::exp(log_event_intensity(tr, p, a + k * h));
    }
    return acc * h / 3.0;
  };
  double s_t = eval_survival(tr, 10);
  double marginal = std::exp((3.0 - 2.0) * std::log(s_t)) * integral_over(0, 3) *
                    integral_over(3, 10);
  CHECK(marginal == doctest::Approx(std::exp(ll_counts)).epsilon(1e-4));
}

TEST_CASE("population estimate") {
  Trajectory tr;
  tr.variant = Variant::StandardSIR;
  tr.times = {0, 1, 2};
  tr.s = {1.0, 0.7, 0.5};
  tr.iota = {0.05, 0.1, 0.08};
  tr.r = {0, 0.25, 0.47};
  tr.build_interpolant();
  CountData data;
  data.schedule = {0, 1, 2};
  data.counts = {60, 40};
  data.n = 200;
  CHECK(estimate_population(data, tr) == 200);
  data.counts = {0, 0};
  CHECK(estimate_population(data, tr) == 0);

  ModelParams frozen = sir(0, 1, 0.05);
  Trajectory flat = solve(frozen, GridSpec::dense(2));
  data.counts = {0, 0};
  CHECK_THROWS_AS(estimate_population(data, flat), DomainError);
}
