#include "dsa/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "dsa/errors.hpp"

namespace dsa::mcmc {

void Config::validate(std::size_t dim) const {
  if (dim == 0) throw DomainError("need at least one sampled coordinate");
  if (n_draws < 2) throw DomainError("n_draws must be >= 2");
  long burn = effective_burn_in();
  if (burn < 0 || burn >= n_draws) throw DomainError("burn_in must lie in [0, n_draws)");
  if (!(init_scale > 0)) throw DomainError("init_scale must be > 0");
  if (!(target_accept > 0) || !(target_accept < 1))
    throw DomainError("target_accept must lie in (0, 1)");
  if (stuck_window < 1) throw DomainError("stuck_window must be >= 1");
}

namespace {

// Lower-triangular Cholesky factor; jitters the diagonal until it succeeds.
std::vector<double> cholesky(std::vector<double> a, std::size_t d) {
  double trace = 0;
  for (std::size_t i = 0; i < d; ++i) trace += a[i * d + i];
  double jitter = std::max(1e-12, 1e-10 * trace / static_cast<double>(d));
  for (int attempt = 0; attempt < 12; ++attempt) {
    std::vector<double> l(a);
    for (std::size_t i = 0; i < d; ++i) l[i * d + i] += jitter;
    bool ok = true;
    for (std::size_t i = 0; i < d && ok; ++i) {
      for (std::size_t j = 0; j <= i && ok; ++j) {
        double sum = l[i * d + j];
        for (std::size_t kk = 0; kk < j; ++kk) sum -= l[i * d + kk] * l[j * d + kk];
        if (i == j) {
          if (!(sum > 0)) {
            ok = false;
            break;
          }
          l[i * d + i] = std::sqrt(sum);
        } else {
          l[i * d + j] = sum / l[j * d + j];
        }
      }
      for (std::size_t j = i + 1; j < d; ++j) l[i * d + j] = 0;
    }
    if (ok) return l;
    jitter *= 10;
  }
  throw DiagnosticsError("proposal covariance is not positive definite");
}

}  // namespace

double CoreChain::acceptance_rate() const {
  if (proposals_post_burn_in == 0) return 0;
  return static_cast<double>(accepted_post_burn_in) /
         static_cast<double>(proposals_post_burn_in);
}

CoreChain adaptive_metropolis(const std::function<double(const std::vector<double>&)>& log_target,
                              const std::vector<double>& init, const Config& cfg) {
  std::size_t d = init.size();
  cfg.validate(d);
  double lp = log_target(init);
  if (!std::isfinite(lp))
    throw InitError("log target is not finite at the initial point");

  auto t0 = std::chrono::steady_clock::now();
  SeededRng rng(cfg.seed);
  long burn = cfg.effective_burn_in();

  CoreChain chain;
  chain.seed = cfg.seed;
  chain.burn_in = burn;
  chain.draws.reserve(static_cast<std::size_t>(cfg.n_draws));
  chain.log_density.reserve(static_cast<std::size_t>(cfg.n_draws));

  std::vector<double> x = init;
  // running mean / co-moment (Welford) over visited states during burn-in
  std::vector<double> mean = init;
  std::vector<double> m2(d * d, 0.0);
  long n_stat = 1;

  double log_scale = 0.0;
  std::vector<double> chol(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) chol[i * d + i] = cfg.init_scale;

  std::vector<double> prop(d), noise(d);
  long window_accepts = 0;
  long window_count = 0;

  for (long iter = 0; iter < cfg.n_draws; ++iter) {
    bool in_burn = iter < burn;
    double scale = std::exp(log_scale);
    for (auto& z : noise) z = rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
      double sum = 0;
      for (std::size_t j = 0; j <= i; ++j) sum += chol[i * d + j] * noise[j];
      prop[i] = x[i] + scale * sum;
    }
    double lp_prop = log_target(prop);
    double log_alpha = lp_prop - lp;
    double alpha = log_alpha >= 0 ? 1.0 : std::exp(log_alpha);
    if (std::isnan(alpha)) alpha = 0.0;
    bool accept = rng.uniform() < alpha;
    if (accept) {
      x = prop;
      lp = lp_prop;
    }
    chain.draws.push_back(x);
    chain.log_density.push_back(lp);

    if (in_burn) {
      if (cfg.adapt) {
        // Robbins-Monro drift of the global scale toward the target rate
        double step = 1.0 / std::pow(static_cast<double>(iter + 10), 0.6);
        log_scale += step * (alpha - cfg.target_accept);
        log_scale = std::clamp(log_scale, -12.0, 12.0);

        ++n_stat;
        std::vector<double> delta(d);
        for (std::size_t i = 0; i < d; ++i) delta[i] = x[i] - mean[i];
        for (std::size_t i = 0; i < d; ++i) mean[i] += delta[i] / static_cast<double>(n_stat);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j <= i; ++j)
            m2[i * d + j] += delta[i] * (x[j] - mean[j]);
        // refresh the proposal shape periodically once enough states are seen
        if (n_stat > 50 && iter % 25 == 0) {
          std::vector<double> sigma(d * d, 0.0);
          bool diag_phase = iter < burn / 2;
          double denom = static_cast<double>(n_stat - 1);
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
              double c = m2[i * d + j] / denom;
              if (diag_phase && i != j) c = 0;
              sigma[i * d + j] = sigma[j * d + i] = c;
            }
          chol = cholesky(std::move(sigma), d);
        }
      }
      ++window_count;
      if (accept) ++window_accepts;
      if (window_count == cfg.stuck_window) {
        if (window_accepts == 0)
          throw DiagnosticsError("chain stuck: no accepted proposal during an adaptation window");
        window_count = 0;
        window_accepts = 0;
      }
    } else {
      ++chain.proposals_post_burn_in;
      if (accept) ++chain.accepted_post_burn_in;
    }
  }

  chain.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return chain;
}

double ess_autocorr(const std::vector<double>& x) {
  std::size_t n = x.size();
  if (n < 2) return static_cast<double>(n);
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  // constant chain carries one draw of information; the relative threshold
  // absorbs round-off in the mean subtraction
  if (var <= 1e-20 * (1.0 + mean * mean)) return 1.0;

  auto acov = [&](std::size_t lag) {
    double c = 0;
    for (std::size_t t = 0; t + lag < n; ++t) c += (x[t] - mean) * (x[t + lag] - mean);
    return c / static_cast<double>(n);
  };
  // sum of adjacent autocorrelation pairs while they stay positive
  double tau = 1.0;
  for (std::size_t m = 0;; ++m) {
    std::size_t l1 = 2 * m + 1, l2 = 2 * m + 2;
    if (l2 >= n) break;
    double pair = (acov(l1) + acov(l2)) / var;
    if (pair <= 0) break;
    tau += 2.0 * pair;
  }
  double ess = static_cast<double>(n) / tau;
  return std::clamp(ess, 1.0, static_cast<double>(n));
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DomainError("quantile of an empty sample");
  if (!(q >= 0) || !(q <= 1)) throw DomainError("q must lie in [0, 1]");
  std::sort(x.begin(), x.end());
  if (x.size() == 1) return x[0];
  double pos = q * static_cast<double>(x.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= x.size()) return x.back();
  double frac = pos - static_cast<double>(lo);
  return x[lo] * (1.0 - frac) + x[lo + 1] * frac;
}

}  // namespace dsa::mcmc
