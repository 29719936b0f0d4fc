#include "dsa/model.hpp"

#include <algorithm>
#include <cmath>

namespace dsa {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::StandardSIR: return "sir";
    case Variant::GammaFrailty: return "frailty";
    case Variant::PoissonNetwork: return "network";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "sir") return Variant::StandardSIR;
  if (name == "frailty") return Variant::GammaFrailty;
  if (name == "network") return Variant::PoissonNetwork;
  throw DomainError("unknown model variant: " + name);
}

void ModelParams::validate() const {
  if (!(beta >= 0) || !std::isfinite(beta)) throw DomainError("beta must be finite and >= 0");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and > 0");
  if (!(rho > 0) || !(rho < 1)) throw DomainError("rho must lie in (0, 1)");
  if (variant == Variant::GammaFrailty) {
    if (!(nu >= 0) || !std::isfinite(nu)) throw DomainError("nu must be finite and >= 0");
  } else if (nu != 0) {
    throw DomainError("nu is only meaningful for the frailty variant");
  }
}

GridSpec GridSpec::dense(double t_end) {
  int n = static_cast<int>(std::ceil(200.0 * t_end));
  return GridSpec{t_end, std::max(2000, n)};
}

void GridSpec::validate() const {
  if (!(t_end > 0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and > 0");
  if (n_steps < 1) throw DomainError("n_steps must be >= 1");
}

namespace {

struct State {
  double s, i, r;
};

State operator+(const State& a, const State& b) { return {a.s + b.s, a.i + b.i, a.r + b.r}; }
State operator*(double c, const State& a) { return {c * a.s, c * a.i, c * a.r}; }

State drift(const ModelParams& p, const State& y) {
  double inf = 0;
  switch (p.variant) {
    case Variant::StandardSIR:
      inf = p.beta * y.s * y.i;
      break;
    case Variant::GammaFrailty: {
      double sp = y.s <= 0 ? 0.0 : std::pow(y.s, 1.0 + p.nu * p.nu);
      inf = p.beta * sp * y.i;
      break;
    }
    case Variant::PoissonNetwork: {
      double s = std::max(y.s, 1e-12);  // keep log finite
      inf = p.beta * s * (1.0 + p.rho - s + (p.gamma / p.beta) * std::log(s));
      break;
    }
  }
  return {-inf, inf - p.gamma * y.i, p.gamma * y.i};
}

Trajectory integrate(const ModelParams& p, std::vector<double> times) {
  Trajectory traj;
  traj.variant = p.variant;
  traj.times = std::move(times);
  std::size_t n = traj.times.size();
  traj.s.reserve(n);
  traj.iota.reserve(n);
  traj.r.reserve(n);
  State y{1.0, p.rho, 0.0};
  traj.s.push_back(y.s);
  traj.iota.push_back(y.i);
  traj.r.push_back(y.r);
  for (std::size_t k = 1; k < n; ++k) {
    double h = traj.times[k] - traj.times[k - 1];
    State k1 = drift(p, y);
    State k2 = drift(p, y + (0.5 * h) * k1);
    State k3 = drift(p, y + (0.5 * h) * k2);
    State k4 = drift(p, y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(y.s) || !std::isfinite(y.i) || !std::isfinite(y.r))
      throw IntegrationError("non-finite state during integration", traj.times[k]);
    if (y.i < 0 && y.i > -1e-12) y.i = 0;  // round-off guard near extinction
    traj.s.push_back(y.s);
    traj.iota.push_back(y.i);
    traj.r.push_back(y.r);
  }
  traj.build_interpolant();
  return traj;
}

}  // namespace

Trajectory solve(const ModelParams& params, const GridSpec& grid) {
  params.validate();
  grid.validate();
  std::vector<double> times(grid.n_steps + 1);
  for (int k = 0; k <= grid.n_steps; ++k)
    times[k] = grid.t_end * static_cast<double>(k) / grid.n_steps;
  return integrate(params, std::move(times));
}

Trajectory solve_at(const ModelParams& params, const std::vector<double>& knots, double max_step) {
  params.validate();
  if (!(max_step > 0)) throw DomainError("max_step must be > 0");
  if (knots.empty()) throw DomainError("knots must be non-empty");
  std::vector<double> full;
  if (knots.front() != 0) {
    if (knots.front() < 0) throw DomainError("knots must be nonnegative");
    full.push_back(0.0);
  }
  for (double k : knots) {
    if (!full.empty() && !(k > full.back())) throw DomainError("knots must be strictly increasing");
    full.push_back(k);
  }
  if (full.size() < 2) throw DomainError("need a positive time span");
  std::vector<double> times;
  times.push_back(full[0]);
  for (std::size_t j = 1; j < full.size(); ++j) {
    double a = full[j - 1];
    double b = full[j];
    int m = std::max(1, static_cast<int>(std::ceil((b - a) / max_step)));
    for (int i = 1; i < m; ++i) times.push_back(a + (b - a) * static_cast<double>(i) / m);
    times.push_back(b);  // knot lands on the grid exactly
  }
  return integrate(params, std::move(times));
}

void Trajectory::build_interpolant() {
  std::size_t n = times.size();
  if (n < 2 || s.size() != n || iota.size() != n || r.size() != n)
    throw DomainError("trajectory needs >= 2 aligned grid points");
  s_slopes_.assign(n, 0.0);
  std::vector<double> d(n - 1), h(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = times[k + 1] - times[k];
    if (!(h[k] > 0)) throw DomainError("trajectory times must be strictly increasing");
    d[k] = (s[k + 1] - s[k]) / h[k];
  }
  // Fritsch-Butland slopes: zero at local extrema, weighted harmonic mean of
  // adjacent secants otherwise. Guarantees piecewise monotonicity.
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0) {
      s_slopes_[k] = 0.0;
    } else {
      double w1 = 2.0 * h[k] + h[k - 1];
      double w2 = h[k] + 2.0 * h[k - 1];
      s_slopes_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
  }
  auto endpoint = [](double d0, double d1, double h0, double h1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0) return 0.0;
    if (std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  };
  if (n == 2) {
    s_slopes_[0] = s_slopes_[1] = d[0];
  } else {
    s_slopes_[0] = endpoint(d[0], d[1], h[0], h[1]);
    s_slopes_[n - 1] = endpoint(d[n - 2], d[n - 3], h[n - 2], h[n - 3]);
  }
}

namespace {

// Index of the interval [times[k], times[k+1]] containing t.
std::size_t locate(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  if (k == 0) return 0;
  if (k >= times.size()) return times.size() - 2;
  return k - 1;
}

double hermite(const Trajectory& tr, std::size_t k, double t) {
  double h = tr.times[k + 1] - tr.times[k];
  double th = (t - tr.times[k]) / h;
  double t2 = th * th;
  double t3 = t2 * th;
  double h00 = 2 * t3 - 3 * t2 + 1;
  double h10 = t3 - 2 * t2 + th;
  double h01 = -2 * t3 + 3 * t2;
  double h11 = t3 - t2;
  const auto& m = tr.survival_slopes();
  return h00 * tr.s[k] + h10 * h * m[k] + h01 * tr.s[k + 1] + h11 * h * m[k + 1];
}

void check_domain(const Trajectory& tr, double t) {
  if (!(t >= tr.times.front()) || !(t <= tr.times.back()))
    throw DomainError("time outside the solved range");
}

double lerp_at(const Trajectory& tr, const std::vector<double>& v, double t) {
  check_domain(tr, t);
  std::size_t k = locate(tr.times, t);
  double h = tr.times[k + 1] - tr.times[k];
  double th = (t - tr.times[k]) / h;
  return (1.0 - th) * v[k] + th * v[k + 1];
}

}  // namespace

double eval_survival(const Trajectory& traj, double t) {
  check_domain(traj, t);
  if (traj.survival_slopes().empty())
    throw DomainError("interpolant not built; call build_interpolant()");
  std::size_t k = locate(traj.times, t);
  if (t == traj.times[k]) return traj.s[k];
  if (t == traj.times[k + 1]) return traj.s[k + 1];
  return hermite(traj, k, t);
}

double invert_survival(const Trajectory& traj, double s_target) {
  if (traj.survival_slopes().empty())
    throw DomainError("interpolant not built; call build_interpolant()");
  // round-off slack at the boundaries; anything beyond it is a caller error
  double slack = 1e-12;
  if (!(s_target <= traj.s.front() + slack) || !(s_target >= traj.s.back() - slack))
    throw DomainError("survival level outside the solved range");
  s_target = std::clamp(s_target, traj.s.back(), traj.s.front());
  // smallest k with s[k] <= s_target (s is non-increasing)
  std::size_t lo = 0, hi = traj.s.size() - 1;
  if (traj.s[0] <= s_target) return traj.times[0];
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (traj.s[mid] <= s_target)
      hi = mid;
    else
      lo = mid;
  }
  if (traj.s[hi] == s_target) return traj.times[hi];
  // s[lo] > s_target > s[hi]: the monotone cubic crosses once inside (t_lo, t_hi)
  double a = traj.times[lo], b = traj.times[hi];
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    double mid = 0.5 * (a + b);
    if (hermite(traj, lo, mid) > s_target)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

double eval_infected(const Trajectory& traj, double t) { return lerp_at(traj, traj.iota, t); }

double eval_removed(const Trajectory& traj, double t) { return lerp_at(traj, traj.r, t); }

}  // namespace dsa
