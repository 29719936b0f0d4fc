#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsa/errors.hpp"

namespace dsa {

enum class Variant { StandardSIR, GammaFrailty, PoissonNetwork };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Epidemic rate parameters. `rho` is the initially-infected fraction of the
// susceptible pool. For PoissonNetwork, `beta` and `gamma` hold the network
// contact and removal drift rates acting on the susceptible share directly.
struct ModelParams {
  Variant variant = Variant::StandardSIR;
  double beta = 0;
  double gamma = 0;
  double rho = 0;
  double nu = 0;  // frailty scale; only meaningful for GammaFrailty

  double r0() const { return beta / gamma; }
  void validate() const;  // throws DomainError
};

// Uniform time grid for the fixed-step integrator.
struct GridSpec {
  double t_end = 0;
  int n_steps = 0;

  // About 200 steps per unit time, never fewer than 2000 total.
  static GridSpec dense(double t_end);
  double step() const { return t_end / n_steps; }
  void validate() const;
};

// Mean-field solution (susceptible s, infected iota, removed r) on a strictly
// increasing grid starting at 0. Read-only after construction; the survival
// interpolant tables are built once and shared safely across threads.
struct Trajectory {
  Variant variant = Variant::StandardSIR;
  std::vector<double> times;
  std::vector<double> s;
  std::vector<double> iota;
  std::vector<double> r;

  double t_end() const { return times.back(); }
  double s_end() const { return s.back(); }
  std::size_t size() const { return times.size(); }

  // Monotone cubic (Fritsch-Butland) node slopes for s; populated by solve().
  // Call after filling the vectors by hand (tests, external solutions).
  void build_interpolant();
  const std::vector<double>& survival_slopes() const { return s_slopes_; }

 private:
  std::vector<double> s_slopes_;
};

// Classical fixed-step RK4 over the uniform grid.
Trajectory solve(const ModelParams& params, const GridSpec& grid);

// Same integrator on a grid that contains every knot exactly; each knot gap is
// split into equal substeps no longer than max_step. knots must be strictly
// increasing; a leading 0 is added when absent.
Trajectory solve_at(const ModelParams& params, const std::vector<double>& knots, double max_step);

// Piecewise-monotone-cubic survival value; exact at grid points.
// Throws DomainError outside [0, t_end].
double eval_survival(const Trajectory& traj, double t);

// Smallest t with s(t) == s_target under the same interpolant.
// Throws DomainError when s_target lies outside [s(t_end), s(0)].
double invert_survival(const Trajectory& traj, double s_target);

// Linear interpolation of the other compartments.
double eval_infected(const Trajectory& traj, double t);
double eval_removed(const Trajectory& traj, double t);

}  // namespace dsa
