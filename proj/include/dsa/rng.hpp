#pragma once

#include <cstdint>
#include <random>

namespace dsa {

// Deterministic random source with a pinned draw algorithm for every
// distribution, so that a fixed seed reproduces byte-identical output
// across platforms and standard library versions.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Exponential with the given rate (> 0).
  double exponential(double rate);
  // Standard normal (Box-Muller, cached spare).
  double normal();
  // Gamma(shape, rate), mean shape/rate (Marsaglia-Tsang).
  double gamma(double shape, double rate);
  // Binomial(n, p) by summed Bernoulli trials.
  long long binomial(long long n, double p);

  // Statistically independent child stream; derive(i) != derive(j) for i != j
  // and children of distinct parents do not collide in practice.
  SeededRng derive(std::uint64_t stream) const;

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dsa
