#include "dsa/rng.hpp"

#include <cmath>

#include "dsa/errors.hpp"

namespace dsa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

double SeededRng::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double SeededRng::exponential(double rate) {
  if (!(rate > 0)) throw DomainError("exponential rate must be positive");
  return -std::log1p(-uniform()) / rate;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double SeededRng::gamma(double shape, double rate) {
  if (!(shape > 0) || !(rate > 0)) throw DomainError("gamma shape and rate must be positive");
  if (shape < 1.0) {
    // boost to shape+1, then scale back
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

long long SeededRng::binomial(long long n, double p) {
  if (n < 0) throw DomainError("binomial n must be nonnegative");
  if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("binomial p must lie in [0, 1]");
  long long k = 0;
  for (long long i = 0; i < n; ++i) {
    if (uniform() < p) ++k;
  }
  return k;
}

SeededRng SeededRng::derive(std::uint64_t stream) const {
  return SeededRng(splitmix64(splitmix64(seed_) ^ splitmix64(stream + 1)));
}

}  // namespace dsa
