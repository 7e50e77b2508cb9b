#include "nglm/rng.hpp"

#include <cmath>

namespace nglm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t phase, std::uint64_t iteration,
                      std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ phase);
  h = splitmix64(h ^ iteration);
  h = splitmix64(h ^ index);
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(splitmix64(seed)), engine_(key_) {}

RngStream::RngStream(std::uint64_t seed, Phase phase, std::uint64_t iteration,
                     std::uint64_t index)
    : key_(mix_key(seed, static_cast<std::uint64_t>(phase), iteration, index)),
      engine_(key_) {}

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential() { return -std::log(uniform()); }

// Marsaglia-Tsang squeeze; shapes below one are boosted by U^{1/shape}.
double RngStream::gamma(double shape, double rate) {
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::exp(std::log(uniform()) / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
  }
}

double RngStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

RngStream RngStream::split(std::uint64_t tag) const {
  RngStream child(0);
  child.key_ = splitmix64(key_ ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
  child.engine_.seed(child.key_);
  child.normal_.reset();
  return child;
}

}  // namespace nglm
