#pragma once

#include <cstdint>
#include <random>

namespace nglm {

// Named phases used to derive independent substreams from the master seed.
enum class Phase : std::uint64_t {
  kInit = 1,
  kOmega = 2,
  kNeuron = 3,
  kObservation = 4,
  kLatent = 5,
  kGlobal = 6,
  kSimulate = 7,
  kPredict = 8,
  kNetwork = 9,
  kBatch = 10,
  kTest = 99,
};

std::uint64_t splitmix64(std::uint64_t x);

// A deterministic stream keyed by (seed, phase, iteration, index). Two
// streams with any differing key component are statistically independent,
// so work items can be evaluated in any order or on any thread.
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit RngStream(std::uint64_t seed);
  RngStream(std::uint64_t seed, Phase phase, std::uint64_t iteration = 0,
            std::uint64_t index = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform();       // (0, 1)
  double normal();        // N(0, 1)
  double exponential();   // Exp(1)
  double gamma(double shape, double rate = 1.0);
  double beta(double a, double b);
  bool bernoulli(double p);

  // Derives a child stream; used where a work item needs its own substreams.
  RngStream split(std::uint64_t tag) const;

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace nglm
