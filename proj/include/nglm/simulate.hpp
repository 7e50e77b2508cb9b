#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include <Eigen/Dense>

#include "nglm/activation.hpp"
#include "nglm/network.hpp"
#include "nglm/rng.hpp"
#include "nglm/spikes.hpp"
#include "nglm/types.hpp"

namespace nglm {

struct GroundTruth {
  NetworkState net;
  PriorSpec spec;
  ObsModel obs;
  Basis basis;
  SpikeData spikes;
  Eigen::MatrixXd psi;  // T x N
  std::uint64_t seed = 0;
};

// A ~ Bern(ρ), W ~ N(μ, Σ) for every ordered pair (self-edges included), b ~ bias prior.
// Weights are drawn for absent edges as well so the state is complete.
NetworkState sample_network(const PriorSpec& spec, int num_neurons, int num_basis,
                            RngStream& rng);

inline constexpr double kDefaultRateCeiling = 0.9;

// Bin-by-bin ancestral simulation from a silent history. Throws NumericalError
// when the running mean count per neuron-bin exceeds `ceiling`.
SpikeData simulate_spikes(const NetworkState& net, int num_bins, const ObsModel& obs,
                          const Basis& basis, double bin_ms, RngStream& rng,
                          double ceiling = kDefaultRateCeiling);

enum class BenchmarkScale { kDesk, kPaper };

BenchmarkScale parse_benchmark_scale(std::string_view name);
std::string_view to_string(BenchmarkScale scale);

// Distance-model adjacency, two-type SBM weights, Bernoulli spikes in 1 ms bins.
// desk: N = 20, T = 50000; paper: N = 200, T = 60000.
GroundTruth make_synthetic_benchmark(BenchmarkScale scale, std::uint64_t seed);

// Same generator at an arbitrary size.
GroundTruth make_synthetic_benchmark(int num_neurons, int num_bins, std::uint64_t seed);

// Independent adjacency with edge probability rho and weak N(0, 0.01)
// weights, for timing runs at a controlled density.
GroundTruth make_density_benchmark(int num_neurons, int num_bins, double rho, std::uint64_t seed);

}  // namespace nglm
