#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nglm/activation.hpp"
#include "nglm/gibbs.hpp"
#include "nglm/io.hpp"
#include "nglm/network.hpp"
#include "nglm/spikes.hpp"

namespace nglm {

// Everything a run needs, flat so that it maps one-to-one onto the
// `section.key = value` file format.
struct RunConfig {
  std::uint64_t seed = 1;

  CountKind count = CountKind::kBernoulli;
  double nu = 1.0;

  AdjacencyKind adjacency = AdjacencyKind::kDistance;
  WeightKind weights = WeightKind::kSbm;
  int classes = 2;
  int dim = 2;

  double rho_alpha = 1.0;
  double rho_beta = 1.0;
  double pi_alpha = 1.0;
  double weight_mean = 0.0;
  double weight_kappa = 1.0;
  double weight_scale = 0.5;
  double weight_dof = 4.0;
  double distance_mean = 0.0;
  double distance_kappa = 1.0;
  double distance_shape = 3.0;
  double distance_rate = 0.5;
  bool learn_location_scale = true;
  double location_shape = 3.0;
  double location_rate = 2.0;
  double fixed_location_var = 100.0;
  double gamma0_mean = 0.0;
  double gamma0_var = 9.0;
  bool learn_bias = true;
  double bias_mean = 0.0;
  double bias_var = 4.0;
  double bias_prior_mean = 0.0;
  double bias_prior_kappa = 0.01;
  double bias_prior_shape = 2.0;
  double bias_prior_rate = 0.5;
  double nu_shape = 2.0;
  double nu_rate = 0.5;

  std::vector<double> tau_ms{15.0};
  int dt_max = 0;  // 0: five times the longest time constant

  int iterations = 1000;
  int burn_in = 500;
  int thin = 1;
  int checkpoint_every = 50;
  double hmc_step_size = 0.01;
  int hmc_leapfrog_steps = 10;
  bool hmc_adapt = true;
  UpdateToggles toggles;

  std::string data_path;
  DatasetFormat data_format = DatasetFormat::kBinary;
  std::vector<int> heldout;
  std::string truth_path;  // optional ground-truth sidecar for recovery metrics

  std::string simulate_scale = "desk";
  int simulate_neurons = 0;  // 0: use the scale's size
  int simulate_bins = 0;

  int predict_samples = 0;  // 0: one per retained sample
  std::vector<std::string> compare_chains;

  std::string bench_axis = "T";
  std::vector<double> bench_grid{5000, 10000};
  int bench_iterations = 3;
  int bench_neurons = 100;
  int bench_bins = 5000;
  double bench_rho = 0.1;

  bool operator==(const RunConfig&) const = default;

  void validate() const;
  Hyperpriors hyperpriors() const;
  Basis basis(double bin_ms) const;
  SweepConfig sweep(int threads) const;
  ObsModel obs_model(int num_neurons) const;
};

// Unknown keys, repeated keys and malformed values are ConfigErrors that name
// `source` and the line.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);
// Every key, in a fixed order, with values that parse back exactly.
std::string serialize_config(const RunConfig& config);

// Names of all recognized keys.
std::vector<std::string> config_keys();

}  // namespace nglm
