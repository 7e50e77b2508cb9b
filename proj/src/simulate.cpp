#include "nglm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nglm/errors.hpp"
#include "nglm/math.hpp"

namespace nglm {

NetworkState sample_network(const PriorSpec& spec, int num_neurons, int num_basis,
                            RngStream& rng) {
  auto net = NetworkState::empty(num_neurons, num_basis);
  for (int n = 0; n < num_neurons; ++n) {
    for (int m = 0; m < num_neurons; ++m) {
      net.adjacency(m, n) = rng.bernoulli(edge_probability(spec.adjacency, m, n)) ? 1 : 0;
      const auto [mean, cov] = weight_moments(spec.weights, m, n);
      net.weight(m, n) = sample_mvn(mean, cov, rng);
    }
    net.bias(n) = spec.bias.mean + std::sqrt(spec.bias.variance) * rng.normal();
  }
  return net;
}

SpikeData simulate_spikes(const NetworkState& net, int num_bins, const ObsModel& obs,
                          const Basis& basis, double bin_ms, RngStream& rng, double ceiling) {
  if (num_bins < 1) throw std::invalid_argument("simulate_spikes: need at least one bin");
  const int n_neurons = net.num_neurons();
  const int k_basis = net.num_basis;
  const int dt_max = basis.dt_max();
  if (basis.num_basis() != k_basis || obs.num_neurons() != n_neurons) {
    throw std::domain_error("simulate_spikes: basis or observation model does not match network");
  }

  // impulse[m] is dt_max x N: effect of one spike of m on every target at each lag.
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::vector<RowMatrix> impulse(n_neurons);
  for (int m = 0; m < n_neurons; ++m) {
    Eigen::MatrixXd eff(k_basis, n_neurons);
    for (int n = 0; n < n_neurons; ++n) {
      eff.col(n) = net.adjacency(m, n) ? Eigen::VectorXd(net.weight(m, n))
                                       : Eigen::VectorXd::Zero(k_basis);
    }
    impulse[m] = basis.phi * eff;
  }

  SpikeData out;
  out.bin_ms = bin_ms;
  out.counts = Eigen::MatrixXi::Zero(num_bins, n_neurons);
  RowMatrix future = RowMatrix::Zero(dt_max, n_neurons);
  std::vector<CountModel> models(n_neurons);
  for (int n = 0; n < n_neurons; ++n) models[n] = obs.neuron(n);

  double total = 0.0;
  const int check_every = 1000;
  for (int t = 0; t < num_bins; ++t) {
    const int slot = t % dt_max;
    for (int n = 0; n < n_neurons; ++n) {
      const double psi = net.bias(n) + future(slot, n);
      const auto s = sample_count(psi, models[n], rng);
      out.counts(t, n) = static_cast<int>(s);
      total += static_cast<double>(s);
    }
    future.row(slot).setZero();
    for (int m = 0; m < n_neurons; ++m) {
      const int s = out.counts(t, m);
      if (s == 0) continue;
      for (int dt = 1; dt <= dt_max; ++dt) {
        future.row((t + dt) % dt_max) += s * impulse[m].row(dt - 1);
      }
    }
    if ((t + 1) % check_every == 0 || t + 1 == num_bins) {
      const double rate = total / (static_cast<double>(t + 1) * n_neurons);
      if (rate > ceiling) {
        std::ostringstream msg;
        msg << "simulation unstable: mean count per bin " << rate << " exceeds ceiling "
            << ceiling << " after " << t + 1 << " bins";
        throw NumericalError(msg.str());
      }
    }
  }
  return out;
}

BenchmarkScale parse_benchmark_scale(std::string_view name) {
  if (name == "desk") return BenchmarkScale::kDesk;
  if (name == "paper") return BenchmarkScale::kPaper;
  throw ConfigError("unknown benchmark scale '" + std::string(name) + "' (desk|paper)");
}

std::string_view to_string(BenchmarkScale scale) {
  return scale == BenchmarkScale::kDesk ? "desk" : "paper";
}

GroundTruth make_synthetic_benchmark(BenchmarkScale scale, std::uint64_t seed) {
  return scale == BenchmarkScale::kDesk ? make_synthetic_benchmark(20, 50000, seed)
                                        : make_synthetic_benchmark(200, 60000, seed);
}

GroundTruth make_synthetic_benchmark(int num_neurons, int num_bins, std::uint64_t seed) {
  constexpr int kClasses = 2;
  constexpr int kDim = 2;
  constexpr double kBinMs = 1.0;
  constexpr double kTau = 15.0;

  RngStream rng(seed, Phase::kSimulate, 0, 0);
  GroundTruth truth;
  truth.seed = seed;
  truth.basis = exponential_basis(kTau, kBinMs, default_dt_max(kTau, kBinMs));
  truth.obs = ObsModel::uniform(CountKind::kBernoulli, num_neurons);

  DistanceAdjacency adj;
  // location spread grows with N so the expected in-degree stays near the desk value
  adj.location_var = std::max(1.0, num_neurons / 20.0);
  adj.gamma0 = 1.0;
  adj.locations.resize(num_neurons, kDim);
  for (Eigen::Index i = 0; i < adj.locations.size(); ++i) {
    adj.locations.data()[i] = std::sqrt(adj.location_var) * rng.normal();
  }

  SbmWeights w;
  w.pi = Eigen::VectorXd::Constant(kClasses, 1.0 / kClasses);
  // type 0 excites, type 1 inhibits
  const double means[kClasses][kClasses] = {{0.1, 0.1}, {-0.4, -0.3}};
  for (int c = 0; c < kClasses; ++c) {
    for (int d = 0; d < kClasses; ++d) {
      w.mean.push_back(Eigen::VectorXd::Constant(1, means[c][d]));
      w.cov.push_back(Eigen::MatrixXd::Constant(1, 1, 0.005));
    }
  }
  w.labels.resize(num_neurons);
  for (int n = 0; n < num_neurons; ++n) w.labels[n] = n % kClasses;
  std::shuffle(w.labels.begin(), w.labels.end(), rng);

  truth.spec.adjacency = adj;
  truth.spec.weights = w;
  truth.spec.bias = {-3.0, 0.05};
  truth.net = sample_network(truth.spec, num_neurons, 1, rng);

  truth.spikes = simulate_spikes(truth.net, num_bins, truth.obs, truth.basis, kBinMs, rng);
  truth.psi = activation_matrix(filter_spikes(truth.spikes, truth.basis), truth.net);
  return truth;
}

GroundTruth make_density_benchmark(int num_neurons, int num_bins, double rho, std::uint64_t seed) {
  constexpr double kBinMs = 1.0;
  constexpr double kTau = 15.0;
  RngStream rng(seed, Phase::kSimulate, 0, 1);
  GroundTruth truth;
  truth.seed = seed;
  truth.basis = exponential_basis(kTau, kBinMs, default_dt_max(kTau, kBinMs));
  truth.obs = ObsModel::uniform(CountKind::kBernoulli, num_neurons);
  truth.spec.adjacency = IndependentAdjacency{rho};
  truth.spec.weights =
      IndependentWeights{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.01)};
  truth.spec.bias = {-3.0, 0.05};
  truth.net = sample_network(truth.spec, num_neurons, 1, rng);
  truth.spikes = simulate_spikes(truth.net, num_bins, truth.obs, truth.basis, kBinMs, rng);
  truth.psi = activation_matrix(filter_spikes(truth.spikes, truth.basis), truth.net);
  return truth;
}

}  // namespace nglm
