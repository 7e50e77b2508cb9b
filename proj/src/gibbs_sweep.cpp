#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nglm/errors.hpp"
#include "nglm/gibbs.hpp"
#include "nglm/math.hpp"
#include "nglm/parallel.hpp"
#include "nglm/polyagamma.hpp"

namespace nglm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void refresh_absent_weights(NetworkState& net, const PriorSpec& spec, RngStream& rng) {
  const int nn = net.num_neurons();
  for (int n = 0; n < nn; ++n) {
    for (int m = 0; m < nn; ++m) {
      if (net.adjacency(m, n)) continue;
      const auto [mean, cov] = weight_moments(spec.weights, m, n);
      net.weight(m, n) = sample_mvn(mean, cov, rng);
    }
  }
}

}  // namespace

long sample_crt(long s, double nu, RngStream& rng) {
  long tables = 0;
  for (long i = 1; i <= s; ++i) {
    if (rng.uniform() < nu / (nu + static_cast<double>(i) - 1.0)) ++tables;
  }
  return tables;
}

double sample_nu_negbinomial(const Eigen::Ref<const Eigen::VectorXi>& counts,
                             const Eigen::Ref<const Eigen::VectorXd>& psi, double nu,
                             double prior_shape, double prior_rate, RngStream& rng) {
  long tables = 0;
  double rate = prior_rate;
  for (Eigen::Index t = 0; t < counts.size(); ++t) {
    tables += sample_crt(counts(t), nu, rng);
    rate -= log_sigmoid(-psi(t));
  }
  return rng.gamma(prior_shape + static_cast<double>(tables), rate);
}

void SweepConfig::validate() const {
  if (iterations < 1) throw ConfigError("sweep.iterations must be >= 1");
  if (burn_in < 0) throw ConfigError("sweep.burn_in must be >= 0");
  if (thin < 1) throw ConfigError("sweep.thin must be >= 1");
  if (!(hmc_step_size > 0.0)) throw ConfigError("hmc.step_size must be > 0");
  if (hmc_leapfrog_steps < 1) throw ConfigError("hmc.leapfrog_steps must be >= 1");
}

std::string ProgressRecord::format() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "iter=%d logp=%.6f t_obs=%.6f t_net=%.6f", iteration, log_prob,
                times.obs, times.net);
  return buf;
}

ChainState initialize_state(const SpikeData& spikes, const FilteredSpikes& shat,
                            const ObsModel& obs, AdjacencyKind adjacency, WeightKind weights,
                            const Hyperpriors& hyper, int classes, int dim, std::uint64_t seed) {
  const int nn = spikes.num_neurons();
  const int k = shat.num_basis;
  if (obs.num_neurons() != nn) throw DataError("observation model has wrong neuron count");
  RngStream rng(seed, Phase::kInit);
  ChainState state;
  state.obs = obs;
  state.spec = sample_prior_spec(adjacency, weights, hyper, nn, k, classes, dim, rng);
  state.net = NetworkState::empty(nn, k);
  if (adjacency == AdjacencyKind::kDense) state.net.adjacency.setOnes();
  refresh_absent_weights(state.net, state.spec, rng);
  for (int n = 0; n < nn; ++n) {
    if (state.net.adjacency.col(n).sum() == nn) {
      for (int m = 0; m < nn; ++m) {
        const auto [mean, cov] = weight_moments(state.spec.weights, m, n);
        state.net.weight(m, n) = mean;
      }
    }
    const double mean_count =
        spikes.num_bins() > 0 ? spikes.counts.col(n).cast<double>().mean() : 0.0;
    const double nu = obs.nu(n);
    switch (obs.kind) {
      case CountKind::kBernoulli:
      case CountKind::kBinomial: {
        const double p = std::clamp(mean_count / nu, 1e-4, 1.0 - 1e-4);
        state.net.bias(n) = std::log(p) - std::log1p(-p);
        break;
      }
      case CountKind::kNegativeBinomial:
        state.net.bias(n) = std::log(std::max(mean_count / nu, 1e-4));
        break;
    }
  }
  if (hyper.learn_bias && nn > 1) {
    const double mean = state.net.bias.mean();
    state.spec.bias = {mean, (state.net.bias.array() - mean).square().mean() + 0.1};
  }
  state.psi = activation_matrix(shat, state.net);
  state.omega.resize(state.psi.rows(), state.psi.cols());
  for (int n = 0; n < nn; ++n) {
    const CountModel model = obs.neuron(n);
    for (Eigen::Index t = 0; t < state.psi.rows(); ++t) {
      const double b = standard_form(spikes.counts(t, n), model).b;
      state.omega(t, n) = pg_mean({b, state.psi(t, n)});
    }
  }
  state.hmc_adjacency.restart(0.01);
  state.hmc_weights.restart(0.01);
  return state;
}

double joint_log_probability(const ChainState& state, const SpikeData& spikes) {
  double lp = 0.0;
  const int nn = spikes.num_neurons();
  for (int n = 0; n < nn; ++n) {
    const CountModel model = state.obs.neuron(n);
    const auto counts = spikes.counts.col(n);
    const auto psi = state.psi.col(n);
    if (model.kind == CountKind::kBernoulli) {
      for (Eigen::Index t = 0; t < counts.size(); ++t) {
        lp += counts(t) ? log_sigmoid(psi(t)) : log_sigmoid(-psi(t));
      }
    } else {
      for (Eigen::Index t = 0; t < counts.size(); ++t) lp += log_likelihood(counts(t), psi(t), model);
    }
    if (model.kind == CountKind::kNegativeBinomial) {
      const double a = state.spec.hyper.nu_shape;
      const double b = state.spec.hyper.nu_rate;
      lp += a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(model.nu) - b * model.nu;
    }
  }
  lp += log_prior(state.net, state.spec);
  lp += log_hyperprior(state.spec);
  return lp;
}

PhaseTimes sweep(ChainState& state, const SpikeData& spikes, const FilteredSpikes& shat,
                 const SweepConfig& config) {
  const UpdateToggles& on = config.toggles;
  const std::uint64_t iter = static_cast<std::uint64_t>(state.iteration);
  const std::uint64_t seed = config.seed;
  const int nn = spikes.num_neurons();
  PhaseTimes times;

  auto start = Clock::now();
  if (on.omega) {
    state.omega = sample_omega(spikes, state.psi, state.obs, seed, iter, config.threads);
  }
  times.obs = seconds_since(start);

  start = Clock::now();
  if (on.adjacency || on.weights) {
    NetworkState& net = state.net;
    parallel_for(static_cast<std::size_t>(nn), config.threads, [&](std::size_t idx) {
      const int n = static_cast<int>(idx);
      RngStream rng(seed, Phase::kNeuron, iter, idx);
      const NeuronPrior prior = neuron_prior_vectors(state.spec, n, nn, net.num_basis);
      CollapsedNeuronSampler sampler(shat, state.omega.col(n),
                                     kappa_column(spikes.counts.col(n), state.obs.neuron(n)),
                                     prior);
      Eigen::VectorXi active = net.adjacency.col(n);
      sampler.set_active(active);
      if (on.adjacency) {
        sampler.sample_adjacency(active, rng);
        net.adjacency.col(n) = active;
      }
      if (on.weights) net.set_stacked_weights(n, sampler.sample_weights(rng));
      state.psi.col(n) = activation_column(shat, net, n);
    });
  }

  if (on.observation && state.obs.kind == CountKind::kNegativeBinomial) {
    parallel_for(static_cast<std::size_t>(nn), config.threads, [&](std::size_t idx) {
      const auto n = static_cast<Eigen::Index>(idx);
      RngStream rng(seed, Phase::kObservation, iter, idx);
      state.obs.nu(n) =
          sample_nu_negbinomial(spikes.counts.col(n), state.psi.col(n), state.obs.nu(n),
                                state.spec.hyper.nu_shape, state.spec.hyper.nu_rate, rng);
    });
  }

  if (on.latents) {
    RngStream rng(seed, Phase::kLatent, iter);
    sample_sbm_assignments(state.net, state.spec, rng);
    const bool adapting = config.hmc_adapt && state.iteration < config.burn_in;
    if (iter == 0) {
      state.hmc_adjacency.restart(config.hmc_step_size);
      state.hmc_weights.restart(config.hmc_step_size);
    }
    const auto run_hmc = [&](bool adjacency_side, DualAveraging& adapt) {
      const double step = config.hmc_adapt ? adapt.step_size : config.hmc_step_size;
      const HmcResult r = hmc_locations(state.spec, state.net, adjacency_side,
                                        {step, config.hmc_leapfrog_steps}, rng);
      if (adapting) {
        adapt.update(r.accept_prob);
        if (state.iteration + 1 == config.burn_in) adapt.finalize();
      }
    };
    if (std::holds_alternative<DistanceAdjacency>(state.spec.adjacency)) {
      run_hmc(true, state.hmc_adjacency);
    }
    if (std::holds_alternative<DistanceWeights>(state.spec.weights)) {
      run_hmc(false, state.hmc_weights);
    }
  }

  if (on.globals) {
    RngStream rng(seed, Phase::kGlobal, iter);
    sample_independent_params(state.net, state.spec, rng);
    sample_sbm_params(state.net, state.spec, rng);
    sample_distance_hypers(state.net, state.spec, rng);
  }

  if (on.weights || on.latents || on.globals) {
    RngStream rng(seed, Phase::kNetwork, iter);
    refresh_absent_weights(state.net, state.spec, rng);
  }
  times.net = seconds_since(start);

  if (!state.psi.allFinite()) {
    throw NumericalError("non-finite activation after sweep " + std::to_string(iter + 1));
  }
  ++state.iteration;
  return times;
}

Chain run_chain(ChainState& state, const SpikeData& spikes, const FilteredSpikes& shat,
                const SweepConfig& config, const ProgressCallback& progress) {
  config.validate();
  Chain chain;
  chain.seed = config.seed;
  while (state.iteration < config.iterations) {
    ProgressRecord record;
    try {
      record.times = sweep(state, spikes, shat, config);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(state.iteration + 1) + ": " + e.what());
    }
    record.iteration = state.iteration;
    record.log_prob = joint_log_probability(state, spikes);
    if (progress) progress(record, state);
    if (config.retains(state.iteration)) {
      chain.samples.push_back({state.iteration, state.net, state.spec, state.obs.nu, record.log_prob});
    }
  }
  return chain;
}

}  // namespace nglm
