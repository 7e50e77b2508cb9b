#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nglm/activation.hpp"
#include "nglm/hmc.hpp"
#include "nglm/network.hpp"
#include "nglm/rng.hpp"
#include "nglm/spikes.hpp"
#include "nglm/types.hpp"

namespace nglm {

// ---- auxiliary variables ---------------------------------------------------

// ω_{t,n} ~ PG(b(s_{t,n}, ν_n), ψ_{t,n}); column n uses stream (seed, kOmega, iteration, n).
Eigen::MatrixXd sample_omega(const SpikeData& spikes, const Eigen::MatrixXd& psi,
                             const ObsModel& model, std::uint64_t seed, std::uint64_t iteration,
                             int threads = 1);

Eigen::VectorXd sample_omega_column(const Eigen::Ref<const Eigen::VectorXi>& counts,
                                    const Eigen::Ref<const Eigen::VectorXd>& psi,
                                    const CountModel& model, RngStream& rng);

// κ(s_{t,n}, ν_n) for one neuron.
Eigen::VectorXd kappa_column(const Eigen::Ref<const Eigen::VectorXi>& counts,
                             const CountModel& model);

// ---- conditional Gaussian over stacked weights -----------------------------

struct WeightPosterior {
  std::vector<int> coords;  // stacked indices of the active coordinates
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Exact Gaussian conditional of w_n restricted to coordinates with mask = 1,
// given precision weights ω and pseudo-targets κ. Dense reference path.
WeightPosterior weight_posterior(const FilteredSpikes& shat, const Eigen::VectorXd& mask,
                                 const Eigen::VectorXd& omega, const Eigen::VectorXd& kappa,
                                 const NeuronPrior& prior);

// Same conditional for Gaussian observations y ~ N(ψ, ν): ω = 1/ν, κ = y/ν.
WeightPosterior gaussian_weight_posterior(const FilteredSpikes& shat,
                                          const Eigen::VectorXd& mask,
                                          const Eigen::VectorXd& observations, double noise_var,
                                          const NeuronPrior& prior);

// Multivariate Gaussian draw via Cholesky of the covariance.
Eigen::VectorXd sample_weights(const WeightPosterior& posterior, RngStream& rng);

// Collapsed sampler for the incoming connections of one neuron. Holds the
// lazily filled Gram matrix Ŝᵀ Ω Ŝ and a Cholesky factor of the posterior
// precision over the active set, updated by block append / delete so a
// toggle costs O(d²) in the number of active sources d.
class CollapsedNeuronSampler {
 public:
  CollapsedNeuronSampler(const FilteredSpikes& shat, Eigen::VectorXd omega,
                         Eigen::VectorXd kappa, const NeuronPrior& prior);

  // Rebuilds the factor for the given adjacency column (a_{m->n}, m = 0..N-1).
  void set_active(const Eigen::VectorXi& active);

  // Gibbs sweep over a_{m->n} in index order with weights integrated out.
  void sample_adjacency(Eigen::VectorXi& active, RngStream& rng);

  // Log marginal likelihood of the current active set, up to a constant
  // that does not depend on the active set.
  double log_evidence() const;

  // Draws the stacked weights from the Gaussian conditional for the current
  // active set; inactive coordinates are drawn from the prior.
  Eigen::VectorXd sample_weights(RngStream& rng) const;

  // Posterior mean over the stacked coordinates (prior mean on inactive ones).
  Eigen::VectorXd posterior_mean() const;

  // Full refactorization every `interval` toggles (default N).
  void set_refresh_interval(int interval) { refresh_interval_ = interval; }

 private:
  struct Candidate {
    Eigen::MatrixXd cross;   // L^{-1} P_{S,j}
    Eigen::MatrixXd schur_l; // Cholesky of the Schur complement
    Eigen::VectorXd z;       // new entries of L^{-1} h̃
    double delta = 0.0;      // log evidence gain
  };

  int block_dim(int block) const { return block == 0 ? 1 : num_basis_; }
  int block_start(int block) const { return block == 0 ? 0 : 1 + (block - 1) * num_basis_; }
  double gram(int i, int j);
  Eigen::MatrixXd gram_block(int bi, int bj);
  Candidate evaluate_append(int block);
  void commit_append(int block, const Candidate& cand);
  void remove_block(int block);
  void refactor();
  int position_of(int block) const;

  const FilteredSpikes& shat_;
  Eigen::VectorXd omega_;
  Eigen::VectorXd kappa_;
  int num_neurons_;
  int num_basis_;
  Eigen::VectorXd rho_;
  std::vector<Eigen::MatrixXd> prior_cov_;
  std::vector<Eigen::MatrixXd> prior_prec_;
  std::vector<Eigen::MatrixXd> prior_cov_chol_;
  Eigen::VectorXd prior_mean_;
  Eigen::VectorXd htilde_;           // Σ⁻¹μ + Ŝᵀκ, stacked
  std::vector<double> block_const_;  // -½ log|Σ_j| - ½ μ_jᵀ Σ_j⁻¹ μ_j
  Eigen::MatrixXd gram_;
  std::vector<char> gram_ready_;

  std::vector<int> order_;  // active blocks in factor order (bias first)
  Eigen::MatrixXd chol_;    // lower factor, leading dim_ x dim_ in use
  Eigen::VectorXd z_;       // L^{-1} h̃ over the active set
  int dim_ = 0;
  double log_diag_sum_ = 0.0;
  double const_sum_ = 0.0;
  int toggles_ = 0;
  int refresh_interval_ = 0;
};

// Samples a_n in place. Entries with ρ = 0 or 1 are fixed without evaluation.
void collapsed_sample_adjacency(const FilteredSpikes& shat, const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& kappa, const NeuronPrior& prior,
                                Eigen::VectorXi& active, RngStream& rng);

// Gaussian-observation version with ω = 1/ν and κ = y/ν.
void gaussian_collapsed_sample_adjacency(const FilteredSpikes& shat,
                                         const Eigen::VectorXd& observations, double noise_var,
                                         const NeuronPrior& prior, Eigen::VectorXi& active,
                                         RngStream& rng);

// ---- network latent and global updates -------------------------------------

// Unnormalized log p(label_n = c | rest) for each class.
std::vector<double> sbm_adjacency_label_logits(int n, const Eigen::MatrixXi& adjacency,
                                               const SbmAdjacency& sbm);
std::vector<double> sbm_weight_label_logits(int n, const NetworkState& net,
                                            const SbmWeights& sbm);

// Updates every SBM label set present in the spec, one neuron at a time.
void sample_sbm_assignments(const NetworkState& net, PriorSpec& spec, RngStream& rng);
int sample_sbm_assignment(int n, const NetworkState& net, PriorSpec& spec, RngStream& rng);

void sample_sbm_params(const NetworkState& net, PriorSpec& spec, RngStream& rng);
void sample_independent_params(const NetworkState& net, PriorSpec& spec, RngStream& rng);

// Beta posterior parameters for an edge probability given present/absent counts.
std::pair<double, double> beta_posterior(const BetaPrior& prior, long present, long absent);

// Log density (and gradient) of the adjacency-distance latents packed as
// [vec(U) row-major, γ₀] given A.
double distance_adjacency_log_density(const Eigen::VectorXd& params,
                                      const Eigen::MatrixXi& adjacency, int dim,
                                      double location_var, const Hyperpriors& hyper,
                                      Eigen::VectorXd& grad);

// Log density (and gradient) of the weight-distance locations packed as vec(V)
// row-major, given present-edge weights.
double distance_weight_log_density(const Eigen::VectorXd& params, const NetworkState& net,
                                   int dim, const DistanceWeights& prior, Eigen::VectorXd& grad);

struct HmcSettings {
  double step_size = 0.01;
  int leapfrog_steps = 10;
};

// One HMC transition on the distance-model locations (and γ₀ for adjacency).
HmcResult hmc_locations(PriorSpec& spec, const NetworkState& net, bool adjacency_side,
                        const HmcSettings& settings, RngStream& rng);

// Conjugate draws for the distance model: location scales (inverse gamma)
// and the weight baseline (μ₀, σ²) (normal inverse gamma).
void sample_distance_hypers(const NetworkState& net, PriorSpec& spec, RngStream& rng);

// ---- observation parameters ------------------------------------------------

// Chinese restaurant table count: Σ_{i=1}^{s} Bernoulli(ν / (ν + i - 1)).
long sample_crt(long s, double nu, RngStream& rng);

double sample_nu_negbinomial(const Eigen::Ref<const Eigen::VectorXi>& counts,
                             const Eigen::Ref<const Eigen::VectorXd>& psi, double nu,
                             double prior_shape, double prior_rate, RngStream& rng);

// ---- sweeps and chains -----------------------------------------------------

struct UpdateToggles {
  bool omega = true;
  bool adjacency = true;
  bool weights = true;
  bool observation = true;
  bool latents = true;
  bool globals = true;

  static UpdateToggles none() { return {false, false, false, false, false, false}; }
  bool operator==(const UpdateToggles&) const = default;
};

struct SweepConfig {
  int iterations = 1000;
  int burn_in = 500;
  int thin = 1;
  double hmc_step_size = 0.01;
  int hmc_leapfrog_steps = 10;
  bool hmc_adapt = true;
  std::uint64_t seed = 1;
  int threads = 1;
  UpdateToggles toggles;

  void validate() const;
  // Whether the state after `iteration` completed sweeps is kept.
  bool retains(int iteration) const {
    return iteration > burn_in && (iteration - burn_in) % thin == 0;
  }
};

struct ChainState {
  NetworkState net;
  PriorSpec spec;
  ObsModel obs;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd omega;
  DualAveraging hmc_adjacency;
  DualAveraging hmc_weights;
  int iteration = 0;  // completed sweeps
};

struct PhaseTimes {
  double obs = 0.0;  // auxiliary variable sampling
  double net = 0.0;  // everything touching the network
};

// Initial state: θ and latents from the hyperpriors, empty adjacency (full
// for the dense prior), biases at the empirical log-odds, weights from the
// prior.
ChainState initialize_state(const SpikeData& spikes, const FilteredSpikes& shat,
                            const ObsModel& obs, AdjacencyKind adjacency, WeightKind weights,
                            const Hyperpriors& hyper, int classes, int dim, std::uint64_t seed);

double joint_log_probability(const ChainState& state, const SpikeData& spikes);

// One systematic-scan sweep: ω, per-neuron (a_n, w_n), ν, latents, globals,
// then a refresh of absent-edge weights from their prior.
PhaseTimes sweep(ChainState& state, const SpikeData& spikes, const FilteredSpikes& shat,
                 const SweepConfig& config);

struct Sample {
  int iteration = 0;
  NetworkState net;
  PriorSpec spec;
  Eigen::VectorXd nu;
  double log_prob = 0.0;
};

struct Chain {
  std::uint64_t seed = 0;
  std::vector<Sample> samples;
};

struct ProgressRecord {
  int iteration = 0;
  double log_prob = 0.0;
  PhaseTimes times;

  std::string format() const;
};

using ProgressCallback = std::function<void(const ProgressRecord&, const ChainState&)>;

// Runs sweeps until state.iteration == config.iterations, retaining every
// `thin`-th sample after burn-in. Resumes from state.iteration.
Chain run_chain(ChainState& state, const SpikeData& spikes, const FilteredSpikes& shat,
                const SweepConfig& config, const ProgressCallback& progress = {});

}  // namespace nglm
