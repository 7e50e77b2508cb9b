#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nglm/activation.hpp"
#include "nglm/gibbs.hpp"
#include "nglm/network.hpp"
#include "nglm/rng.hpp"
#include "nglm/spikes.hpp"
#include "nglm/types.hpp"

namespace nglm {

// ---- held-out neuron prediction -------------------------------------------

// Monte Carlo estimate of log p(s* | S) in nats for one held-out spike train.
// value = log Σ_q exp(terms[q]) - log Q.
struct PredictiveEstimate {
  double value = 0.0;
  int Q = 0;
  std::vector<double> terms;
  double std_error = 0.0;  // delta method on the mean of exp(terms)
  int num_bins = 0;

  double per_bin() const { return num_bins > 0 ? value / num_bins : 0.0; }
};

double log_mean_exp(const std::vector<double>& terms);
PredictiveEstimate aggregate_terms(std::vector<double> terms, int num_bins);

// The held-out neuron's incoming structure drawn from the network prior
// conditional on θ and the observed neurons' latents. Index N is the
// held-out neuron; edges from m in 0..N (self-edge last).
struct HeldOutDraw {
  PriorSpec spec;           // spec extended to N + 1 neurons
  Eigen::VectorXi adjacency;  // N + 1
  Eigen::MatrixXd weights;    // (N + 1) x K
  double bias = 0.0;
  double nu = 1.0;
};

PriorSpec extend_prior(const PriorSpec& spec, int num_neurons, RngStream& rng);

HeldOutDraw draw_heldout(const PriorSpec& spec, int num_neurons, int num_basis,
                         const CountModel& model, RngStream& rng);

// ψ* over all bins: observed history through the drawn incoming weights plus
// the held-out neuron's own filtered spikes through the self-edge.
Eigen::VectorXd heldout_activation(const HeldOutDraw& draw, const FilteredSpikes& observed,
                                   const Eigen::MatrixXd& own_filtered);

struct PredictOptions {
  CountModel model;  // ν is drawn from its gamma prior for negative binomial
  int Q = 0;         // 0: one term per retained sample
  int threads = 1;
};

// Samples are cycled round-robin when Q exceeds the chain length. Term q uses
// the stream (key, kPredict, q), so results do not depend on thread count.
PredictiveEstimate predictive_ll_heldout(const Chain& chain, const FilteredSpikes& observed,
                                         const Basis& basis, const SpikeData& heldout,
                                         const PredictOptions& options, RngStream& rng);

struct ModelFit {
  std::string name;
  const Chain* chain = nullptr;
};

struct ModelScore {
  std::string name;
  std::vector<PredictiveEstimate> per_neuron;
  double mean = 0.0;       // nats per held-out neuron
  double std_error = 0.0;
  double per_bin = 0.0;    // nats per held-out neuron per bin
  int rank = 0;            // 1 is best
};

// Every held-out neuron j is scored with the stream (seed, kPredict, 0, j)
// for every model, so identical chains tie exactly. Sorted best first.
std::vector<ModelScore> compare_models(const std::vector<ModelFit>& fits,
                                       const FilteredSpikes& observed, const Basis& basis,
                                       const SpikeData& heldout, const PredictOptions& options,
                                       std::uint64_t seed);

// Difference a - b in nats per neuron and its standard error.
std::pair<double, double> score_difference(const ModelScore& a, const ModelScore& b);

// ---- recovery metrics -------------------------------------------------------

Eigen::MatrixXd edge_marginals(const Chain& chain);

// Mann-Whitney AUC of marginals against truth over off-diagonal pairs, ties
// counted half. Empty when the truth has no positives or no negatives.
std::optional<double> adjacency_auc(const Eigen::MatrixXd& marginals,
                                    const Eigen::MatrixXi& truth);

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Upper-triangle pairwise Euclidean distances, pairs (m, n) with m < n.
Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& locations);

struct Procrustes {
  Eigen::MatrixXd aligned;  // N x D
  double scale = 1.0;
  double residual = 0.0;    // Σ ||aligned - target||²
};

// Orthogonal transform, isotropic scale and translation minimizing the squared
// error to `target`.
Procrustes procrustes(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

struct DistanceRecovery {
  double correlation = 0.0;
  Eigen::MatrixXd aligned;  // mean of the per-sample aligned locations
  double residual = 0.0;
  Eigen::VectorXd true_distances;
  Eigen::VectorXd inferred_distances;  // posterior mean
};

DistanceRecovery distance_recovery(const std::vector<Eigen::MatrixXd>& samples,
                                   const Eigen::MatrixXd& truth);

// Locations per retained sample from the adjacency-side or weight-side
// distance model. Samples without that prior are skipped.
std::vector<Eigen::MatrixXd> chain_locations(const Chain& chain, bool adjacency_side);

// Fraction of neuron pairs whose same/different relation matches the truth,
// averaged over samples.
double type_recovery(const std::vector<std::vector<int>>& samples,
                     const std::vector<int>& truth);

std::vector<std::vector<int>> chain_labels(const Chain& chain, bool adjacency_side);

}  // namespace nglm
