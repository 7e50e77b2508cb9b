#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nglm/math.hpp"
#include "nglm/rng.hpp"
#include "nglm/types.hpp"

namespace nglm {

// ---- adjacency priors ------------------------------------------------------

struct DenseAdjacency {};

struct IndependentAdjacency {
  double rho = 0.5;
};

// Class-pair edge probabilities rho(c, c') for an edge from class c to c'.
struct SbmAdjacency {
  Eigen::VectorXd pi;
  Eigen::MatrixXd rho;
  std::vector<int> labels;

  int classes() const { return static_cast<int>(pi.size()); }
};

// Edge log-odds gamma0 - ||u_m - u_n||², locations u_n ~ N(0, location_var I).
struct DistanceAdjacency {
  Eigen::MatrixXd locations;  // N x D
  double gamma0 = 0.0;
  double location_var = 1.0;
};

using AdjacencyPrior =
    std::variant<DenseAdjacency, IndependentAdjacency, SbmAdjacency, DistanceAdjacency>;

// ---- weight priors ---------------------------------------------------------

// Shared (mean, covariance) for every connection.
struct IndependentWeights {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Block (c, c') stored at index c * C + c'.
struct SbmWeights {
  Eigen::VectorXd pi;
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;
  std::vector<int> labels;

  int classes() const { return static_cast<int>(pi.size()); }
};

// Mean mu0 - ||v_m - v_n||² on every basis coefficient, covariance variance·I,
// locations v_n ~ N(0, location_var I).
struct DistanceWeights {
  Eigen::MatrixXd locations;
  double mu0 = 0.0;
  double variance = 1.0;
  double location_var = 1.0;
  int num_basis = 1;
};

using WeightPrior = std::variant<IndependentWeights, SbmWeights, DistanceWeights>;

enum class AdjacencyKind { kDense, kIndependent, kSbm, kDistance };
enum class WeightKind { kIndependent, kSbm, kDistance };

std::string_view to_string(AdjacencyKind kind);
std::string_view to_string(WeightKind kind);
AdjacencyKind parse_adjacency_kind(std::string_view name);
WeightKind parse_weight_kind(std::string_view name);
AdjacencyKind kind_of(const AdjacencyPrior& prior);
WeightKind kind_of(const WeightPrior& prior);

// Hyperparameters of every prior family. Only those relevant to the active
// variants are used.
struct Hyperpriors {
  BetaPrior rho{1.0, 1.0};
  double pi_alpha = 1.0;
  NormalInverseWishart weights = NormalInverseWishart::isotropic(1, 0.0, 1.0, 0.5, 4.0);
  NormalInverseGamma distance_baseline{0.0, 1.0, 3.0, 0.5};
  InverseGamma location_scale{3.0, 2.0};
  bool learn_location_scale = true;
  double fixed_location_var = 100.0;  // used when the scale is not learned
  double gamma0_mean = 0.0;
  double gamma0_var = 9.0;
  // Bias prior N(bias_mean, bias_var) is fixed unless learn_bias is set, in
  // which case its mean and variance get a normal-inverse-gamma hyperprior.
  bool learn_bias = true;
  NormalInverseGamma bias_hyper{0.0, 0.01, 2.0, 0.5};
  double bias_mean = 0.0;
  double bias_var = 4.0;
  double nu_shape = 2.0;  // gamma prior on the negative-binomial shape
  double nu_rate = 0.5;
};

struct BiasPrior {
  double mean = 0.0;
  double variance = 4.0;
};

struct PriorSpec {
  AdjacencyPrior adjacency;
  WeightPrior weights;
  Hyperpriors hyper;
  BiasPrior bias;

  std::string name() const;
};

// Per-neuron prior for the incoming connections of neuron n.
struct NeuronPrior {
  Eigen::VectorXd rho;                 // N edge probabilities
  Eigen::VectorXd mean;                // 1 + N*K stacked prior mean
  std::vector<Eigen::MatrixXd> blocks; // bias (1x1) then one KxK block per source

  Eigen::MatrixXd dense_covariance() const;
};

double edge_probability(const AdjacencyPrior& prior, int m, int n);

std::pair<Eigen::VectorXd, Eigen::MatrixXd> weight_moments(const WeightPrior& prior, int m,
                                                           int n);

// log p(A, W, b | latents, θ). Weights of absent edges do not contribute.
double log_prior(const NetworkState& net, const PriorSpec& spec);

// Log density of the latent variables and global parameters under the
// hyperpriors.
double log_hyperprior(const PriorSpec& spec);

NeuronPrior neuron_prior_vectors(const PriorSpec& spec, int n, int num_neurons, int num_basis);

// Draws θ and the per-neuron latents from the hyperpriors.
PriorSpec sample_prior_spec(AdjacencyKind adjacency, WeightKind weights, const Hyperpriors& hyper,
                            int num_neurons, int num_basis, int classes, int dim,
                            RngStream& rng);

}  // namespace nglm
