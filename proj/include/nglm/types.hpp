#pragma once

#include <Eigen/Dense>

namespace nglm {

// Observed spike counts, T bins by N neurons.
struct SpikeData {
  Eigen::MatrixXi counts;
  double bin_ms = 1.0;

  int num_bins() const { return static_cast<int>(counts.rows()); }
  int num_neurons() const { return static_cast<int>(counts.cols()); }
};

// Spike-and-slab network: adjacency(m, n) = a_{m->n}, weight(m, n) is the
// K-vector w_{m->n}, bias(n) = b_n.
struct NetworkState {
  Eigen::MatrixXi adjacency;
  Eigen::MatrixXd weights;  // N x (N*K); column block n holds w_{.->n}
  Eigen::VectorXd bias;
  int num_basis = 1;

  static NetworkState empty(int num_neurons, int num_basis);

  int num_neurons() const { return static_cast<int>(bias.size()); }
  int regressors() const { return 1 + num_neurons() * num_basis; }

  auto weight(Eigen::Index m, Eigen::Index n) {
    return weights.block(m, n * num_basis, 1, num_basis).transpose();
  }
  auto weight(Eigen::Index m, Eigen::Index n) const {
    return weights.block(m, n * num_basis, 1, num_basis).transpose();
  }

  // a_n = [1, a_{1->n} 1_K, ..., a_{N->n} 1_K]
  Eigen::VectorXd mask(Eigen::Index n) const;
  // w_n = [b_n, w_{1->n}, ..., w_{N->n}]
  Eigen::VectorXd stacked_weights(Eigen::Index n) const;
  void set_stacked_weights(Eigen::Index n, const Eigen::VectorXd& w);

  bool operator==(const NetworkState& other) const;
};

}  // namespace nglm
