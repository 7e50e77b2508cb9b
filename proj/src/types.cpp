#include "nglm/types.hpp"

namespace nglm {

NetworkState NetworkState::empty(int num_neurons, int num_basis) {
  NetworkState net;
  net.num_basis = num_basis;
  net.adjacency = Eigen::MatrixXi::Zero(num_neurons, num_neurons);
  net.weights = Eigen::MatrixXd::Zero(num_neurons, num_neurons * num_basis);
  net.bias = Eigen::VectorXd::Zero(num_neurons);
  return net;
}

Eigen::VectorXd NetworkState::mask(Eigen::Index n) const {
  const int nn = num_neurons();
  Eigen::VectorXd a(regressors());
  a(0) = 1.0;
  for (int m = 0; m < nn; ++m) {
    a.segment(1 + m * num_basis, num_basis).setConstant(adjacency(m, n) ? 1.0 : 0.0);
  }
  return a;
}

Eigen::VectorXd NetworkState::stacked_weights(Eigen::Index n) const {
  const int nn = num_neurons();
  Eigen::VectorXd w(regressors());
  w(0) = bias(n);
  for (int m = 0; m < nn; ++m) w.segment(1 + m * num_basis, num_basis) = weight(m, n);
  return w;
}

void NetworkState::set_stacked_weights(Eigen::Index n, const Eigen::VectorXd& w) {
  const int nn = num_neurons();
  bias(n) = w(0);
  for (int m = 0; m < nn; ++m) weight(m, n) = w.segment(1 + m * num_basis, num_basis);
}

bool NetworkState::operator==(const NetworkState& other) const {
  return num_basis == other.num_basis && adjacency == other.adjacency &&
         weights == other.weights && bias == other.bias;
}

}  // namespace nglm
