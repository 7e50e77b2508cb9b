#include "nglm/activation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nglm {

int default_dt_max(double tau_ms, double bin_ms) {
  return static_cast<int>(std::ceil(5.0 * tau_ms / bin_ms));
}

Basis exponential_basis(double tau_ms, double bin_ms, int dt_max) {
  if (!(tau_ms > 0.0) || !(bin_ms > 0.0) || dt_max < 1) {
    throw std::invalid_argument("exponential_basis: tau, bin width and dt_max must be positive");
  }
  Basis basis;
  basis.phi.resize(dt_max, 1);
  for (int dt = 1; dt <= dt_max; ++dt) basis.phi(dt - 1, 0) = std::exp(-dt * bin_ms / tau_ms);
  return basis;
}

Basis exponential_basis(const std::vector<double>& taus_ms, double bin_ms, int dt_max) {
  if (taus_ms.empty()) throw std::invalid_argument("exponential_basis: no time constants");
  Basis basis;
  basis.phi.resize(dt_max, static_cast<Eigen::Index>(taus_ms.size()));
  for (std::size_t k = 0; k < taus_ms.size(); ++k) {
    basis.phi.col(static_cast<Eigen::Index>(k)) = exponential_basis(taus_ms[k], bin_ms, dt_max).phi;
  }
  return basis;
}

FilteredSpikes filter_spikes(const SpikeData& spikes, const Basis& basis) {
  const int t_bins = spikes.num_bins();
  const int n_neurons = spikes.num_neurons();
  const int k_basis = basis.num_basis();
  const int dt_max = basis.dt_max();
  FilteredSpikes out;
  out.num_neurons = n_neurons;
  out.num_basis = k_basis;
  out.shat = Eigen::MatrixXd::Zero(t_bins, 1 + n_neurons * k_basis);
  out.shat.col(0).setOnes();
  // Scatter each nonzero count forward; spike trains are sparse.
  for (int m = 0; m < n_neurons; ++m) {
    for (int t = 0; t < t_bins; ++t) {
      const int s = spikes.counts(t, m);
      if (s == 0) continue;
      const int last = std::min(dt_max, t_bins - 1 - t);
      for (int k = 0; k < k_basis; ++k) {
        auto col = out.shat.col(FilteredSpikes::column(m, k, k_basis));
        for (int dt = 1; dt <= last; ++dt) col(t + dt) += s * basis.phi(dt - 1, k);
      }
    }
  }
  return out;
}

double activation(const Eigen::Ref<const Eigen::RowVectorXd>& shat_row,
                  const Eigen::Ref<const Eigen::VectorXd>& mask,
                  const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (shat_row.size() != mask.size() || mask.size() != weights.size()) {
    throw std::domain_error("activation: length mismatch (shat " +
                            std::to_string(shat_row.size()) + ", mask " +
                            std::to_string(mask.size()) + ", weights " +
                            std::to_string(weights.size()) + ")");
  }
  return shat_row.dot(mask.cwiseProduct(weights).transpose());
}

namespace {

void check_shapes(const FilteredSpikes& shat, const NetworkState& net) {
  if (shat.num_neurons != net.num_neurons() || shat.num_basis != net.num_basis ||
      shat.shat.cols() != net.regressors()) {
    throw std::domain_error("activation_matrix: filtered spikes have " +
                            std::to_string(shat.shat.cols()) + " columns, network expects " +
                            std::to_string(net.regressors()));
  }
}

}  // namespace

Eigen::VectorXd activation_column(const FilteredSpikes& shat, const NetworkState& net,
                                  Eigen::Index n) {
  check_shapes(shat, net);
  const Eigen::VectorXd coef = net.mask(n).cwiseProduct(net.stacked_weights(n));
  return shat.shat * coef;
}

Eigen::MatrixXd activation_matrix(const FilteredSpikes& shat, const NetworkState& net) {
  check_shapes(shat, net);
  const int nn = net.num_neurons();
  Eigen::MatrixXd coef(net.regressors(), nn);
  for (int n = 0; n < nn; ++n) coef.col(n) = net.mask(n).cwiseProduct(net.stacked_weights(n));
  return shat.shat * coef;
}

}  // namespace nglm
