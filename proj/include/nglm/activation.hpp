#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nglm/types.hpp"

namespace nglm {

// Fixed impulse-response basis sampled on lags 1..dt_max; phi(dt - 1, k).
struct Basis {
  Eigen::MatrixXd phi;

  int num_basis() const { return static_cast<int>(phi.cols()); }
  int dt_max() const { return static_cast<int>(phi.rows()); }
};

// Lag count covering five time constants, so the truncated exponential keeps
// more than 99% of its mass.
int default_dt_max(double tau_ms, double bin_ms);

// Single exponential kernel φ[Δt] = exp(-Δt·bin/τ).
Basis exponential_basis(double tau_ms, double bin_ms, int dt_max);

// One exponential column per time constant.
Basis exponential_basis(const std::vector<double>& taus_ms, double bin_ms, int dt_max);

// Design matrix of lagged, basis-filtered spikes. Column 0 is the bias
// regressor; column 1 + m*K + k holds neuron m filtered by basis k. Row t
// only sees bins t - dt_max .. t - 1; earlier bins are treated as silent.
struct FilteredSpikes {
  Eigen::MatrixXd shat;
  int num_neurons = 0;
  int num_basis = 1;

  int num_bins() const { return static_cast<int>(shat.rows()); }
  static int column(int m, int k, int num_basis) { return 1 + m * num_basis + k; }
};

FilteredSpikes filter_spikes(const SpikeData& spikes, const Basis& basis);

// ψ = (a_n ⊙ w_n)ᵀ ŝ_t.
double activation(const Eigen::Ref<const Eigen::RowVectorXd>& shat_row,
                  const Eigen::Ref<const Eigen::VectorXd>& mask,
                  const Eigen::Ref<const Eigen::VectorXd>& weights);

Eigen::VectorXd activation_column(const FilteredSpikes& shat, const NetworkState& net,
                                  Eigen::Index n);

// T x N activations, one column per neuron.
Eigen::MatrixXd activation_matrix(const FilteredSpikes& shat, const NetworkState& net);

}  // namespace nglm
