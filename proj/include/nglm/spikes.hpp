#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "nglm/rng.hpp"

namespace nglm {

enum class CountKind { kBernoulli, kBinomial, kNegativeBinomial };

std::string_view to_string(CountKind kind);
CountKind parse_count_kind(std::string_view name);

// Count distribution for a single neuron. `nu` is the binomial trial count
// or the negative-binomial shape; it is 1 and ignored for Bernoulli.
struct CountModel {
  CountKind kind = CountKind::kBernoulli;
  double nu = 1.0;

  void validate() const;
  void check_count(std::int64_t s) const;
};

// Observation model shared by all neurons of a fit; ν may differ per neuron.
struct ObsModel {
  CountKind kind = CountKind::kBernoulli;
  Eigen::VectorXd nu;

  static ObsModel uniform(CountKind kind, int num_neurons, double nu = 1.0);
  CountModel neuron(Eigen::Index n) const { return {kind, nu(n)}; }
  int num_neurons() const { return static_cast<int>(nu.size()); }
};

// p(s | ψ) = c (e^ψ)^a / (1 + e^ψ)^b with κ = a - b/2. c is kept as log c.
struct StandardForm {
  double a = 0.0;
  double b = 1.0;
  double log_c = 0.0;
  double kappa = 0.0;

  double log_density(double psi) const;
};

StandardForm standard_form(std::int64_t s, const CountModel& model);

// Direct evaluation of the count pmf, stable for |ψ| well past 500.
double log_likelihood(std::int64_t s, double psi, const CountModel& model);

std::pair<double, double> mean_variance(double psi, const CountModel& model);

std::int64_t sample_count(double psi, const CountModel& model, RngStream& rng);

}  // namespace nglm
