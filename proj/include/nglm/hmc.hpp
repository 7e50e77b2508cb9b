#pragma once

#include <functional>

#include <Eigen/Dense>

#include "nglm/rng.hpp"

namespace nglm {

// Log density and its gradient at x. Returns -inf or a non-finite gradient
// when x is outside the support.
using LogDensityFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct HmcResult {
  bool accepted = false;
  double accept_prob = 0.0;
  double log_density = 0.0;
};

// One HMC transition with an identity mass matrix and L leapfrog steps.
HmcResult hmc_step(Eigen::VectorXd& x, const LogDensityFn& log_density, double step_size,
                   int leapfrog_steps, RngStream& rng);

// Nesterov dual averaging of log step size toward a target acceptance rate.
struct DualAveraging {
  double step_size = 0.01;
  double target_accept = 0.65;
  double gamma = 0.05;
  double t0 = 10.0;
  double kappa = 0.75;
  double mu = 0.0;
  double log_step_bar = 0.0;
  double h_bar = 0.0;
  int count = 0;

  void restart(double initial_step);
  void update(double accept_prob);
  // Freezes the step size at the averaged iterate.
  void finalize();
};

}  // namespace nglm
