#include "nglm/hmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nglm {

HmcResult hmc_step(Eigen::VectorXd& x, const LogDensityFn& log_density, double step_size,
                   int leapfrog_steps, RngStream& rng) {
  HmcResult result;
  Eigen::VectorXd grad(x.size());
  const double logp0 = log_density(x, grad);
  result.log_density = logp0;
  if (!std::isfinite(logp0) || !grad.allFinite()) return result;

  Eigen::VectorXd p(x.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = rng.normal();
  const double h0 = -logp0 + 0.5 * p.squaredNorm();

  Eigen::VectorXd q = x;
  Eigen::VectorXd g = grad;
  double logp = logp0;
  p += 0.5 * step_size * g;
  for (int l = 0; l < leapfrog_steps; ++l) {
    q += step_size * p;
    logp = log_density(q, g);
    if (!std::isfinite(logp) || !g.allFinite()) {
      // Divergent trajectory; reject.
      return result;
    }
    if (l + 1 < leapfrog_steps) p += step_size * g;
  }
  p += 0.5 * step_size * g;
  const double h1 = -logp + 0.5 * p.squaredNorm();
  const double log_ratio = h0 - h1;
  result.accept_prob = std::isfinite(log_ratio) ? std::min(1.0, std::exp(log_ratio)) : 0.0;
  if (rng.uniform() < result.accept_prob) {
    x = q;
    result.accepted = true;
    result.log_density = logp;
  }
  return result;
}

void DualAveraging::restart(double initial_step) {
  step_size = initial_step;
  mu = std::log(10.0 * initial_step);
  log_step_bar = std::log(initial_step);
  h_bar = 0.0;
  count = 0;
}

void DualAveraging::update(double accept_prob) {
  ++count;
  const double m = static_cast<double>(count);
  const double eta = 1.0 / (m + t0);
  h_bar = (1.0 - eta) * h_bar + eta * (target_accept - accept_prob);
  const double log_step = mu - std::sqrt(m) / gamma * h_bar;
  const double w = std::pow(m, -kappa);
  log_step_bar = w * log_step + (1.0 - w) * log_step_bar;
  step_size = std::exp(log_step);
}

void DualAveraging::finalize() {
  if (count > 0) step_size = std::exp(log_step_bar);
}

}  // namespace nglm
