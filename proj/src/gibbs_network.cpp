#include <cmath>
#include <limits>
#include <stdexcept>

#include "nglm/gibbs.hpp"
#include "nglm/math.hpp"

namespace nglm {

namespace {

double log_bern_prob(int a, double p) {
  // Clamp so that a block probability of exactly 0 or 1 does not poison the
  // comparison of classes with -inf - (-inf).
  constexpr double kEps = 1e-300;
  return a ? std::log(std::max(p, kEps)) : std::log(std::max(1.0 - p, kEps));
}

Eigen::VectorXd class_counts(const std::vector<int>& labels, int classes) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(classes);
  for (int c : labels) counts(c) += 1.0;
  return counts;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<Eigen::VectorXd>& rows, int dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

Eigen::VectorXd pack_locations(const Eigen::MatrixXd& loc) {
  Eigen::VectorXd v(loc.size());
  for (Eigen::Index i = 0; i < loc.rows(); ++i) {
    for (Eigen::Index d = 0; d < loc.cols(); ++d) v(i * loc.cols() + d) = loc(i, d);
  }
  return v;
}

void unpack_locations(const Eigen::VectorXd& v, Eigen::MatrixXd& loc) {
  for (Eigen::Index i = 0; i < loc.rows(); ++i) {
    for (Eigen::Index d = 0; d < loc.cols(); ++d) loc(i, d) = v(i * loc.cols() + d);
  }
}

std::vector<double> coordinates(const Eigen::MatrixXd& loc) {
  return std::vector<double>(loc.data(), loc.data() + loc.size());
}

}  // namespace

// ---- stochastic block model ------------------------------------------------

std::vector<double> sbm_adjacency_label_logits(int n, const Eigen::MatrixXi& adjacency,
                                               const SbmAdjacency& sbm) {
  const int classes = sbm.classes();
  const int nn = static_cast<int>(adjacency.rows());
  std::vector<double> logits(classes);
  for (int c = 0; c < classes; ++c) {
    double v = std::log(sbm.pi(c));
    for (int m = 0; m < nn; ++m) {
      if (m == n) continue;
      const int cm = sbm.labels[m];
      v += log_bern_prob(adjacency(m, n), sbm.rho(cm, c));
      v += log_bern_prob(adjacency(n, m), sbm.rho(c, cm));
    }
    v += log_bern_prob(adjacency(n, n), sbm.rho(c, c));
    logits[c] = v;
  }
  return logits;
}

std::vector<double> sbm_weight_label_logits(int n, const NetworkState& net,
                                            const SbmWeights& sbm) {
  const int classes = sbm.classes();
  const int nn = net.num_neurons();
  std::vector<double> logits(classes);
  for (int c = 0; c < classes; ++c) {
    double v = std::log(sbm.pi(c));
    for (int m = 0; m < nn; ++m) {
      if (m == n) continue;
      const int cm = sbm.labels[m];
      if (net.adjacency(m, n)) {
        const int idx = cm * classes + c;
        v += log_mvn(net.weight(m, n), sbm.mean[idx], sbm.cov[idx]);
      }
      if (net.adjacency(n, m)) {
        const int idx = c * classes + cm;
        v += log_mvn(net.weight(n, m), sbm.mean[idx], sbm.cov[idx]);
      }
    }
    if (net.adjacency(n, n)) {
      const int idx = c * classes + c;
      v += log_mvn(net.weight(n, n), sbm.mean[idx], sbm.cov[idx]);
    }
    logits[c] = v;
  }
  return logits;
}

int sample_sbm_assignment(int n, const NetworkState& net, PriorSpec& spec, RngStream& rng) {
  int label = 0;
  if (auto* sbm = std::get_if<SbmAdjacency>(&spec.adjacency)) {
    const auto logits = sbm_adjacency_label_logits(n, net.adjacency, *sbm);
    label = sample_categorical_log(logits, rng);
    sbm->labels[n] = label;
  }
  if (auto* sbm = std::get_if<SbmWeights>(&spec.weights)) {
    const auto logits = sbm_weight_label_logits(n, net, *sbm);
    label = sample_categorical_log(logits, rng);
    sbm->labels[n] = label;
  }
  return label;
}

void sample_sbm_assignments(const NetworkState& net, PriorSpec& spec, RngStream& rng) {
  for (int n = 0; n < net.num_neurons(); ++n) sample_sbm_assignment(n, net, spec, rng);
}

std::pair<double, double> beta_posterior(const BetaPrior& prior, long present, long absent) {
  return {prior.alpha + static_cast<double>(present), prior.beta + static_cast<double>(absent)};
}

void sample_sbm_params(const NetworkState& net, PriorSpec& spec, RngStream& rng) {
  const Hyperpriors& h = spec.hyper;
  const int nn = net.num_neurons();
  if (auto* sbm = std::get_if<SbmAdjacency>(&spec.adjacency)) {
    const int classes = sbm->classes();
    const Eigen::VectorXd counts = class_counts(sbm->labels, classes);
    sbm->pi = sample_dirichlet(counts.array() + h.pi_alpha, rng);
    Eigen::MatrixXi present = Eigen::MatrixXi::Zero(classes, classes);
    Eigen::MatrixXi pairs = Eigen::MatrixXi::Zero(classes, classes);
    for (int m = 0; m < nn; ++m) {
      for (int n = 0; n < nn; ++n) {
        const int cm = sbm->labels[m];
        const int cn = sbm->labels[n];
        pairs(cm, cn) += 1;
        present(cm, cn) += net.adjacency(m, n);
      }
    }
    for (int c = 0; c < classes; ++c) {
      for (int d = 0; d < classes; ++d) {
        const auto [a, b] = beta_posterior(h.rho, present(c, d), pairs(c, d) - present(c, d));
        sbm->rho(c, d) = rng.beta(a, b);
      }
    }
  }
  if (auto* sbm = std::get_if<SbmWeights>(&spec.weights)) {
    const int classes = sbm->classes();
    const Eigen::VectorXd counts = class_counts(sbm->labels, classes);
    sbm->pi = sample_dirichlet(counts.array() + h.pi_alpha, rng);
    std::vector<std::vector<Eigen::VectorXd>> blocks(classes * classes);
    for (int m = 0; m < nn; ++m) {
      for (int n = 0; n < nn; ++n) {
        if (!net.adjacency(m, n)) continue;
        blocks[sbm->labels[m] * classes + sbm->labels[n]].push_back(net.weight(m, n));
      }
    }
    for (int i = 0; i < classes * classes; ++i) {
      // An empty block leaves the prior unchanged, so this is a prior draw.
      h.weights.posterior(rows_to_matrix(blocks[i], net.num_basis))
          .sample(sbm->mean[i], sbm->cov[i], rng);
    }
  }
}

void sample_independent_params(const NetworkState& net, PriorSpec& spec, RngStream& rng) {
  const Hyperpriors& h = spec.hyper;
  const int nn = net.num_neurons();
  if (auto* p = std::get_if<IndependentAdjacency>(&spec.adjacency)) {
    const long present = net.adjacency.sum();
    const long total = static_cast<long>(nn) * nn;
    const auto [a, b] = beta_posterior(h.rho, present, total - present);
    p->rho = rng.beta(a, b);
  }
  if (auto* p = std::get_if<IndependentWeights>(&spec.weights)) {
    std::vector<Eigen::VectorXd> rows;
    for (int m = 0; m < nn; ++m) {
      for (int n = 0; n < nn; ++n) {
        if (net.adjacency(m, n)) rows.push_back(net.weight(m, n));
      }
    }
    h.weights.posterior(rows_to_matrix(rows, net.num_basis)).sample(p->mean, p->cov, rng);
  }
  if (h.learn_bias) {
    const std::span<const double> biases(net.bias.data(), static_cast<std::size_t>(net.bias.size()));
    h.bias_hyper.posterior(biases).sample(spec.bias.mean, spec.bias.variance, rng);
  }
}

// ---- latent distance model ---------------------------------------------------

double distance_adjacency_log_density(const Eigen::VectorXd& params,
                                      const Eigen::MatrixXi& adjacency, int dim,
                                      double location_var, const Hyperpriors& hyper,
                                      Eigen::VectorXd& grad) {
  const int nn = static_cast<int>(adjacency.rows());
  const double gamma0 = params(nn * dim);
  grad = Eigen::VectorXd::Zero(params.size());
  double logp = 0.0;
  for (int m = 0; m < nn; ++m) {
    for (int n = 0; n < nn; ++n) {
      double d2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double diff = params(m * dim + k) - params(n * dim + k);
        d2 += diff * diff;
      }
      const double x = gamma0 - d2;
      const int a = adjacency(m, n);
      logp += a ? log_sigmoid(x) : log_sigmoid(-x);
      const double resid = a - sigmoid(x);
      grad(nn * dim) += resid;
      if (m == n) continue;
      for (int k = 0; k < dim; ++k) {
        const double diff = params(m * dim + k) - params(n * dim + k);
        grad(m * dim + k) += -2.0 * resid * diff;
        grad(n * dim + k) += 2.0 * resid * diff;
      }
    }
  }
  for (int i = 0; i < nn * dim; ++i) {
    logp += log_normal(params(i), 0.0, location_var);
    grad(i) -= params(i) / location_var;
  }
  logp += log_normal(gamma0, hyper.gamma0_mean, hyper.gamma0_var);
  grad(nn * dim) -= (gamma0 - hyper.gamma0_mean) / hyper.gamma0_var;
  return logp;
}

double distance_weight_log_density(const Eigen::VectorXd& params, const NetworkState& net,
                                   int dim, const DistanceWeights& prior, Eigen::VectorXd& grad) {
  const int nn = net.num_neurons();
  grad = Eigen::VectorXd::Zero(params.size());
  double logp = 0.0;
  for (int m = 0; m < nn; ++m) {
    for (int n = 0; n < nn; ++n) {
      if (!net.adjacency(m, n)) continue;
      double d2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double diff = params(m * dim + k) - params(n * dim + k);
        d2 += diff * diff;
      }
      const Eigen::VectorXd w = net.weight(m, n);
      double dlogp_dd2 = 0.0;
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double r = w(k) - prior.mu0 + d2;
        logp += -0.5 * (kLog2Pi + std::log(prior.variance)) - 0.5 * r * r / prior.variance;
        dlogp_dd2 -= r / prior.variance;
      }
      if (m == n) continue;
      for (int k = 0; k < dim; ++k) {
        const double diff = params(m * dim + k) - params(n * dim + k);
        grad(m * dim + k) += 2.0 * dlogp_dd2 * diff;
        grad(n * dim + k) -= 2.0 * dlogp_dd2 * diff;
      }
    }
  }
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    logp += log_normal(params(i), 0.0, prior.location_var);
    grad(i) -= params(i) / prior.location_var;
  }
  return logp;
}

HmcResult hmc_locations(PriorSpec& spec, const NetworkState& net, bool adjacency_side,
                        const HmcSettings& settings, RngStream& rng) {
  if (adjacency_side) {
    auto* p = std::get_if<DistanceAdjacency>(&spec.adjacency);
    if (!p) throw std::logic_error("hmc_locations: adjacency prior is not a distance model");
    const int dim = static_cast<int>(p->locations.cols());
    Eigen::VectorXd x(p->locations.size() + 1);
    x.head(p->locations.size()) = pack_locations(p->locations);
    x(p->locations.size()) = p->gamma0;
    const double var = p->location_var;
    const Hyperpriors& hyper = spec.hyper;
    const LogDensityFn fn = [&](const Eigen::VectorXd& q, Eigen::VectorXd& g) {
      return distance_adjacency_log_density(q, net.adjacency, dim, var, hyper, g);
    };
    HmcResult r = hmc_step(x, fn, settings.step_size, settings.leapfrog_steps, rng);
    unpack_locations(x.head(p->locations.size()), p->locations);
    p->gamma0 = x(p->locations.size());
    return r;
  }
  auto* p = std::get_if<DistanceWeights>(&spec.weights);
  if (!p) throw std::logic_error("hmc_locations: weight prior is not a distance model");
  const int dim = static_cast<int>(p->locations.cols());
  Eigen::VectorXd x = pack_locations(p->locations);
  const DistanceWeights& prior = *p;
  const LogDensityFn fn = [&](const Eigen::VectorXd& q, Eigen::VectorXd& g) {
    return distance_weight_log_density(q, net, dim, prior, g);
  };
  HmcResult r = hmc_step(x, fn, settings.step_size, settings.leapfrog_steps, rng);
  unpack_locations(x, p->locations);
  return r;
}

void sample_distance_hypers(const NetworkState& net, PriorSpec& spec, RngStream& rng) {
  const Hyperpriors& h = spec.hyper;
  if (auto* p = std::get_if<DistanceAdjacency>(&spec.adjacency)) {
    if (h.learn_location_scale) {
      const auto coords = coordinates(p->locations);
      p->location_var = h.location_scale.posterior(coords).sample(rng);
    }
  }
  if (auto* p = std::get_if<DistanceWeights>(&spec.weights)) {
    const int nn = net.num_neurons();
    std::vector<double> baseline;
    for (int m = 0; m < nn; ++m) {
      for (int n = 0; n < nn; ++n) {
        if (!net.adjacency(m, n)) continue;
        const double d2 = (p->locations.row(m) - p->locations.row(n)).squaredNorm();
        const Eigen::VectorXd w = net.weight(m, n);
        for (Eigen::Index k = 0; k < w.size(); ++k) baseline.push_back(w(k) + d2);
      }
    }
    h.distance_baseline.posterior(baseline).sample(p->mu0, p->variance, rng);
    if (h.learn_location_scale) {
      const auto coords = coordinates(p->locations);
      p->location_var = h.location_scale.posterior(coords).sample(rng);
    }
  }
}

}  // namespace nglm
