#include "nglm/network.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nglm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double squared_distance(const Eigen::MatrixXd& locations, int m, int n) {
  return (locations.row(m) - locations.row(n)).squaredNorm();
}

double log_label_prior(const Eigen::VectorXd& pi, const std::vector<int>& labels) {
  double v = 0.0;
  for (int c : labels) v += std::log(pi(c));
  return v;
}

double log_dirichlet(const Eigen::VectorXd& pi, double alpha) {
  const double c = static_cast<double>(pi.size());
  double v = std::lgamma(alpha * c) - c * std::lgamma(alpha);
  if (alpha != 1.0) v += (alpha - 1.0) * pi.array().log().sum();
  return v;
}

double log_locations(const Eigen::MatrixXd& locations, double var) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < locations.size(); ++i) {
    v += log_normal(locations.data()[i], 0.0, var);
  }
  return v;
}

}  // namespace

std::string_view to_string(AdjacencyKind kind) {
  switch (kind) {
    case AdjacencyKind::kDense:
      return "dense";
    case AdjacencyKind::kIndependent:
      return "independent";
    case AdjacencyKind::kSbm:
      return "sbm";
    case AdjacencyKind::kDistance:
      return "distance";
  }
  return "unknown";
}

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::kIndependent:
      return "independent";
    case WeightKind::kSbm:
      return "sbm";
    case WeightKind::kDistance:
      return "distance";
  }
  return "unknown";
}

AdjacencyKind parse_adjacency_kind(std::string_view name) {
  if (name == "dense") return AdjacencyKind::kDense;
  if (name == "independent") return AdjacencyKind::kIndependent;
  if (name == "sbm") return AdjacencyKind::kSbm;
  if (name == "distance") return AdjacencyKind::kDistance;
  throw std::invalid_argument("unknown adjacency prior '" + std::string(name) + "'");
}

WeightKind parse_weight_kind(std::string_view name) {
  if (name == "independent" || name == "dense") return WeightKind::kIndependent;
  if (name == "sbm") return WeightKind::kSbm;
  if (name == "distance") return WeightKind::kDistance;
  throw std::invalid_argument("unknown weight prior '" + std::string(name) + "'");
}

AdjacencyKind kind_of(const AdjacencyPrior& prior) {
  return static_cast<AdjacencyKind>(prior.index());
}

WeightKind kind_of(const WeightPrior& prior) { return static_cast<WeightKind>(prior.index()); }

std::string PriorSpec::name() const {
  return std::string(to_string(kind_of(adjacency))) + "+" +
         std::string(to_string(kind_of(weights)));
}

Eigen::MatrixXd NeuronPrior::dense_covariance() const {
  Eigen::Index dim = 0;
  for (const auto& b : blocks) dim += b.rows();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    cov.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return cov;
}

double edge_probability(const AdjacencyPrior& prior, int m, int n) {
  return std::visit(
      Overloaded{
          [](const DenseAdjacency&) { return 1.0; },
          [](const IndependentAdjacency& p) { return p.rho; },
          [&](const SbmAdjacency& p) { return p.rho(p.labels[m], p.labels[n]); },
          [&](const DistanceAdjacency& p) {
            return sigmoid(p.gamma0 - squared_distance(p.locations, m, n));
          },
      },
      prior);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> weight_moments(const WeightPrior& prior, int m,
                                                           int n) {
  return std::visit(
      Overloaded{
          [](const IndependentWeights& p) { return std::make_pair(p.mean, p.cov); },
          [&](const SbmWeights& p) {
            const int idx = p.labels[m] * p.classes() + p.labels[n];
            return std::make_pair(p.mean[idx], p.cov[idx]);
          },
          [&](const DistanceWeights& p) {
            const double mean = p.mu0 - squared_distance(p.locations, m, n);
            return std::make_pair(
                Eigen::VectorXd::Constant(p.num_basis, mean).eval(),
                (Eigen::MatrixXd::Identity(p.num_basis, p.num_basis) * p.variance).eval());
          },
      },
      prior);
}


double log_prior(const NetworkState& net, const PriorSpec& spec) {
  const int nn = net.num_neurons();
  double v = 0.0;
  for (int n = 0; n < nn; ++n) {
    for (int m = 0; m < nn; ++m) {
      const int a = net.adjacency(m, n);
      if (!std::holds_alternative<DenseAdjacency>(spec.adjacency)) {
        v += log_bernoulli(a, edge_probability(spec.adjacency, m, n));
      } else if (!a) {
        return -std::numeric_limits<double>::infinity();
      }
      if (a) {
        const auto [mean, cov] = weight_moments(spec.weights, m, n);
        v += log_mvn(net.weight(m, n), mean, cov);
      }
    }
    v += log_normal(net.bias(n), spec.bias.mean, spec.bias.variance);
  }
  return v;
}

double log_hyperprior(const PriorSpec& spec) {
  const Hyperpriors& h = spec.hyper;
  double v = std::visit(
      Overloaded{
          [](const DenseAdjacency&) { return 0.0; },
          [&](const IndependentAdjacency& p) { return h.rho.log_density(p.rho); },
          [&](const SbmAdjacency& p) {
            double acc = log_dirichlet(p.pi, h.pi_alpha) + log_label_prior(p.pi, p.labels);
            for (Eigen::Index i = 0; i < p.rho.size(); ++i) acc += h.rho.log_density(p.rho.data()[i]);
            return acc;
          },
          [&](const DistanceAdjacency& p) {
            double acc = log_locations(p.locations, p.location_var) +
                         log_normal(p.gamma0, h.gamma0_mean, h.gamma0_var);
            if (h.learn_location_scale) acc += h.location_scale.log_density(p.location_var);
            return acc;
          },
      },
      spec.adjacency);
  v += std::visit(
      Overloaded{
          [&](const IndependentWeights& p) { return h.weights.log_density(p.mean, p.cov); },
          [&](const SbmWeights& p) {
            double acc = log_dirichlet(p.pi, h.pi_alpha) + log_label_prior(p.pi, p.labels);
            for (std::size_t i = 0; i < p.mean.size(); ++i) {
              acc += h.weights.log_density(p.mean[i], p.cov[i]);
            }
            return acc;
          },
          [&](const DistanceWeights& p) {
            double acc = log_locations(p.locations, p.location_var) +
                         h.distance_baseline.log_density(p.mu0, p.variance);
            if (h.learn_location_scale) acc += h.location_scale.log_density(p.location_var);
            return acc;
          },
      },
      spec.weights);
  if (h.learn_bias) v += h.bias_hyper.log_density(spec.bias.mean, spec.bias.variance);
  return v;
}

NeuronPrior neuron_prior_vectors(const PriorSpec& spec, int n, int num_neurons, int num_basis) {
  NeuronPrior prior;
  prior.rho.resize(num_neurons);
  prior.mean.resize(1 + num_neurons * num_basis);
  prior.blocks.reserve(num_neurons + 1);
  prior.mean(0) = spec.bias.mean;
  prior.blocks.push_back(Eigen::MatrixXd::Constant(1, 1, spec.bias.variance));
  for (int m = 0; m < num_neurons; ++m) {
    prior.rho(m) = edge_probability(spec.adjacency, m, n);
    auto [mean, cov] = weight_moments(spec.weights, m, n);
    prior.mean.segment(1 + m * num_basis, num_basis) = mean;
    prior.blocks.push_back(std::move(cov));
  }
  return prior;
}

PriorSpec sample_prior_spec(AdjacencyKind adjacency, WeightKind weights, const Hyperpriors& hyper,
                            int num_neurons, int num_basis, int classes, int dim,
                            RngStream& rng) {
  PriorSpec spec;
  spec.hyper = hyper;
  if (hyper.learn_bias) {
    hyper.bias_hyper.sample(spec.bias.mean, spec.bias.variance, rng);
  } else {
    spec.bias = {hyper.bias_mean, hyper.bias_var};
  }
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(classes, hyper.pi_alpha);
  auto draw_labels = [&](const Eigen::VectorXd& pi) {
    std::vector<int> labels(num_neurons);
    const Eigen::VectorXd log_pi = pi.array().log();
    for (int& c : labels) {
      c = sample_categorical_log(std::span<const double>(log_pi.data(), log_pi.size()), rng);
    }
    return labels;
  };
  auto draw_locations = [&](double var) {
    Eigen::MatrixXd loc(num_neurons, dim);
    for (Eigen::Index i = 0; i < loc.size(); ++i) loc.data()[i] = std::sqrt(var) * rng.normal();
    return loc;
  };

  switch (adjacency) {
    case AdjacencyKind::kDense:
      spec.adjacency = DenseAdjacency{};
      break;
    case AdjacencyKind::kIndependent:
      spec.adjacency = IndependentAdjacency{rng.beta(hyper.rho.alpha, hyper.rho.beta)};
      break;
    case AdjacencyKind::kSbm: {
      SbmAdjacency p;
      p.pi = sample_dirichlet(alpha, rng);
      p.rho.resize(classes, classes);
      for (Eigen::Index i = 0; i < p.rho.size(); ++i) {
        p.rho.data()[i] = rng.beta(hyper.rho.alpha, hyper.rho.beta);
      }
      p.labels = draw_labels(p.pi);
      spec.adjacency = std::move(p);
      break;
    }
    case AdjacencyKind::kDistance: {
      DistanceAdjacency p;
      p.location_var = hyper.learn_location_scale ? hyper.location_scale.sample(rng)
                                                  : hyper.fixed_location_var;
      p.locations = draw_locations(p.location_var);
      p.gamma0 = hyper.gamma0_mean + std::sqrt(hyper.gamma0_var) * rng.normal();
      spec.adjacency = std::move(p);
      break;
    }
  }

  switch (weights) {
    case WeightKind::kIndependent: {
      IndependentWeights p;
      hyper.weights.sample(p.mean, p.cov, rng);
      spec.weights = std::move(p);
      break;
    }
    case WeightKind::kSbm: {
      SbmWeights p;
      p.pi = sample_dirichlet(alpha, rng);
      p.mean.resize(classes * classes);
      p.cov.resize(classes * classes);
      for (int i = 0; i < classes * classes; ++i) hyper.weights.sample(p.mean[i], p.cov[i], rng);
      p.labels = draw_labels(p.pi);
      spec.weights = std::move(p);
      break;
    }
    case WeightKind::kDistance: {
      DistanceWeights p;
      p.num_basis = num_basis;
      p.location_var = hyper.learn_location_scale ? hyper.location_scale.sample(rng)
                                                  : hyper.fixed_location_var;
      p.locations = draw_locations(p.location_var);
      hyper.distance_baseline.sample(p.mu0, p.variance, rng);
      spec.weights = std::move(p);
      break;
    }
  }
  return spec;
}

}  // namespace nglm
