#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nglm/network.hpp"
#include "nglm/simulate.hpp"

using namespace nglm;

namespace {

PriorSpec independent_spec(double rho, double mean, double var) {
  PriorSpec spec;
  spec.adjacency = IndependentAdjacency{rho};
  spec.weights = IndependentWeights{Eigen::VectorXd::Constant(1, mean),
                                    Eigen::MatrixXd::Constant(1, 1, var)};
  return spec;
}

double logn(double x, double m, double v) {
  return -0.5 * std::log(2.0 * M_PI * v) - 0.5 * (x - m) * (x - m) / v;
}

}  // namespace

TEST_CASE("edge probabilities") {
  CHECK(edge_probability(DenseAdjacency{}, 0, 3) == 1.0);
  CHECK(edge_probability(IndependentAdjacency{0.3}, 2, 1) == 0.3);
  DistanceAdjacency d;
  d.locations = Eigen::MatrixXd::Zero(3, 2);
  d.locations(1, 0) = 1.0;
  d.locations(1, 1) = 1.0;
  d.gamma0 = 0.0;
  CHECK(edge_probability(d, 0, 2) == doctest::Approx(0.5));
  CHECK(edge_probability(d, 0, 1) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))));
  CHECK(edge_probability(d, 0, 1) == doctest::Approx(0.1192).epsilon(1e-3));
  SbmAdjacency s;
  s.pi = Eigen::Vector2d(0.5, 0.5);
  s.rho.resize(2, 2);
  s.rho << 0.9, 0.2, 0.1, 0.7;
  s.labels = {0, 1, 1};
  CHECK(edge_probability(s, 0, 1) == 0.2);
  CHECK(edge_probability(s, 1, 0) == 0.1);
  CHECK(edge_probability(s, 2, 1) == 0.7);
}

TEST_CASE("weight moments") {
  const auto spec = independent_spec(0.5, 0.3, 0.7);
  for (int m = 0; m < 3; ++m) {
    const auto [mu, cov] = weight_moments(spec.weights, m, 2 - m);
    CHECK(mu(0) == 0.3);
    CHECK(cov(0, 0) == 0.7);
  }
  DistanceWeights d;
  d.locations = Eigen::MatrixXd::Zero(2, 2);
  d.locations(1, 0) = 2.0;
  d.mu0 = 1.5;
  d.variance = 0.2;
  d.num_basis = 2;
  auto [mu, cov] = weight_moments(d, 0, 0);
  CHECK(mu.size() == 2);
  CHECK(mu(1) == 1.5);
  CHECK(cov.isApprox(0.2 * Eigen::Matrix2d::Identity()));
  std::tie(mu, cov) = weight_moments(d, 0, 1);
  CHECK(mu(0) == doctest::Approx(1.5 - 4.0));
  SbmWeights s;
  s.pi = Eigen::VectorXd::Ones(1);
  s.mean = {Eigen::VectorXd::Constant(1, -0.4)};
  s.cov = {Eigen::MatrixXd::Constant(1, 1, 0.3)};
  s.labels = {0, 0, 0, 0};
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      std::tie(mu, cov) = weight_moments(s, m, n);
      CHECK(mu(0) == -0.4);
      CHECK(cov(0, 0) == 0.3);
    }
}

TEST_CASE("log prior examples") {
  auto net = NetworkState::empty(2, 1);
  net.adjacency.setOnes();
  net.weights << 0.1, 0.2, -0.3, 0.4;
  net.bias << -1.0, 0.5;

  PriorSpec dense;
  dense.adjacency = DenseAdjacency{};
  dense.weights = independent_spec(0.5, 0.0, 1.0).weights;
  double weights_and_bias = 0.0;
  for (int i = 0; i < 4; ++i) weights_and_bias += logn(net.weights.data()[i], 0.0, 1.0);
  for (int n = 0; n < 2; ++n) weights_and_bias += logn(net.bias(n), 0.0, 4.0);
  CHECK(log_prior(net, dense) == doctest::Approx(weights_and_bias).epsilon(1e-13));

  auto spec = independent_spec(0.5, 0.0, 1.0);
  CHECK(log_prior(net, spec) - weights_and_bias == doctest::Approx(4.0 * std::log(0.5)));
  net.adjacency(0, 1) = 0;
  CHECK(log_prior(net, spec) - weights_and_bias + logn(net.weights(0, 1), 0.0, 1.0) ==
        doctest::Approx(4.0 * std::log(0.5)));
  CHECK(std::isinf(log_prior(net, dense)));
}

TEST_CASE("small SBM log prior term by term") {
  SbmAdjacency adj;
  adj.pi = Eigen::Vector2d(0.4, 0.6);
  adj.rho.resize(2, 2);
  adj.rho << 0.8, 0.3, 0.2, 0.6;
  adj.labels = {0, 1, 1};
  SbmWeights w;
  w.pi = Eigen::Vector2d(0.5, 0.5);
  const double means[4] = {1.0, -0.5, 0.25, -1.0};
  const double vars[4] = {0.5, 0.2, 1.0, 0.3};
  for (int i = 0; i < 4; ++i) {
    w.mean.push_back(Eigen::VectorXd::Constant(1, means[i]));
    w.cov.push_back(Eigen::MatrixXd::Constant(1, 1, vars[i]));
  }
  w.labels = {1, 0, 1};
  PriorSpec spec{adj, w, {}};

  auto net = NetworkState::empty(3, 1);
  net.adjacency << 1, 0, 1, 1, 1, 0, 0, 1, 1;
  net.weights << 0.3, -0.2, 0.9, 1.1, -0.7, 0.0, 0.05, 0.6, -1.2;
  net.bias << 0.1, -0.2, 0.3;

  double expected = 0.0;
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) {
      const double p = adj.rho(adj.labels[m], adj.labels[n]);
      const int a = net.adjacency(m, n);
      expected += a ? std::log(p) : std::log(1.0 - p);
      if (a) {
        const int idx = w.labels[m] * 2 + w.labels[n];
        expected += logn(net.weights(m, n), means[idx], vars[idx]);
      }
    }
  for (int n = 0; n < 3; ++n) expected += logn(net.bias(n), 0.0, 4.0);
  CHECK(log_prior(net, spec) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("neuron prior vectors") {
  const auto spec = independent_spec(0.4, 0.2, 0.5);
  const auto prior = neuron_prior_vectors(spec, 1, 3, 1);
  CHECK(prior.rho.size() == 3);
  CHECK((prior.rho.array() == 0.4).all());
  CHECK(prior.mean(0) == 0.0);
  CHECK(prior.mean(2) == 0.2);
  for (std::size_t i = 1; i < prior.blocks.size(); ++i) CHECK(prior.blocks[i](0, 0) == 0.5);
  const auto cov = prior.dense_covariance();
  CHECK(cov.rows() == 4);
  CHECK(cov(0, 0) == 4.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(cov(i, j) == 0.0);

  PriorSpec dense = spec;
  dense.adjacency = DenseAdjacency{};
  CHECK(neuron_prior_vectors(dense, 0, 5, 2).rho.isOnes());
  IndependentWeights k2{Eigen::Vector2d(0.1, -0.1), Eigen::Matrix2d{{0.5, 0.1}, {0.1, 0.4}}};
  dense.weights = k2;
  const auto p2 = neuron_prior_vectors(dense, 0, 3, 2);
  CHECK(p2.mean.size() == 7);
  const auto c2 = p2.dense_covariance();
  CHECK(c2.block(1, 3, 2, 2).isZero());
  CHECK(c2.block(3, 3, 2, 2).isApprox(k2.cov));
}

TEST_CASE("all twelve prior combinations") {
  const AdjacencyKind adjs[] = {AdjacencyKind::kDense, AdjacencyKind::kIndependent,
                                AdjacencyKind::kSbm, AdjacencyKind::kDistance};
  const WeightKind ws[] = {WeightKind::kIndependent, WeightKind::kSbm, WeightKind::kDistance};
  int combos = 0;
  for (auto a : adjs) {
    for (auto w : ws) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RngStream rng(seed, Phase::kTest);
        const auto spec = sample_prior_spec(a, w, Hyperpriors{}, 8, 1, 3, 2, rng);
        CHECK(kind_of(spec.adjacency) == a);
        CHECK(kind_of(spec.weights) == w);
        const auto net = sample_network(spec, 8, 1, rng);
        CHECK(std::isfinite(log_prior(net, spec)));
        CHECK(std::isfinite(log_hyperprior(spec)));
      }
      ++combos;
      CHECK(parse_adjacency_kind(to_string(a)) == a);
      CHECK(parse_weight_kind(to_string(w)) == w);
    }
  }
  CHECK(combos == 12);
}

TEST_CASE("relabeling equivariance") {
  RngStream rng(3, Phase::kTest);
  std::vector<int> perm{3, 0, 4, 1, 2};
  for (auto kind : {AdjacencyKind::kDense, AdjacencyKind::kIndependent, AdjacencyKind::kSbm,
                    AdjacencyKind::kDistance}) {
    auto spec = sample_prior_spec(kind, WeightKind::kIndependent, Hyperpriors{}, 5, 1, 2, 2, rng);
    AdjacencyPrior permuted = spec.adjacency;
    if (auto* s = std::get_if<SbmAdjacency>(&permuted)) {
      const auto labels = s->labels;
      for (int i = 0; i < 5; ++i) s->labels[i] = labels[perm[i]];
    }
    if (auto* d = std::get_if<DistanceAdjacency>(&permuted)) {
      const Eigen::MatrixXd loc = d->locations;
      for (int i = 0; i < 5; ++i) d->locations.row(i) = loc.row(perm[i]);
    }
    for (int m = 0; m < 5; ++m)
      for (int n = 0; n < 5; ++n)
        CHECK(edge_probability(permuted, m, n) ==
              doctest::Approx(edge_probability(spec.adjacency, perm[m], perm[n])).epsilon(1e-14));
  }
}

TEST_CASE("distance probabilities survive rigid motions") {
  RngStream rng(4, Phase::kTest);
  for (int trial = 0; trial < 20; ++trial) {
    auto spec = sample_prior_spec(AdjacencyKind::kDistance, WeightKind::kIndependent, Hyperpriors{},
                                  7, 1, 1, 3, rng);
    auto moved = std::get<DistanceAdjacency>(spec.adjacency);
    Eigen::Matrix3d random;
    for (int i = 0; i < 9; ++i) random.data()[i] = rng.normal();
    const Eigen::Matrix3d q = Eigen::HouseholderQR<Eigen::Matrix3d>(random).householderQ();
    const Eigen::RowVector3d shift(rng.normal() * 5, rng.normal() * 5, rng.normal() * 5);
    moved.locations = (moved.locations * q).rowwise() + shift;
    for (int m = 0; m < 7; ++m)
      for (int n = 0; n < 7; ++n)
        CHECK(edge_probability(moved, m, n) ==
              doctest::Approx(edge_probability(spec.adjacency, m, n)).epsilon(1e-10));
  }
}
