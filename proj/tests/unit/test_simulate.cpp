#include <cmath>

#include "doctest.h"
#include "nglm/errors.hpp"
#include "nglm/gibbs.hpp"
#include "nglm/simulate.hpp"

using namespace nglm;

namespace {

const Basis kBasis = exponential_basis(5.0, 1.0, 10);

double rate(const SpikeData& s) { return s.counts.cast<double>().mean(); }

}  // namespace

TEST_CASE("sampled networks") {
  RngStream rng(1, Phase::kTest);
  PriorSpec dense;
  dense.adjacency = DenseAdjacency{};
  dense.weights = IndependentWeights{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  CHECK(sample_network(dense, 10, 1, rng).adjacency.isOnes());

  PriorSpec ind = dense;
  ind.adjacency = IndependentAdjacency{0.3};
  const auto net = sample_network(ind, 50, 1, rng);
  const double density = net.adjacency.cast<double>().mean();
  CHECK(std::fabs(density - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / 2500.0));

  // two clusters 10 units apart
  DistanceAdjacency d;
  d.gamma0 = 2.0;
  d.locations = Eigen::MatrixXd::Zero(40, 2);
  for (int i = 0; i < 40; ++i) {
    d.locations(i, 0) = (i < 20 ? 0.0 : 10.0) + 0.3 * rng.normal();
    d.locations(i, 1) = 0.3 * rng.normal();
  }
  PriorSpec dist = dense;
  dist.adjacency = d;
  const auto dn = sample_network(dist, 40, 1, rng);
  const double within = (dn.adjacency.topLeftCorner(20, 20).cast<double>().mean() +
                         dn.adjacency.bottomRightCorner(20, 20).cast<double>().mean()) / 2;
  const double between = dn.adjacency.topRightCorner(20, 20).cast<double>().mean();
  CHECK(within > between);
}

TEST_CASE("spike simulation rates") {
  RngStream rng(2, Phase::kTest);
  auto net = NetworkState::empty(4, 1);
  const auto obs = ObsModel::uniform(CountKind::kBernoulli, 4);
  auto s = simulate_spikes(net, 20000, obs, kBasis, 1.0, rng, 1.0);
  CHECK(std::fabs(rate(s) - 0.5) < 3.0 * std::sqrt(0.25 / 80000.0));

  net.bias.setConstant(-2.0);
  s = simulate_spikes(net, 50000, obs, kBasis, 1.0, rng);
  const double p = 1.0 / (1.0 + std::exp(2.0));
  CHECK(p == doctest::Approx(0.1192).epsilon(1e-3));
  CHECK(std::fabs(rate(s) - p) < 3.0 * std::sqrt(p * (1 - p) / 200000.0));
}

TEST_CASE("negative self connection is refractory") {
  RngStream rng(3, Phase::kTest);
  auto net = NetworkState::empty(1, 1);
  net.bias(0) = -1.0;
  net.adjacency(0, 0) = 1;
  net.weights(0, 0) = -4.0;
  const auto s = simulate_spikes(net, 50000, ObsModel::uniform(CountKind::kBernoulli, 1), kBasis,
                                 1.0, rng);
  double after_spike = 0, n_spike = 0, after_quiet = 0, n_quiet = 0;
  for (int t = 0; t + 1 < s.num_bins(); ++t) {
    if (s.counts(t, 0)) {
      after_spike += s.counts(t + 1, 0);
      ++n_spike;
    } else {
      after_quiet += s.counts(t + 1, 0);
      ++n_quiet;
    }
  }
  CHECK(after_spike / n_spike < after_quiet / n_quiet);
}

TEST_CASE("stability guard") {
  RngStream rng(4, Phase::kTest);
  auto net = NetworkState::empty(3, 1);
  net.adjacency.setOnes();
  net.weights.setConstant(3.0);
  net.bias.setConstant(-2.0);
  CHECK_THROWS_AS(simulate_spikes(net, 5000, ObsModel::uniform(CountKind::kBernoulli, 3), kBasis,
                                  1.0, rng),
                  NumericalError);
}

TEST_CASE("count models simulate at their means") {
  RngStream rng(5, Phase::kTest);
  auto net = NetworkState::empty(2, 1);
  net.bias.setConstant(-0.5);
  const auto nb = ObsModel::uniform(CountKind::kNegativeBinomial, 2, 3.0);
  auto s = simulate_spikes(net, 20000, nb, kBasis, 1.0, rng, 100.0);
  CHECK(rate(s) == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(0.03));
  const auto bin = ObsModel::uniform(CountKind::kBinomial, 2, 4.0);
  s = simulate_spikes(net, 20000, bin, kBasis, 1.0, rng, 100.0);
  CHECK(rate(s) == doctest::Approx(4.0 / (1.0 + std::exp(0.5))).epsilon(0.02));
  CHECK(s.counts.maxCoeff() <= 4);
}

TEST_CASE("simulation is causal") {
  const auto g = make_synthetic_benchmark(6, 3000, 7);
  RngStream a(8, Phase::kTest);
  RngStream b(8, Phase::kTest);
  const auto full = simulate_spikes(g.net, 3000, g.obs, g.basis, 1.0, a);
  const auto part = simulate_spikes(g.net, 2000, g.obs, g.basis, 1.0, b);
  CHECK(full.counts.topRows(2000) == part.counts);
}

TEST_CASE("synthetic benchmark") {
  const auto g = make_synthetic_benchmark(BenchmarkScale::kDesk, 11);
  CHECK(g.spikes.num_neurons() == 20);
  CHECK(g.spikes.num_bins() == 50000);
  CHECK(g.spikes.counts.maxCoeff() <= 1);
  CHECK(kind_of(g.spec.adjacency) == AdjacencyKind::kDistance);
  CHECK(kind_of(g.spec.weights) == WeightKind::kSbm);
  const auto again = make_synthetic_benchmark(BenchmarkScale::kDesk, 11);
  CHECK(again.spikes.counts == g.spikes.counts);
  CHECK(again.net == g.net);
  CHECK(g.psi == activation_matrix(filter_spikes(g.spikes, g.basis), g.net));
  const double r = rate(g.spikes);
  CHECK(r > 0.01);
  CHECK(r < 0.2);
  CHECK(parse_benchmark_scale("paper") == BenchmarkScale::kPaper);
  CHECK_THROWS_AS(parse_benchmark_scale("huge"), ConfigError);
}

TEST_CASE("generating spec scores its data better than a mismatched one") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = make_synthetic_benchmark(8, 500, seed);
    PriorSpec wrong = g.spec;
    auto& w = std::get<SbmWeights>(wrong.weights);
    for (auto& m : w.mean) m = -m;
    const double matched = log_prior(g.net, g.spec);
    const double mismatched = log_prior(g.net, wrong);
    CHECK(std::isfinite(matched));
    wins += matched > mismatched;
  }
  CHECK(wins >= 9);
}
