#include <cmath>
#include <vector>

#include "doctest.h"
#include "nglm/math.hpp"
#include "stats.hpp"

using namespace nglm;

TEST_CASE("log1pexp across its branches") {
  for (double x : {-800.0, -50.0, -37.0, -10.0, 0.0, 5.0, 18.0, 20.0, 33.3, 40.0, 800.0}) {
    const long double exact = std::log1p(std::exp(static_cast<long double>(x)));
    CHECK(log1pexp(x) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-15));
  }
  CHECK(log_sigmoid(-600.0) == doctest::Approx(-600.0));
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
}

TEST_CASE("log sum exp and categorical draws") {
  std::vector<double> v{1000.0, 1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
  std::vector<double> w{std::log(0.2), std::log(0.5), std::log(0.3)};
  RngStream rng(1, Phase::kTest);
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_categorical_log(w, rng)];
  CHECK(counts[1] / double(n) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(counts[0] / double(n) == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("gamma and beta moments") {
  RngStream rng(2, Phase::kTest);
  for (double shape : {0.3, 1.0, 4.5}) {
    std::vector<double> x(200000);
    for (auto& v : x) v = rng.gamma(shape, 2.0);
    CHECK(testing::mean(x) == doctest::Approx(shape / 2.0).epsilon(0.02));
    CHECK(testing::variance(x) == doctest::Approx(shape / 4.0).epsilon(0.04));
  }
  std::vector<double> b(100000);
  for (auto& v : b) v = rng.beta(4.0, 2.0);
  CHECK(testing::mean(b) == doctest::Approx(4.0 / 6.0).epsilon(0.01));
}

TEST_CASE("multivariate normal") {
  Eigen::Matrix2d cov{{2.0, 0.6}, {0.6, 1.0}};
  Eigen::Vector2d mean(1.0, -2.0);
  RngStream rng(3, Phase::kTest);
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sq = Eigen::Matrix2d::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d x = sample_mvn(mean, cov, rng);
    acc += x;
    sq += (x - mean) * (x - mean).transpose();
  }
  CHECK((acc / n - mean).norm() < 0.02);
  CHECK(((sq / n) - cov).cwiseAbs().maxCoeff() < 0.04);
  const double direct = -0.5 * (2 * std::log(2 * M_PI) + std::log(cov.determinant()));
  CHECK(log_mvn(mean, mean, cov) == doctest::Approx(direct));
}

TEST_CASE("conjugate updates") {
  InverseGamma ig{3.0, 2.0};
  std::vector<double> r{0.5, -1.0, 2.0};
  auto post = ig.posterior(r);
  CHECK(post.shape == 4.5);
  CHECK(post.rate == doctest::Approx(2.0 + 0.5 * (0.25 + 1.0 + 4.0)));
  std::vector<double> zeros(5, 0.0);
  CHECK(ig.posterior(zeros).rate == 2.0);

  NormalInverseGamma nig{0.0, 1.0, 2.0, 1.0};
  std::vector<double> y{1.0, 3.0};
  const auto np = nig.posterior(y);
  CHECK(np.kappa == 3.0);
  CHECK(np.mean == doctest::Approx(4.0 / 3.0));
  CHECK(np.shape == 3.0);
  // rate + ½Σ(y - ȳ)² + κ n (ȳ - m)² / (2(κ + n))
  CHECK(np.rate == doctest::Approx(1.0 + 1.0 + 1.0 * 2.0 * 4.0 / 6.0));

  auto niw = NormalInverseWishart::isotropic(1, 0.0, 1.0, 0.5, 4.0);
  const auto same = niw.posterior(Eigen::MatrixXd(0, 1));
  CHECK(same.kappa == niw.kappa);
  CHECK(same.dof == niw.dof);
  Eigen::MatrixXd obs(2, 1);
  obs << 1.0, 3.0;
  const auto p = niw.posterior(obs);
  CHECK(p.kappa == 3.0);
  CHECK(p.dof == 6.0);
  CHECK(p.mean(0) == doctest::Approx(4.0 / 3.0));
  CHECK(p.scale(0, 0) == doctest::Approx(0.5 + 2.0 + 2.0 * 4.0 / 3.0));

  // inverse-Wishart mean = scale / (dof - K - 1)
  RngStream rng(4, Phase::kTest);
  Eigen::Matrix2d scale{{1.0, 0.3}, {0.3, 2.0}};
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  const int n = 50000;
  for (int i = 0; i < n; ++i) acc += sample_inverse_wishart(scale, 8.0, rng);
  CHECK(((acc / n) - scale / 5.0).cwiseAbs().maxCoeff() < 0.02);
}
