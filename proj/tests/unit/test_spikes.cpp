#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nglm/math.hpp"
#include "nglm/spikes.hpp"
#include "stats.hpp"

using namespace nglm;

namespace {

const CountModel kBern{CountKind::kBernoulli, 1.0};

CountModel binomial(double nu) { return {CountKind::kBinomial, nu}; }
CountModel negbin(double nu) { return {CountKind::kNegativeBinomial, nu}; }

// exp(log c + aψ - b log(1 + e^ψ)), written out without the library helpers.
double naive_standard(const StandardForm& f, double psi) {
  return std::exp(f.log_c) * std::pow(std::exp(psi), f.a) / std::pow(1.0 + std::exp(psi), f.b);
}

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("standard form table rows") {
  auto f = standard_form(1, kBern);
  CHECK(f.a == 1.0);
  CHECK(f.b == 1.0);
  CHECK(f.log_c == 0.0);
  CHECK(f.kappa == 0.5);

  f = standard_form(2, binomial(5));
  CHECK(f.a == 2.0);
  CHECK(f.b == 5.0);
  CHECK(f.kappa == -0.5);
  CHECK(std::exp(f.log_c) == doctest::Approx(10.0).epsilon(1e-12));

  f = standard_form(4, negbin(3));
  CHECK(f.a == 4.0);
  CHECK(f.b == 7.0);
  CHECK(f.kappa == 0.5);
  CHECK(std::exp(f.log_c) == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("invalid counts name the bound") {
  CHECK_THROWS_AS(standard_form(6, binomial(5)), std::domain_error);
  CHECK_THROWS_AS(standard_form(2, kBern), std::domain_error);
  CHECK_THROWS_AS(standard_form(-1, negbin(2)), std::domain_error);
  CHECK_THROWS_AS(log_likelihood(11, 0.0, binomial(10)), std::domain_error);
  try {
    standard_form(6, binomial(5));
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("nu = 5") != std::string::npos);
  }
  CHECK_THROWS_AS(binomial(2.5).validate(), std::domain_error);
  CHECK_THROWS_AS(negbin(0.0).validate(), std::domain_error);
  CHECK_NOTHROW(negbin(0.3).validate());
}

TEST_CASE("log likelihood examples") {
  CHECK(log_likelihood(1, 0.0, kBern) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(log_likelihood(10, 0.0, binomial(10)) ==
        doctest::Approx(10.0 * std::log(0.5)).epsilon(1e-13));

  // NB(ν=2): p(3|ψ=-1) = C(4,3) σ(-1)^3 σ(1)^2 with σ evaluated directly.
  const double p = 1.0 / (1.0 + std::exp(1.0));
  const double expected = std::log(choose(4, 3) * p * p * p * (1 - p) * (1 - p));
  CHECK(log_likelihood(3, -1.0, negbin(2)) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("log likelihood is finite far into the tails") {
  for (double psi : {-500.0, -100.0, -37.5, 37.5, 100.0, 500.0}) {
    CHECK(std::isfinite(log_likelihood(1, psi, kBern)));
    CHECK(std::isfinite(log_likelihood(0, psi, kBern)));
    CHECK(std::isfinite(log_likelihood(3, psi, binomial(7))));
    CHECK(std::isfinite(log_likelihood(3, psi, negbin(2.5))));
  }
  CHECK(log_likelihood(1, -500.0, kBern) == doctest::Approx(-500.0).epsilon(1e-14));
  CHECK(log_likelihood(0, 500.0, kBern) == doctest::Approx(-500.0).epsilon(1e-14));
}

TEST_CASE("mean and variance") {
  auto [m, v] = mean_variance(0.0, kBern);
  CHECK(m == doctest::Approx(0.5));
  CHECK(v == doctest::Approx(0.25));
  std::tie(m, v) = mean_variance(0.0, binomial(10));
  CHECK(m == doctest::Approx(5.0));
  CHECK(v == doctest::Approx(2.5));
  std::tie(m, v) = mean_variance(0.0, negbin(2));
  CHECK(m == doctest::Approx(2.0));
  CHECK(v == doctest::Approx(4.0));
  for (double psi : {-3.0, -0.5, 1.0, 2.0}) {
    auto [bm, bv] = mean_variance(psi, binomial(6));
    CHECK(bv < bm);
    auto [nm, nv] = mean_variance(psi, negbin(1.7));
    CHECK(nv > nm);
  }
}

TEST_CASE("sampling saturates and matches moments") {
  RngStream rng(11, Phase::kTest);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_count(50.0, kBern, rng) == 1);
    CHECK(sample_count(-50.0, binomial(4), rng) == 0);
  }
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_count(0.0, negbin(5), rng));
  const double band = 5.0 * 3.0 / std::sqrt(static_cast<double>(n)) * std::sqrt(2.0);
  CHECK(std::fabs(sum / n - 5.0) < band);

  sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(sample_count(0.7, binomial(9), rng));
    sum += s;
    sq += s * s;
  }
  const auto [bm, bv] = mean_variance(0.7, binomial(9));
  CHECK(std::fabs(sum / n - bm) < 4.0 * std::sqrt(bv / n));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(bv).epsilon(0.03));
}

TEST_CASE("standard form consistency over a grid") {
  double worst = 0.0;
  for (double nu : {1.0, 2.0, 5.0, 10.0}) {
    for (int s = 0; s <= 20; ++s) {
      for (double psi = -6.0; psi <= 6.0 + 1e-9; psi += 0.25) {
        std::vector<CountModel> models{negbin(nu)};
        if (s <= nu) models.push_back(binomial(nu));
        if (s <= 1 && nu == 1.0) models.push_back(kBern);
        for (const auto& model : models) {
          const auto f = standard_form(s, model);
          CHECK(f.kappa == f.a - f.b / 2.0);
          CHECK(f.b > 0.0);
          const double direct = std::exp(log_likelihood(s, psi, model));
          const double standard = naive_standard(f, psi);
          worst = std::max(worst, std::fabs(direct - standard) / standard);
        }
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("pmfs normalize") {
  for (double psi : {-4.0, -1.0, 0.0, 1.5}) {
    double total = std::exp(log_likelihood(0, psi, kBern)) + std::exp(log_likelihood(1, psi, kBern));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    for (double nu : {1.0, 7.0, 30.0}) {
      total = 0.0;
      for (int s = 0; s <= nu; ++s) total += std::exp(log_likelihood(s, psi, binomial(nu)));
      CHECK(std::fabs(total - 1.0) < 1e-10);
    }
    for (double nu : {0.5, 2.0, 9.3}) {
      total = 0.0;
      double term = 1.0;
      const double mean = mean_variance(psi, negbin(nu)).first;
      for (int s = 0; s < 100000 && (s <= mean || term > 1e-16); ++s) {
        term = std::exp(log_likelihood(s, psi, negbin(nu)));
        total += term;
      }
      CHECK(std::fabs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("binomial approaches poisson") {
  const double nu = 1000.0;
  const double lambda = 2.0;
  const double psi = std::log(lambda / nu) - std::log1p(-lambda / nu);
  double tv = 0.0;
  double poisson_mass = 0.0;
  for (int s = 0; s <= 60; ++s) {
    const double pb = std::exp(log_likelihood(s, psi, binomial(nu)));
    const double pp = std::exp(s * std::log(lambda) - lambda - std::lgamma(s + 1.0));
    tv += std::fabs(pb - pp);
    poisson_mass += pp;
  }
  tv = 0.5 * (tv + (1.0 - poisson_mass));
  CHECK(tv < 0.01);
}

TEST_CASE("model names round trip") {
  for (auto k : {CountKind::kBernoulli, CountKind::kBinomial, CountKind::kNegativeBinomial}) {
    CHECK(parse_count_kind(to_string(k)) == k);
  }
  CHECK_THROWS(parse_count_kind("poisson"));
}
