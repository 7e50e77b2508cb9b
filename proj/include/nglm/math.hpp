#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nglm/rng.hpp"

namespace nglm {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// log(1 + e^x). Below x = -37 the naive form returns log1p of a value that
// has already lost all significance, so the branches switch to asymptotes.
double log1pexp(double x);
double sigmoid(double x);
double log_sigmoid(double x);  // log σ(x) = -log1pexp(-x)

double log_normal(double x, double mean, double variance);
double log_mvn(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
               const Eigen::MatrixXd& covariance);
double log_bernoulli(int a, double p);

double log_sum_exp(std::span<const double> values);

// Categorical draw from unnormalized log weights.
int sample_categorical_log(std::span<const double> log_weights, RngStream& rng);

Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RngStream& rng);

// Draw from N(mean, covariance); covariance must be symmetric positive definite.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           RngStream& rng);

Eigen::MatrixXd sample_wishart(const Eigen::MatrixXd& scale, double dof, RngStream& rng);
Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& scale, double dof,
                                       RngStream& rng);

// Normal-inverse-Wishart over (mean, covariance) of K-vectors.
struct NormalInverseWishart {
  Eigen::VectorXd mean;
  double kappa = 1.0;
  Eigen::MatrixXd scale;
  double dof = 3.0;

  static NormalInverseWishart isotropic(int dim, double mean, double kappa,
                                        double scale_diag, double dof);
  // Conjugate posterior given observations stored as rows.
  NormalInverseWishart posterior(const Eigen::MatrixXd& observations) const;
  void sample(Eigen::VectorXd& mean_out, Eigen::MatrixXd& cov_out, RngStream& rng) const;
  double log_density(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) const;
};

// Inverse-gamma with shape/rate parameterization: x ~ IG(a, b) has density
// proportional to x^{-a-1} e^{-b/x}.
struct InverseGamma {
  double shape = 1.0;
  double rate = 1.0;

  // Conjugate update for zero-mean Gaussian residuals with variance x.
  InverseGamma posterior(std::span<const double> residuals) const;
  double sample(RngStream& rng) const;
  double log_density(double x) const;
};

// Normal-inverse-gamma: sigma2 ~ IG(shape, rate), mu | sigma2 ~ N(mean, sigma2 / kappa).
struct NormalInverseGamma {
  double mean = 0.0;
  double kappa = 1.0;
  double shape = 2.0;
  double rate = 1.0;

  NormalInverseGamma posterior(std::span<const double> observations) const;
  void sample(double& mu, double& sigma2, RngStream& rng) const;
  double log_density(double mu, double sigma2) const;
};

// Beta-distributed probability with shape (alpha, beta).
struct BetaPrior {
  double alpha = 1.0;
  double beta = 1.0;
  double log_density(double p) const;
};

}  // namespace nglm
