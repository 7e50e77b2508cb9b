#include "nglm/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nglm/errors.hpp"

namespace nglm {

double log1pexp(double x) {
  if (x <= -37.0) return std::exp(x);
  if (x <= 18.0) return std::log1p(std::exp(x));
  if (x <= 33.3) return x + std::exp(-x);
  return x;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) { return -log1pexp(-x); }

double log_normal(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance) + r * r / variance);
}

double log_mvn(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
               const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("log_mvn: covariance is not positive definite");
  }
  const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + log_det + z.squaredNorm());
}

double log_bernoulli(int a, double p) {
  if (a) return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  return p < 1.0 ? std::log1p(-p) : -std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

int sample_categorical_log(std::span<const double> log_weights, RngStream& rng) {
  const double norm = log_sum_exp(log_weights);
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    cum += std::exp(log_weights[i] - norm);
    if (u < cum) return static_cast<int>(i);
  }
  // Rounding left u above the final cumulative sum; take the last positive entry.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (std::isfinite(log_weights[i])) return static_cast<int>(i);
  }
  return 0;
}

Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RngStream& rng) {
  Eigen::VectorXd g(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) g(i) = rng.gamma(alpha(i));
  const double total = g.sum();
  if (total <= 0.0) {
    // All gamma draws underflowed (tiny concentrations); fall back to a vertex.
    g.setZero();
    g(rng() % static_cast<std::uint64_t>(alpha.size())) = 1.0;
    return g;
  }
  return g / total;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           RngStream& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("sample_mvn: covariance is not positive definite");
  }
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + llt.matrixL() * z;
}

Eigen::MatrixXd sample_wishart(const Eigen::MatrixXd& scale, double dof, RngStream& rng) {
  const Eigen::Index k = scale.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("sample_wishart: scale is not positive definite");
  }
  // Bartlett decomposition.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    a(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (dof - static_cast<double>(i))));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Eigen::MatrixXd la = llt.matrixL() * a;
  return la * la.transpose();
}

Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& scale, double dof,
                                       RngStream& rng) {
  const Eigen::MatrixXd precision = sample_wishart(scale.inverse(), dof, rng);
  Eigen::MatrixXd cov = precision.inverse();
  return 0.5 * (cov + cov.transpose());
}

NormalInverseWishart NormalInverseWishart::isotropic(int dim, double mean, double kappa,
                                                     double scale_diag, double dof) {
  NormalInverseWishart niw;
  niw.mean = Eigen::VectorXd::Constant(dim, mean);
  niw.kappa = kappa;
  niw.scale = Eigen::MatrixXd::Identity(dim, dim) * scale_diag;
  niw.dof = dof;
  return niw;
}

NormalInverseWishart NormalInverseWishart::posterior(const Eigen::MatrixXd& observations) const {
  const double n = static_cast<double>(observations.rows());
  if (observations.rows() == 0) return *this;
  const Eigen::VectorXd xbar = observations.colwise().mean().transpose();
  const Eigen::MatrixXd centered = observations.rowwise() - xbar.transpose();
  const Eigen::MatrixXd scatter = centered.transpose() * centered;
  NormalInverseWishart post;
  post.kappa = kappa + n;
  post.dof = dof + n;
  post.mean = (kappa * mean + n * xbar) / post.kappa;
  const Eigen::VectorXd d = xbar - mean;
  post.scale = scale + scatter + (kappa * n / post.kappa) * d * d.transpose();
  post.scale = 0.5 * (post.scale + post.scale.transpose());
  return post;
}

void NormalInverseWishart::sample(Eigen::VectorXd& mean_out, Eigen::MatrixXd& cov_out,
                                  RngStream& rng) const {
  cov_out = sample_inverse_wishart(scale, dof, rng);
  mean_out = sample_mvn(mean, cov_out / kappa, rng);
}

double NormalInverseWishart::log_density(const Eigen::VectorXd& mu,
                                         const Eigen::MatrixXd& sigma) const {
  const double k = static_cast<double>(mean.size());
  Eigen::LLT<Eigen::MatrixXd> s_llt(sigma);
  Eigen::LLT<Eigen::MatrixXd> l_llt(scale);
  if (s_llt.info() != Eigen::Success || l_llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  const double log_det_sigma =
      2.0 * s_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double log_det_scale =
      2.0 * l_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double log_mgamma = 0.25 * k * (k - 1.0) * std::log(M_PI);
  for (int j = 0; j < static_cast<int>(k); ++j) log_mgamma += std::lgamma(0.5 * (dof - j));
  const double trace = s_llt.solve(scale).trace();
  const double log_iw = 0.5 * dof * log_det_scale - 0.5 * dof * k * std::log(2.0) -
                        log_mgamma - 0.5 * (dof + k + 1.0) * log_det_sigma - 0.5 * trace;
  return log_iw + log_mvn(mu, mean, sigma / kappa);
}

InverseGamma InverseGamma::posterior(std::span<const double> residuals) const {
  double ss = 0.0;
  for (double r : residuals) ss += r * r;
  return {shape + 0.5 * static_cast<double>(residuals.size()), rate + 0.5 * ss};
}

double InverseGamma::sample(RngStream& rng) const { return 1.0 / rng.gamma(shape, rate); }

double InverseGamma::log_density(double x) const {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

NormalInverseGamma NormalInverseGamma::posterior(std::span<const double> observations) const {
  const double n = static_cast<double>(observations.size());
  if (observations.empty()) return *this;
  const double xbar = std::accumulate(observations.begin(), observations.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : observations) ss += (x - xbar) * (x - xbar);
  NormalInverseGamma post;
  post.kappa = kappa + n;
  post.mean = (kappa * mean + n * xbar) / post.kappa;
  post.shape = shape + 0.5 * n;
  post.rate = rate + 0.5 * ss + 0.5 * kappa * n * (xbar - mean) * (xbar - mean) / post.kappa;
  return post;
}

void NormalInverseGamma::sample(double& mu, double& sigma2, RngStream& rng) const {
  sigma2 = 1.0 / rng.gamma(shape, rate);
  mu = mean + std::sqrt(sigma2 / kappa) * rng.normal();
}

double NormalInverseGamma::log_density(double mu, double sigma2) const {
  return InverseGamma{shape, rate}.log_density(sigma2) + log_normal(mu, mean, sigma2 / kappa);
}

double BetaPrior::log_density(double p) const {
  if (p < 0.0 || p > 1.0) return -std::numeric_limits<double>::infinity();
  const double log_b = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  double v = -log_b;
  if (alpha != 1.0) v += (alpha - 1.0) * std::log(p);
  if (beta != 1.0) v += (beta - 1.0) * std::log1p(-p);
  return v;
}

}  // namespace nglm
