#include "nglm/polyagamma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nglm/parallel.hpp"

namespace nglm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;

void check_shape(double b) {
  if (!(b >= 0.0)) throw std::domain_error("Polya-gamma shape must be >= 0, got " + std::to_string(b));
}

// log Φ(x) that stays finite deep in the lower tail.
double log_norm_cdf(double x) {
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  const double x2 = x * x;
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * kPi) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Coefficient of the alternating series for the J*(1, z) density.
double series_coef(int n, double x) {
  const double k = (n + 0.5) * kPi;
  if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double expnt = -1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) -
                       2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(expnt);
}

// Probability of proposing from the truncated exponential piece.
double mass_texpon(double z) {
  const double t = kTrunc;
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + log_norm_cdf(b);
  const double xa = x0 + z + log_norm_cdf(a);
  const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + qdivp);
}

// Inverse-Gaussian IG(1/z, 1) truncated to (0, kTrunc).
double truncated_inverse_gaussian(double z, RngStream& rng) {
  z = std::fabs(z);
  const double t = kTrunc;
  double x = t + 1.0;
  if (1.0 / t > z) {
    double alpha = 0.0;
    while (rng.uniform() > alpha) {
      double e1 = rng.exponential();
      double e2 = rng.exponential();
      while (e1 * e1 > 2.0 * e2 / t) {
        e1 = rng.exponential();
        e2 = rng.exponential();
      }
      x = 1.0 + e1 * t;
      x = t / (x * x);
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    const double mu = 1.0 / z;
    while (x > t) {
      double y = rng.normal();
      y *= y;
      const double half_mu = 0.5 * mu;
      const double mu_y = mu * y;
      x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

double sample_pg_gaussian(const PGParams& p, RngStream& rng) {
  const double mean = pg_mean(p);
  const double sd = std::sqrt(pg_variance(p));
  const double draw = mean + sd * rng.normal();
  // Mean exceeds 5 sd once b > 170; the clamp only guards against a freak draw.
  return draw > 0.0 ? draw : 1e-12 * mean;
}

}  // namespace

double pg_mean(const PGParams& p) {
  check_shape(p.b);
  const double c = std::fabs(p.c);
  if (c < 1e-6) return p.b / 4.0 * (1.0 - c * c / 12.0);
  return p.b / (2.0 * c) * std::tanh(0.5 * c);
}

double pg_variance(const PGParams& p) {
  check_shape(p.b);
  const double c = std::fabs(p.c);
  if (c < 1e-3) return p.b / 24.0 * (1.0 - c * c / 5.0);
  // (sinh c - c) / cosh²(c/2) rewritten to avoid overflow.
  const double sech = 1.0 / std::cosh(0.5 * c);
  const double num = 2.0 * std::tanh(0.5 * c) - c * sech * sech;
  return p.b / (4.0 * c * c * c) * num;
}

double sample_pg1(double c, RngStream& rng) {
  const double z = std::fabs(c) * 0.5;
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double p_exp = mass_texpon(z);
  for (;;) {
    double x;
    if (rng.uniform() < p_exp) {
      x = kTrunc + rng.exponential() / fz;
    } else {
      x = truncated_inverse_gaussian(z, rng);
    }
    double s = series_coef(0, x);
    const double y = rng.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

double sample_pg_series(const PGParams& p, int terms, RngStream& rng) {
  check_shape(p.b);
  if (p.b == 0.0) return 0.0;
  const double c2 = p.c * p.c / (4.0 * kPi * kPi);
  const double scale = 1.0 / (2.0 * kPi * kPi);
  double sum = 0.0;
  double mean_kept = 0.0;
  double var_kept = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double denom = (k - 0.5) * (k - 0.5) + c2;
    sum += rng.gamma(p.b) / denom;
    mean_kept += p.b / denom;
    var_kept += p.b / (denom * denom);
  }
  // The dropped terms are many small independent gammas; replace them by a
  // Gaussian with the exact residual mean and variance.
  const double tail_mean = pg_mean(p) - scale * mean_kept;
  const double tail_var = pg_variance(p) - scale * scale * var_kept;
  double tail = tail_mean + std::sqrt(std::max(tail_var, 0.0)) * rng.normal();
  return scale * sum + std::max(tail, 0.0);
}

double sample_pg(const PGParams& p, RngStream& rng) {
  check_shape(p.b);
  if (!std::isfinite(p.c)) throw std::domain_error("Polya-gamma tilt must be finite");
  if (p.b == 0.0) return 0.0;
  if (p.b > kPGGaussianThreshold) return sample_pg_gaussian(p, rng);
  const double whole = std::floor(p.b);
  const double frac = p.b - whole;
  double draw = 0.0;
  for (int i = 0; i < static_cast<int>(whole); ++i) draw += sample_pg1(p.c, rng);
  if (frac > 1e-12) draw += sample_pg_series({frac, p.c}, kPGSeriesTerms, rng);
  return draw;
}

std::vector<double> sample_pg_batch(std::span<const double> bs, std::span<const double> cs,
                                    RngStream& rng, int threads) {
  if (bs.size() != cs.size()) {
    throw std::domain_error("sample_pg_batch: shape and tilt arrays differ in length (" +
                            std::to_string(bs.size()) + " vs " + std::to_string(cs.size()) +
                            ")");
  }
  std::vector<double> out(bs.size());
  const RngStream base = rng;
  parallel_for(bs.size(), threads, [&](std::size_t i) {
    RngStream sub = base.split(i);
    out[i] = sample_pg({bs[i], cs[i]}, sub);
  });
  // Advance the caller's stream once so repeated batches differ.
  rng();
  return out;
}

}  // namespace nglm
