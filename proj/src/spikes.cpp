#include "nglm/spikes.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "nglm/math.hpp"

namespace nglm {

std::string_view to_string(CountKind kind) {
  switch (kind) {
    case CountKind::kBernoulli:
      return "bernoulli";
    case CountKind::kBinomial:
      return "binomial";
    case CountKind::kNegativeBinomial:
      return "negbinomial";
  }
  return "unknown";
}

CountKind parse_count_kind(std::string_view name) {
  if (name == "bernoulli") return CountKind::kBernoulli;
  if (name == "binomial") return CountKind::kBinomial;
  if (name == "negbinomial") return CountKind::kNegativeBinomial;
  throw std::invalid_argument("unknown observation model '" + std::string(name) + "'");
}

void CountModel::validate() const {
  switch (kind) {
    case CountKind::kBernoulli:
      if (nu != 1.0) throw std::domain_error("bernoulli model requires nu = 1");
      break;
    case CountKind::kBinomial:
      if (!(nu >= 1.0) || std::floor(nu) != nu) {
        throw std::domain_error("binomial model requires a positive integer nu, got " +
                                std::to_string(nu));
      }
      break;
    case CountKind::kNegativeBinomial:
      if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw std::domain_error("negative binomial model requires nu > 0, got " +
                                std::to_string(nu));
      }
      break;
  }
}

void CountModel::check_count(std::int64_t s) const {
  if (s < 0) throw std::domain_error("spike count must be >= 0, got " + std::to_string(s));
  if (kind == CountKind::kBernoulli && s > 1) {
    throw std::domain_error("bernoulli count must be <= 1, got " + std::to_string(s));
  }
  if (kind == CountKind::kBinomial && static_cast<double>(s) > nu) {
    throw std::domain_error("binomial count " + std::to_string(s) + " exceeds nu = " +
                            std::to_string(static_cast<std::int64_t>(nu)));
  }
}

ObsModel ObsModel::uniform(CountKind kind, int num_neurons, double nu) {
  ObsModel m;
  m.kind = kind;
  m.nu = Eigen::VectorXd::Constant(num_neurons, kind == CountKind::kBernoulli ? 1.0 : nu);
  return m;
}

double StandardForm::log_density(double psi) const {
  return log_c + a * psi - b * log1pexp(psi);
}

StandardForm standard_form(std::int64_t s, const CountModel& model) {
  model.check_count(s);
  const double sd = static_cast<double>(s);
  StandardForm f;
  f.a = sd;
  switch (model.kind) {
    case CountKind::kBernoulli:
      f.b = 1.0;
      f.log_c = 0.0;
      break;
    case CountKind::kBinomial:
      f.b = model.nu;
      f.log_c = std::lgamma(model.nu + 1.0) - std::lgamma(sd + 1.0) -
                std::lgamma(model.nu - sd + 1.0);
      break;
    case CountKind::kNegativeBinomial:
      f.b = model.nu + sd;
      f.log_c = std::lgamma(model.nu + sd) - std::lgamma(sd + 1.0) - std::lgamma(model.nu);
      break;
  }
  f.kappa = f.a - f.b / 2.0;
  return f;
}

double log_likelihood(std::int64_t s, double psi, const CountModel& model) {
  model.check_count(s);
  const double sd = static_cast<double>(s);
  const double log_p = log_sigmoid(psi);
  const double log_q = log_sigmoid(-psi);
  switch (model.kind) {
    case CountKind::kBernoulli:
      return s == 1 ? log_p : log_q;
    case CountKind::kBinomial: {
      const double log_choose = std::lgamma(model.nu + 1.0) - std::lgamma(sd + 1.0) -
                                std::lgamma(model.nu - sd + 1.0);
      double v = log_choose;
      if (s > 0) v += sd * log_p;
      if (sd < model.nu) v += (model.nu - sd) * log_q;
      return v;
    }
    case CountKind::kNegativeBinomial: {
      const double log_choose =
          std::lgamma(model.nu + sd) - std::lgamma(sd + 1.0) - std::lgamma(model.nu);
      double v = log_choose + model.nu * log_q;
      if (s > 0) v += sd * log_p;
      return v;
    }
  }
  return 0.0;
}

std::pair<double, double> mean_variance(double psi, const CountModel& model) {
  const double p = sigmoid(psi);
  const double q = sigmoid(-psi);
  switch (model.kind) {
    case CountKind::kBernoulli:
      return {p, p * q};
    case CountKind::kBinomial:
      return {model.nu * p, model.nu * p * q};
    case CountKind::kNegativeBinomial: {
      const double mean = model.nu * std::exp(psi);
      return {mean, mean / q};
    }
  }
  return {0.0, 0.0};
}

std::int64_t sample_count(double psi, const CountModel& model, RngStream& rng) {
  switch (model.kind) {
    case CountKind::kBernoulli:
      return rng.uniform() < sigmoid(psi) ? 1 : 0;
    case CountKind::kBinomial: {
      std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(model.nu),
                                                    sigmoid(psi));
      return dist(rng);
    }
    case CountKind::kNegativeBinomial: {
      // Gamma-Poisson mixture with rate λ ~ Gamma(ν, scale e^ψ).
      const double lambda = rng.gamma(model.nu, std::exp(-psi));
      if (lambda <= 0.0) return 0;
      std::poisson_distribution<std::int64_t> dist(std::min(lambda, 1e15));
      return dist(rng);
    }
  }
  return 0;
}

}  // namespace nglm
