#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nglm/errors.hpp"
#include "nglm/gibbs.hpp"
#include "nglm/math.hpp"
#include "nglm/parallel.hpp"
#include "nglm/polyagamma.hpp"

namespace nglm {

namespace {

double pg_shape(std::int64_t s, const CountModel& model) {
  switch (model.kind) {
    case CountKind::kBernoulli:
      return 1.0;
    case CountKind::kBinomial:
      return model.nu;
    case CountKind::kNegativeBinomial:
      return model.nu + static_cast<double>(s);
  }
  return 1.0;
}

// In-place rank-one update of a lower Cholesky factor: L Lᵀ + x xᵀ.
void cholesky_rank_one_update(Eigen::Ref<Eigen::MatrixXd> l, Eigen::VectorXd x) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lkk = l(k, k);
    const double r = std::hypot(lkk, x(k));
    const double c = r / lkk;
    const double s = x(k) / lkk;
    l(k, k) = r;
    if (k + 1 < n) {
      const Eigen::Index rest = n - k - 1;
      l.col(k).tail(rest) = (l.col(k).tail(rest) + s * x.tail(rest)) / c;
      x.tail(rest) = c * x.tail(rest) - s * l.col(k).tail(rest);
    }
  }
}

std::string describe_active(const std::vector<int>& order, int block) {
  std::ostringstream os;
  os << "active sources {";
  for (std::size_t i = 1; i < order.size(); ++i) os << (i > 1 ? "," : "") << order[i] - 1;
  os << "} + candidate " << block - 1;
  return os.str();
}

}  // namespace

Eigen::VectorXd kappa_column(const Eigen::Ref<const Eigen::VectorXi>& counts,
                             const CountModel& model) {
  Eigen::VectorXd kappa(counts.size());
  for (Eigen::Index t = 0; t < counts.size(); ++t) {
    const double s = counts(t);
    kappa(t) = s - 0.5 * pg_shape(counts(t), model);
  }
  return kappa;
}

Eigen::VectorXd sample_omega_column(const Eigen::Ref<const Eigen::VectorXi>& counts,
                                    const Eigen::Ref<const Eigen::VectorXd>& psi,
                                    const CountModel& model, RngStream& rng) {
  Eigen::VectorXd omega(counts.size());
  for (Eigen::Index t = 0; t < counts.size(); ++t) {
    const double b = pg_shape(counts(t), model);
    // b >= 1 for Bernoulli/binomial and b >= ν > 0 for negative binomial.
    if (!(b > 0.0)) throw NumericalError("Polya-gamma shape b(s, nu) must be positive");
    omega(t) = sample_pg({b, psi(t)}, rng);
  }
  return omega;
}

Eigen::MatrixXd sample_omega(const SpikeData& spikes, const Eigen::MatrixXd& psi,
                             const ObsModel& model, std::uint64_t seed, std::uint64_t iteration,
                             int threads) {
  if (psi.rows() != spikes.counts.rows() || psi.cols() != spikes.counts.cols()) {
    throw std::domain_error("sample_omega: activation shape does not match spike counts");
  }
  Eigen::MatrixXd omega(psi.rows(), psi.cols());
  parallel_for(static_cast<std::size_t>(psi.cols()), threads, [&](std::size_t n) {
    RngStream rng(seed, Phase::kOmega, iteration, n);
    const auto col = static_cast<Eigen::Index>(n);
    omega.col(col) = sample_omega_column(spikes.counts.col(col), psi.col(col),
                                         model.neuron(col), rng);
  });
  return omega;
}

WeightPosterior weight_posterior(const FilteredSpikes& shat, const Eigen::VectorXd& mask,
                                 const Eigen::VectorXd& omega, const Eigen::VectorXd& kappa,
                                 const NeuronPrior& prior) {
  if (mask.size() == 0 || mask(0) != 1.0) {
    throw std::domain_error("weight_posterior: the bias coordinate must be active");
  }
  WeightPosterior post;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (mask(i) != 0.0) post.coords.push_back(static_cast<int>(i));
  }
  const Eigen::Index d = static_cast<Eigen::Index>(post.coords.size());
  const Eigen::MatrixXd full_cov = prior.dense_covariance();
  Eigen::MatrixXd cov(d, d);
  Eigen::VectorXd mean(d);
  Eigen::MatrixXd x(shat.shat.rows(), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    mean(i) = prior.mean(post.coords[i]);
    x.col(i) = shat.shat.col(post.coords[i]);
    for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = full_cov(post.coords[i], post.coords[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> prior_llt(cov);
  if (prior_llt.info() != Eigen::Success) {
    throw NumericalError("weight_posterior: prior covariance is not positive definite");
  }
  const Eigen::MatrixXd prior_prec = prior_llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd precision =
      prior_prec + x.transpose() * omega.asDiagonal() * x;
  const Eigen::VectorXd h = prior_prec * mean + x.transpose() * kappa;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    const Eigen::VectorXd ev = precision.selfadjointView<Eigen::Lower>().eigenvalues();
    std::ostringstream os;
    os << "weight_posterior: posterior precision is not positive definite (eigenvalue range "
       << ev.minCoeff() << " .. " << ev.maxCoeff() << ")";
    throw NumericalError(os.str());
  }
  post.cov = llt.solve(Eigen::MatrixXd::Identity(d, d));
  post.mean = llt.solve(h);
  return post;
}

WeightPosterior gaussian_weight_posterior(const FilteredSpikes& shat,
                                          const Eigen::VectorXd& mask,
                                          const Eigen::VectorXd& observations, double noise_var,
                                          const NeuronPrior& prior) {
  const Eigen::VectorXd omega = Eigen::VectorXd::Constant(observations.size(), 1.0 / noise_var);
  return weight_posterior(shat, mask, omega, observations / noise_var, prior);
}

Eigen::VectorXd sample_weights(const WeightPosterior& posterior, RngStream& rng) {
  return sample_mvn(posterior.mean, posterior.cov, rng);
}

// ---- CollapsedNeuronSampler ------------------------------------------------

CollapsedNeuronSampler::CollapsedNeuronSampler(const FilteredSpikes& shat,
                                               Eigen::VectorXd omega, Eigen::VectorXd kappa,
                                               const NeuronPrior& prior)
    : shat_(shat),
      omega_(std::move(omega)),
      kappa_(std::move(kappa)),
      num_neurons_(shat.num_neurons),
      num_basis_(shat.num_basis),
      rho_(prior.rho),
      prior_cov_(prior.blocks),
      prior_mean_(prior.mean) {
  const int total = 1 + num_neurons_ * num_basis_;
  if (omega_.size() != shat.shat.rows() || kappa_.size() != shat.shat.rows()) {
    throw std::domain_error("CollapsedNeuronSampler: omega/kappa length differs from T");
  }
  if (static_cast<int>(prior_cov_.size()) != num_neurons_ + 1 ||
      prior_mean_.size() != total) {
    throw std::domain_error("CollapsedNeuronSampler: prior does not match the design");
  }
  const Eigen::VectorXd data_h = shat.shat.transpose() * kappa_;
  htilde_.resize(total);
  prior_prec_.resize(num_neurons_ + 1);
  prior_cov_chol_.resize(num_neurons_ + 1);
  block_const_.resize(num_neurons_ + 1);
  for (int j = 0; j <= num_neurons_; ++j) {
    const int k = block_dim(j);
    const int start = block_start(j);
    Eigen::LLT<Eigen::MatrixXd> llt(prior_cov_[j]);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("CollapsedNeuronSampler: prior block " + std::to_string(j) +
                           " is not positive definite");
    }
    prior_cov_chol_[j] = llt.matrixL();
    prior_prec_[j] = llt.solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::VectorXd mu = prior_mean_.segment(start, k);
    const Eigen::VectorXd eta = prior_prec_[j] * mu;
    htilde_.segment(start, k) = eta + data_h.segment(start, k);
    block_const_[j] = -prior_cov_chol_[j].diagonal().array().log().sum() - 0.5 * mu.dot(eta);
  }
  gram_ = Eigen::MatrixXd::Zero(total, total);
  gram_ready_.assign(static_cast<std::size_t>(total) * total, 0);
  chol_ = Eigen::MatrixXd::Zero(total, total);
  refresh_interval_ = std::max(num_neurons_, 1);
  Eigen::VectorXi none = Eigen::VectorXi::Zero(num_neurons_);
  set_active(none);
}

double CollapsedNeuronSampler::gram(int i, int j) {
  const int total = static_cast<int>(gram_.rows());
  const std::size_t idx = static_cast<std::size_t>(i) * total + j;
  if (!gram_ready_[idx]) {
    const Eigen::Index t_bins = shat_.shat.rows();
    const double* w = omega_.data();
    const double* a = shat_.shat.col(i).data();
    const double* b = shat_.shat.col(j).data();
    double acc = 0.0;
    for (Eigen::Index t = 0; t < t_bins; ++t) acc += w[t] * a[t] * b[t];
    gram_(i, j) = acc;
    gram_(j, i) = acc;
    gram_ready_[idx] = 1;
    gram_ready_[static_cast<std::size_t>(j) * total + i] = 1;
  }
  return gram_(i, j);
}

Eigen::MatrixXd CollapsedNeuronSampler::gram_block(int bi, int bj) {
  const int ki = block_dim(bi);
  const int kj = block_dim(bj);
  const int si = block_start(bi);
  const int sj = block_start(bj);
  Eigen::MatrixXd g(ki, kj);
  for (int a = 0; a < ki; ++a) {
    for (int b = 0; b < kj; ++b) g(a, b) = gram(si + a, sj + b);
  }
  return g;
}

int CollapsedNeuronSampler::position_of(int block) const {
  const auto it = std::find(order_.begin(), order_.end(), block);
  return it == order_.end() ? -1 : static_cast<int>(it - order_.begin());
}

void CollapsedNeuronSampler::refactor() {
  int dim = 0;
  std::vector<int> offsets;
  for (int b : order_) {
    offsets.push_back(dim);
    dim += block_dim(b);
  }
  Eigen::MatrixXd precision(dim, dim);
  Eigen::VectorXd h(dim);
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const int bp = order_[p];
    h.segment(offsets[p], block_dim(bp)) = htilde_.segment(block_start(bp), block_dim(bp));
    for (std::size_t q = 0; q <= p; ++q) {
      const int bq = order_[q];
      Eigen::MatrixXd g = gram_block(bp, bq);
      if (p == q) g += prior_prec_[bp];
      precision.block(offsets[p], offsets[q], block_dim(bp), block_dim(bq)) = g;
      precision.block(offsets[q], offsets[p], block_dim(bq), block_dim(bp)) = g.transpose();
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("collapsed adjacency: posterior precision is not positive definite for " +
                         describe_active(order_, 0));
  }
  dim_ = dim;
  chol_.topLeftCorner(dim, dim) = llt.matrixL();
  z_ = llt.matrixL().solve(h);
  log_diag_sum_ = chol_.topLeftCorner(dim, dim).diagonal().array().log().sum();
  const_sum_ = 0.0;
  for (int b : order_) const_sum_ += block_const_[b];
}

void CollapsedNeuronSampler::set_active(const Eigen::VectorXi& active) {
  order_.clear();
  order_.push_back(0);
  for (int m = 0; m < num_neurons_; ++m) {
    if (active(m)) order_.push_back(m + 1);
  }
  refactor();
  toggles_ = 0;
}

CollapsedNeuronSampler::Candidate CollapsedNeuronSampler::evaluate_append(int block) {
  const int k = block_dim(block);
  Candidate cand;
  Eigen::MatrixXd cross(dim_, k);
  int offset = 0;
  for (int b : order_) {
    cross.block(offset, 0, block_dim(b), k) = gram_block(b, block);
    offset += block_dim(b);
  }
  const auto l = chol_.topLeftCorner(dim_, dim_).triangularView<Eigen::Lower>();
  cand.cross = l.solve(cross);
  Eigen::MatrixXd schur = gram_block(block, block) + prior_prec_[block] -
                          cand.cross.transpose() * cand.cross;
  Eigen::LLT<Eigen::MatrixXd> llt(schur);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "collapsed adjacency: Schur complement not positive definite (min diag "
       << schur.diagonal().minCoeff() << ") for " << describe_active(order_, block);
    throw NumericalError(os.str());
  }
  cand.schur_l = llt.matrixL();
  const Eigen::VectorXd rhs =
      htilde_.segment(block_start(block), k) - cand.cross.transpose() * z_;
  cand.z = cand.schur_l.triangularView<Eigen::Lower>().solve(rhs);
  cand.delta = block_const_[block] - cand.schur_l.diagonal().array().log().sum() +
               0.5 * cand.z.squaredNorm();
  return cand;
}

void CollapsedNeuronSampler::commit_append(int block, const Candidate& cand) {
  const int k = block_dim(block);
  chol_.block(dim_, 0, k, dim_) = cand.cross.transpose();
  chol_.block(dim_, dim_, k, k) = cand.schur_l;
  chol_.block(0, dim_, dim_, k).setZero();
  Eigen::VectorXd z(dim_ + k);
  z.head(dim_) = z_;
  z.tail(k) = cand.z;
  z_ = std::move(z);
  dim_ += k;
  order_.push_back(block);
  log_diag_sum_ += cand.schur_l.diagonal().array().log().sum();
  const_sum_ += block_const_[block];
}

void CollapsedNeuronSampler::remove_block(int block) {
  const int pos = position_of(block);
  if (pos <= 0) throw std::logic_error("remove_block: block is not active");
  int offset = 0;
  for (int p = 0; p < pos; ++p) offset += block_dim(order_[p]);
  const int k = block_dim(block);
  const int rest = dim_ - offset - k;

  log_diag_sum_ -= chol_.block(offset, offset, k, k).diagonal().array().log().sum();
  if (rest > 0) {
    const Eigen::MatrixXd l32 = chol_.block(offset + k, offset, rest, k);
    const Eigen::MatrixXd l31 = chol_.block(offset + k, 0, rest, offset);
    Eigen::MatrixXd l33 = chol_.block(offset + k, offset + k, rest, rest);
    log_diag_sum_ -= l33.diagonal().array().log().sum();
    for (int c = 0; c < k; ++c) cholesky_rank_one_update(l33, l32.col(c));
    log_diag_sum_ += l33.diagonal().array().log().sum();
    chol_.block(offset, 0, rest, offset) = l31;
    chol_.block(offset, offset, rest, rest) = l33.triangularView<Eigen::Lower>();
  }
  dim_ -= k;
  order_.erase(order_.begin() + pos);
  const_sum_ -= block_const_[block];

  Eigen::VectorXd h(dim_);
  int o = 0;
  for (int b : order_) {
    h.segment(o, block_dim(b)) = htilde_.segment(block_start(b), block_dim(b));
    o += block_dim(b);
  }
  z_ = chol_.topLeftCorner(dim_, dim_).triangularView<Eigen::Lower>().solve(h);
}

double CollapsedNeuronSampler::log_evidence() const {
  return const_sum_ - log_diag_sum_ + 0.5 * z_.squaredNorm();
}

void CollapsedNeuronSampler::sample_adjacency(Eigen::VectorXi& active, RngStream& rng) {
  if (active.size() != num_neurons_) {
    throw std::domain_error("sample_adjacency: adjacency column has wrong length");
  }
  for (int m = 0; m < num_neurons_; ++m) {
    const int block = m + 1;
    const double rho = rho_(m);
    const bool was_active = position_of(block) > 0;
    if (was_active != static_cast<bool>(active(m))) {
      throw std::logic_error("sample_adjacency: factor out of sync with adjacency column");
    }
    if (rho <= 0.0) {
      if (was_active) {
        remove_block(block);
        ++toggles_;
      }
      active(m) = 0;
    } else if (rho >= 1.0) {
      if (!was_active) {
        commit_append(block, evaluate_append(block));
        ++toggles_;
      }
      active(m) = 1;
    } else {
      if (was_active) {
        remove_block(block);
        ++toggles_;
      }
      const Candidate cand = evaluate_append(block);
      const double logit = std::log(rho) - std::log1p(-rho) + cand.delta;
      const bool on = rng.uniform() < sigmoid(logit);
      if (on) commit_append(block, cand);
      active(m) = on ? 1 : 0;
    }
    if (toggles_ >= refresh_interval_) {
      refactor();
      toggles_ = 0;
    }
  }
}

Eigen::VectorXd CollapsedNeuronSampler::sample_weights(RngStream& rng) const {
  Eigen::VectorXd eps(dim_);
  for (int i = 0; i < dim_; ++i) eps(i) = rng.normal();
  const Eigen::VectorXd active_w = chol_.topLeftCorner(dim_, dim_)
                                       .triangularView<Eigen::Lower>()
                                       .transpose()
                                       .solve(z_ + eps);
  Eigen::VectorXd w(prior_mean_.size());
  std::vector<char> filled(num_neurons_ + 1, 0);
  int offset = 0;
  for (int b : order_) {
    w.segment(block_start(b), block_dim(b)) = active_w.segment(offset, block_dim(b));
    filled[b] = 1;
    offset += block_dim(b);
  }
  for (int b = 0; b <= num_neurons_; ++b) {
    if (filled[b]) continue;
    const int k = block_dim(b);
    Eigen::VectorXd e(k);
    for (int i = 0; i < k; ++i) e(i) = rng.normal();
    w.segment(block_start(b), k) = prior_mean_.segment(block_start(b), k) + prior_cov_chol_[b] * e;
  }
  return w;
}

Eigen::VectorXd CollapsedNeuronSampler::posterior_mean() const {
  const Eigen::VectorXd active_mean =
      chol_.topLeftCorner(dim_, dim_).triangularView<Eigen::Lower>().transpose().solve(z_);
  Eigen::VectorXd w = prior_mean_;
  int offset = 0;
  for (int b : order_) {
    w.segment(block_start(b), block_dim(b)) = active_mean.segment(offset, block_dim(b));
    offset += block_dim(b);
  }
  return w;
}

void collapsed_sample_adjacency(const FilteredSpikes& shat, const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& kappa, const NeuronPrior& prior,
                                Eigen::VectorXi& active, RngStream& rng) {
  CollapsedNeuronSampler sampler(shat, omega, kappa, prior);
  sampler.set_active(active);
  sampler.sample_adjacency(active, rng);
}

void gaussian_collapsed_sample_adjacency(const FilteredSpikes& shat,
                                         const Eigen::VectorXd& observations, double noise_var,
                                         const NeuronPrior& prior, Eigen::VectorXi& active,
                                         RngStream& rng) {
  const Eigen::VectorXd omega = Eigen::VectorXd::Constant(observations.size(), 1.0 / noise_var);
  collapsed_sample_adjacency(shat, omega, observations / noise_var, prior, active, rng);
}

}  // namespace nglm
