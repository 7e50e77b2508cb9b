#include "nglm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nglm/errors.hpp"
#include "nglm/math.hpp"
#include "nglm/parallel.hpp"

namespace nglm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int draw_label(const Eigen::VectorXd& pi, RngStream& rng) {
  const Eigen::VectorXd log_pi = pi.array().log();
  return sample_categorical_log(std::span<const double>(log_pi.data(), log_pi.size()), rng);
}

Eigen::MatrixXd append_location(const Eigen::MatrixXd& locations, double var, RngStream& rng) {
  Eigen::MatrixXd out(locations.rows() + 1, locations.cols());
  out.topRows(locations.rows()) = locations;
  for (Eigen::Index d = 0; d < locations.cols(); ++d) {
    out(locations.rows(), d) = std::sqrt(var) * rng.normal();
  }
  return out;
}

void check_sample_size(const Sample& s, int num_neurons) {
  if (s.net.num_neurons() != num_neurons) {
    throw ConfigError("chain has " + std::to_string(s.net.num_neurons()) +
                      " neurons but the observed data has " + std::to_string(num_neurons));
  }
}

}  // namespace

double log_mean_exp(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  return log_sum_exp(terms) - std::log(static_cast<double>(terms.size()));
}

PredictiveEstimate aggregate_terms(std::vector<double> terms, int num_bins) {
  PredictiveEstimate est;
  est.Q = static_cast<int>(terms.size());
  est.num_bins = num_bins;
  est.value = log_mean_exp(terms);
  if (est.Q > 1 && std::isfinite(est.value)) {
    const double top = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    double sum2 = 0.0;
    for (double t : terms) {
      const double w = std::exp(t - top);
      sum += w;
      sum2 += w * w;
    }
    const double q = est.Q;
    const double mean = sum / q;
    const double var = std::max(sum2 / q - mean * mean, 0.0) * q / (q - 1.0);
    est.std_error = std::sqrt(var / q) / mean;
  }
  est.terms = std::move(terms);
  return est;
}

PriorSpec extend_prior(const PriorSpec& spec, int num_neurons, RngStream& rng) {
  PriorSpec ext = spec;
  if (auto* p = std::get_if<SbmAdjacency>(&ext.adjacency)) {
    if (static_cast<int>(p->labels.size()) != num_neurons) throw ConfigError("SBM label count mismatch");
    p->labels.push_back(draw_label(p->pi, rng));
  } else if (auto* p = std::get_if<DistanceAdjacency>(&ext.adjacency)) {
    p->locations = append_location(p->locations, p->location_var, rng);
  }
  if (auto* p = std::get_if<SbmWeights>(&ext.weights)) {
    if (static_cast<int>(p->labels.size()) != num_neurons) throw ConfigError("SBM label count mismatch");
    p->labels.push_back(draw_label(p->pi, rng));
  } else if (auto* p = std::get_if<DistanceWeights>(&ext.weights)) {
    p->locations = append_location(p->locations, p->location_var, rng);
  }
  return ext;
}

HeldOutDraw draw_heldout(const PriorSpec& spec, int num_neurons, int num_basis,
                         const CountModel& model, RngStream& rng) {
  HeldOutDraw draw;
  draw.spec = extend_prior(spec, num_neurons, rng);
  const int star = num_neurons;
  draw.adjacency.resize(num_neurons + 1);
  draw.weights.resize(num_neurons + 1, num_basis);
  for (int m = 0; m <= num_neurons; ++m) {
    draw.adjacency(m) = rng.bernoulli(edge_probability(draw.spec.adjacency, m, star)) ? 1 : 0;
    const auto [mean, cov] = weight_moments(draw.spec.weights, m, star);
    if (draw.adjacency(m)) {
      draw.weights.row(m) = sample_mvn(mean, cov, rng).transpose();
    } else {
      draw.weights.row(m).setZero();
    }
  }
  draw.bias = spec.bias.mean + std::sqrt(spec.bias.variance) * rng.normal();
  draw.nu = model.kind == CountKind::kNegativeBinomial
                ? rng.gamma(spec.hyper.nu_shape, spec.hyper.nu_rate)
                : model.nu;
  return draw;
}

Eigen::VectorXd heldout_activation(const HeldOutDraw& draw, const FilteredSpikes& observed,
                                   const Eigen::MatrixXd& own_filtered) {
  const int nn = observed.num_neurons;
  const int k = observed.num_basis;
  Eigen::VectorXd psi = Eigen::VectorXd::Constant(observed.num_bins(), draw.bias);
  for (int m = 0; m < nn; ++m) {
    if (!draw.adjacency(m)) continue;
    psi.noalias() += observed.shat.middleCols(FilteredSpikes::column(m, 0, k), k) *
                     draw.weights.row(m).transpose();
  }
  if (draw.adjacency(nn)) psi.noalias() += own_filtered * draw.weights.row(nn).transpose();
  return psi;
}

PredictiveEstimate predictive_ll_heldout(const Chain& chain, const FilteredSpikes& observed,
                                         const Basis& basis, const SpikeData& heldout,
                                         const PredictOptions& options, RngStream& rng) {
  if (chain.samples.empty()) throw ConfigError("predictive likelihood needs a nonempty chain");
  if (heldout.num_neurons() != 1) throw ConfigError("held-out data must hold exactly one neuron");
  if (heldout.num_bins() != observed.num_bins()) {
    throw ConfigError("held-out spike train has " + std::to_string(heldout.num_bins()) +
                      " bins but the observed data has " + std::to_string(observed.num_bins()));
  }
  if (basis.num_basis() != observed.num_basis) throw ConfigError("basis does not match filtered data");
  for (const Sample& s : chain.samples) check_sample_size(s, observed.num_neurons);
  options.model.validate();

  const Eigen::MatrixXd own = filter_spikes(heldout, basis).shat.rightCols(basis.num_basis());
  const auto counts = heldout.counts.col(0);
  const int q_total = options.Q > 0 ? options.Q : static_cast<int>(chain.samples.size());
  const std::uint64_t key = rng();
  std::vector<double> terms(static_cast<std::size_t>(q_total));
  parallel_for(terms.size(), options.threads, [&](std::size_t q) {
    const Sample& sample = chain.samples[q % chain.samples.size()];
    RngStream r(key, Phase::kPredict, q);
    const HeldOutDraw draw = draw_heldout(sample.spec, observed.num_neurons, observed.num_basis,
                                          options.model, r);
    const Eigen::VectorXd psi = heldout_activation(draw, observed, own);
    const CountModel model{options.model.kind, draw.nu};
    double acc = 0.0;
    if (model.kind == CountKind::kBernoulli) {
      for (Eigen::Index t = 0; t < psi.size(); ++t) {
        acc += counts(t) ? log_sigmoid(psi(t)) : log_sigmoid(-psi(t));
      }
    } else {
      for (Eigen::Index t = 0; t < psi.size(); ++t) acc += log_likelihood(counts(t), psi(t), model);
    }
    terms[q] = acc;
  });
  return aggregate_terms(std::move(terms), observed.num_bins());
}

std::vector<ModelScore> compare_models(const std::vector<ModelFit>& fits,
                                       const FilteredSpikes& observed, const Basis& basis,
                                       const SpikeData& heldout, const PredictOptions& options,
                                       std::uint64_t seed) {
  if (fits.empty()) throw ConfigError("no models to compare");
  if (heldout.num_bins() != observed.num_bins()) {
    throw ConfigError("held-out data has " + std::to_string(heldout.num_bins()) +
                      " bins but the observed data has " + std::to_string(observed.num_bins()));
  }
  const int held = heldout.num_neurons();
  if (held < 1) throw ConfigError("no held-out neurons");
  std::vector<ModelScore> scores;
  for (const ModelFit& fit : fits) {
    if (!fit.chain) throw ConfigError("model '" + fit.name + "' has no chain");
    ModelScore score;
    score.name = fit.name;
    double var = 0.0;
    for (int j = 0; j < held; ++j) {
      SpikeData one{heldout.counts.col(j), heldout.bin_ms};
      RngStream rng(seed, Phase::kPredict, 0, static_cast<std::uint64_t>(j));
      score.per_neuron.push_back(
          predictive_ll_heldout(*fit.chain, observed, basis, one, options, rng));
      score.mean += score.per_neuron.back().value;
      var += score.per_neuron.back().std_error * score.per_neuron.back().std_error;
    }
    score.mean /= held;
    score.std_error = std::sqrt(var) / held;
    score.per_bin = score.mean / observed.num_bins();
    scores.push_back(std::move(score));
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ModelScore& a, const ModelScore& b) { return a.mean > b.mean; });
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i].rank = (i > 0 && scores[i].mean == scores[i - 1].mean) ? scores[i - 1].rank
                                                                     : static_cast<int>(i) + 1;
  }
  return scores;
}

std::pair<double, double> score_difference(const ModelScore& a, const ModelScore& b) {
  if (a.per_neuron.size() != b.per_neuron.size()) throw ConfigError("scores cover different neurons");
  return {a.mean - b.mean, std::hypot(a.std_error, b.std_error)};
}

// ---- recovery metrics -------------------------------------------------------

Eigen::MatrixXd edge_marginals(const Chain& chain) {
  if (chain.samples.empty()) throw ConfigError("edge marginals need a nonempty chain");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(chain.samples[0].net.adjacency.rows(),
                                              chain.samples[0].net.adjacency.cols());
  for (const Sample& s : chain.samples) acc += s.net.adjacency.cast<double>();
  return acc / static_cast<double>(chain.samples.size());
}

std::optional<double> adjacency_auc(const Eigen::MatrixXd& marginals,
                                    const Eigen::MatrixXi& truth) {
  if (marginals.rows() != truth.rows() || marginals.cols() != truth.cols()) {
    throw ConfigError("marginals and truth differ in shape");
  }
  struct Item {
    double score;
    int label;
  };
  std::vector<Item> items;
  for (Eigen::Index n = 0; n < truth.cols(); ++n) {
    for (Eigen::Index m = 0; m < truth.rows(); ++m) {
      if (m != n) items.push_back({marginals(m, n), truth(m, n) ? 1 : 0});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });
  double rank_sum = 0.0;
  long positives = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j < items.size() && items[j].score == items[i].score) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (items[k].label) {
        rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const long negatives = static_cast<long>(items.size()) - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double denom = std::sqrt((dx * dx).sum() * (dy * dy).sum());
  if (denom == 0.0) return kNaN;
  return (dx * dy).sum() / denom;
}

Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& locations) {
  const Eigen::Index nn = locations.rows();
  Eigen::VectorXd out(nn * (nn - 1) / 2);
  Eigen::Index i = 0;
  for (Eigen::Index m = 0; m < nn; ++m) {
    for (Eigen::Index n = m + 1; n < nn; ++n) {
      out(i++) = (locations.row(m) - locations.row(n)).norm();
    }
  }
  return out;
}

Procrustes procrustes(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw ConfigError("Procrustes inputs differ in shape");
  }
  const Eigen::RowVectorXd mu_s = source.colwise().mean();
  const Eigen::RowVectorXd mu_t = target.colwise().mean();
  const Eigen::MatrixXd xs = source.rowwise() - mu_s;
  const Eigen::MatrixXd xt = target.rowwise() - mu_t;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xs.transpose() * xt,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd rot = svd.matrixU() * svd.matrixV().transpose();
  const double norm = xs.squaredNorm();
  Procrustes out;
  out.scale = norm > 0.0 ? svd.singularValues().sum() / norm : 0.0;
  out.aligned = (out.scale * xs * rot).rowwise() + mu_t;
  out.residual = (out.aligned - target).squaredNorm();
  return out;
}

DistanceRecovery distance_recovery(const std::vector<Eigen::MatrixXd>& samples,
                                   const Eigen::MatrixXd& truth) {
  if (truth.rows() < 3) throw ConfigError("distance recovery needs at least 3 neurons");
  if (samples.empty()) throw ConfigError("distance recovery needs at least one sample");
  DistanceRecovery out;
  out.true_distances = pairwise_distances(truth);
  out.inferred_distances = Eigen::VectorXd::Zero(out.true_distances.size());
  out.aligned = Eigen::MatrixXd::Zero(truth.rows(), truth.cols());
  for (const Eigen::MatrixXd& s : samples) {
    if (s.rows() != truth.rows() || s.cols() != truth.cols()) {
      throw ConfigError("inferred locations are " + std::to_string(s.rows()) + "x" +
                        std::to_string(s.cols()) + " but the truth is " +
                        std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
    }
    out.inferred_distances += pairwise_distances(s);
    out.aligned += procrustes(s, truth).aligned;
  }
  const double count = static_cast<double>(samples.size());
  out.inferred_distances /= count;
  out.aligned /= count;
  out.residual = (out.aligned - truth).squaredNorm();
  out.correlation = pearson(out.true_distances, out.inferred_distances);
  return out;
}

std::vector<Eigen::MatrixXd> chain_locations(const Chain& chain, bool adjacency_side) {
  std::vector<Eigen::MatrixXd> out;
  for (const Sample& s : chain.samples) {
    if (adjacency_side) {
      if (const auto* p = std::get_if<DistanceAdjacency>(&s.spec.adjacency)) out.push_back(p->locations);
    } else if (const auto* p = std::get_if<DistanceWeights>(&s.spec.weights)) {
      out.push_back(p->locations);
    }
  }
  return out;
}

double type_recovery(const std::vector<std::vector<int>>& samples,
                     const std::vector<int>& truth) {
  if (samples.empty()) return kNaN;
  const std::size_t nn = truth.size();
  if (nn < 2) return 1.0;
  const double pairs = static_cast<double>(nn * (nn - 1) / 2);
  double total = 0.0;
  for (const auto& labels : samples) {
    if (labels.size() != nn) throw ConfigError("label sample has the wrong neuron count");
    long agree = 0;
    for (std::size_t m = 0; m < nn; ++m) {
      for (std::size_t n = m + 1; n < nn; ++n) {
        agree += (labels[m] == labels[n]) == (truth[m] == truth[n]);
      }
    }
    total += static_cast<double>(agree) / pairs;
  }
  return total / static_cast<double>(samples.size());
}

std::vector<std::vector<int>> chain_labels(const Chain& chain, bool adjacency_side) {
  std::vector<std::vector<int>> out;
  for (const Sample& s : chain.samples) {
    if (adjacency_side) {
      if (const auto* p = std::get_if<SbmAdjacency>(&s.spec.adjacency)) out.push_back(p->labels);
    } else if (const auto* p = std::get_if<SbmWeights>(&s.spec.weights)) {
      out.push_back(p->labels);
    }
  }
  return out;
}

}  // namespace nglm
