#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nglm/chain_store.hpp"
#include "nglm/errors.hpp"
#include "nglm/io.hpp"
#include "nglm/parallel.hpp"

namespace nglm::cli {

using json = nlohmann::ordered_json;

namespace {

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename M>
M matrix_from(const json& j, const std::string& source) {
  if (!j.is_array()) throw DataError(source + ": expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw DataError(source + ": ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<typename M::Scalar>();
  }
  return m;
}

std::string dataset_name(DatasetFormat format) {
  return format == DatasetFormat::kBinary ? "data.bin" : "data.txt";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory: " + ec.message());
}

json truth_json(const GroundTruth& g, const std::string& file, const std::string& sum,
                DatasetFormat format) {
  json j;
  j["dataset"] = file;
  j["checksum"] = sum;
  j["format"] = std::string(to_string(format));
  j["seed"] = g.seed;
  j["neurons"] = g.spikes.num_neurons();
  j["bins"] = g.spikes.num_bins();
  j["bin_ms"] = g.spikes.bin_ms;
  j["basis"] = to_json(g.basis.phi);
  j["model"] = std::string(to_string(g.obs.kind));
  j["prior"] = g.spec.name();
  j["adjacency"] = to_json(g.net.adjacency);
  j["weights"] = to_json(g.net.weights);
  j["bias"] = std::vector<double>(g.net.bias.data(), g.net.bias.data() + g.net.bias.size());
  if (const auto* d = std::get_if<DistanceAdjacency>(&g.spec.adjacency)) {
    j["adjacency_locations"] = to_json(d->locations);
    j["gamma0"] = d->gamma0;
  }
  if (const auto* s = std::get_if<SbmAdjacency>(&g.spec.adjacency)) {
    j["adjacency_labels"] = s->labels;
  }
  if (const auto* s = std::get_if<SbmWeights>(&g.spec.weights)) j["weight_labels"] = s->labels;
  if (const auto* d = std::get_if<DistanceWeights>(&g.spec.weights)) {
    j["weight_locations"] = to_json(d->locations);
  }
  return j;
}

struct FitData {
  SpikeData observed;
  SpikeData heldout;
  std::vector<int> observed_columns;
  std::string checksum;
};

FitData load_fit_data(const RunConfig& config) {
  if (config.data_path.empty()) throw ConfigError("data.path is not set");
  const SpikeData all = load_dataset(config.data_path);
  FitData d;
  d.checksum = file_checksum(config.data_path);
  for (int h : config.heldout) {
    if (h < 0 || h >= all.num_neurons()) {
      throw ConfigError("data.heldout: neuron " + std::to_string(h) + " not in dataset with " +
                        std::to_string(all.num_neurons()) + " neurons");
    }
  }
  for (int n = 0; n < all.num_neurons(); ++n) {
    if (std::find(config.heldout.begin(), config.heldout.end(), n) == config.heldout.end()) {
      d.observed_columns.push_back(n);
    }
  }
  if (d.observed_columns.empty()) throw ConfigError("data.heldout leaves no observed neurons");
  const CountModel model{config.count, config.nu};
  for (Eigen::Index t = 0; t < all.counts.rows(); ++t) {
    for (Eigen::Index n = 0; n < all.counts.cols(); ++n) {
      try {
        model.check_count(all.counts(t, n));
      } catch (const std::domain_error& e) {
        throw DataError(config.data_path + ": bin " + std::to_string(t) + ", neuron " +
                        std::to_string(n) + ": " + e.what());
      }
    }
  }
  d.observed = select_neurons(all, d.observed_columns);
  d.heldout = select_neurons(all, config.heldout);
  return d;
}

void run_stored_chain(ChainStore& store, ChainState& state, const SpikeData& spikes,
                      const FilteredSpikes& shat, const RunConfig& config, int threads,
                      std::ostream& log) {
  const SweepConfig sweep = config.sweep(resolve_threads(threads));
  const auto progress = [&](const ProgressRecord& record, const ChainState& s) {
    const std::string line = record.format();
    log << line << '\n';
    store.log_progress(line);
    if (sweep.retains(s.iteration)) {
      store.append(Sample{s.iteration, s.net, s.spec, s.obs.nu, record.log_prob});
    }
    if (s.iteration % config.checkpoint_every == 0 || s.iteration == config.iterations) {
      store.checkpoint(s);
    }
  };
  run_chain(state, spikes, shat, sweep, progress);
  if (state.iteration != store.manifest().iterations_completed) store.checkpoint(state);
}

struct StoredFit {
  ChainStore store;
  RunConfig config;
  Chain chain;
};

StoredFit open_fit(const fs::path& dir) {
  StoredFit f{ChainStore::open(dir), {}, {}};
  f.config = parse_config(f.store.manifest().config, (dir / "manifest.json").string());
  f.chain = f.store.load_chain();
  if (f.chain.samples.empty()) {
    throw ConfigError(dir.string() + ": chain has no retained samples");
  }
  return f;
}

struct EvalData {
  SpikeData observed;
  SpikeData heldout;
  Basis basis;
  FilteredSpikes shat;
};

EvalData load_eval_data(const StoredFit& f) {
  const ChainManifest& m = f.store.manifest();
  if (f.config.heldout.empty()) throw ConfigError("data.heldout is empty; nothing to predict");
  if (file_checksum(m.dataset_path) != m.dataset_checksum) {
    throw DataError(m.dataset_path + ": dataset changed since the chain was fit");
  }
  const SpikeData all = load_dataset(m.dataset_path);
  EvalData d;
  d.observed = select_neurons(all, m.observed);
  d.heldout = select_neurons(all, f.config.heldout);
  d.basis = f.config.basis(all.bin_ms);
  d.shat = filter_spikes(d.observed, d.basis);
  return d;
}

PredictOptions predict_options(const RunConfig& config, const EvalOverrides& o, int threads) {
  PredictOptions opts;
  opts.model = CountModel{config.count, config.nu};
  opts.Q = o.samples.value_or(config.predict_samples);
  opts.threads = resolve_threads(threads);
  return opts;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw DataError(path.string() + ": cannot open for writing");
  os.precision(10);
  return os;
}

void write_recovery(const Chain& chain, const std::vector<int>& observed,
                    const fs::path& truth_path, const fs::path& out) {
  const std::string source = truth_path.string();
  json t;
  try {
    t = json::parse(read_file(truth_path));
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  const auto all_adj = matrix_from<Eigen::MatrixXi>(t.at("adjacency"), source);
  const int n = static_cast<int>(observed.size());
  for (int c : observed) {
    if (c >= all_adj.rows()) throw DataError(source + ": truth has fewer neurons than the fit");
  }
  Eigen::MatrixXi adj(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) adj(i, j) = all_adj(observed[i], observed[j]);
  }

  const Eigen::MatrixXd marg = edge_marginals(chain);
  auto em = open_out(out / "edge_marginals.tsv");
  em << "# posterior probability of each edge m->n over retained samples\n"
     << "source\ttarget\tprobability\ttrue_edge\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) em << i << '\t' << j << '\t' << marg(i, j) << '\t' << adj(i, j) << '\n';
  }

  auto rec = open_out(out / "recovery.tsv");
  rec << "metric\tvalue\n";
  const auto auc = adjacency_auc(marg, adj);
  rec << "adjacency_auc\t";
  if (auc) rec << *auc << '\n'; else rec << "nan\n";

  const auto locations = chain_locations(chain, true);
  if (t.contains("adjacency_locations") && !locations.empty() && n >= 3) {
    const auto all_loc = matrix_from<Eigen::MatrixXd>(t.at("adjacency_locations"), source);
    Eigen::MatrixXd loc(n, all_loc.cols());
    for (int i = 0; i < n; ++i) loc.row(i) = all_loc.row(observed[i]);
    const DistanceRecovery dr = distance_recovery(locations, loc);
    rec << "distance_correlation\t" << dr.correlation << '\n'
        << "procrustes_residual\t" << dr.residual << '\n';
    auto lf = open_out(out / "locations.tsv");
    lf << "# inferred locations after Procrustes alignment to the truth\nneuron";
    for (Eigen::Index d = 0; d < loc.cols(); ++d) lf << "\ttrue_" << d;
    for (Eigen::Index d = 0; d < loc.cols(); ++d) lf << "\taligned_" << d;
    lf << '\n';
    for (int i = 0; i < n; ++i) {
      lf << i;
      for (Eigen::Index d = 0; d < loc.cols(); ++d) lf << '\t' << loc(i, d);
      for (Eigen::Index d = 0; d < loc.cols(); ++d) lf << '\t' << dr.aligned(i, d);
      lf << '\n';
    }
    auto df = open_out(out / "distance_pairs.tsv");
    df << "source\ttarget\ttrue_distance\tinferred_distance\n";
    Eigen::Index k = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b, ++k) {
        df << a << '\t' << b << '\t' << dr.true_distances(k) << '\t' << dr.inferred_distances(k)
           << '\n';
      }
    }
  } else {
    rec << "distance_correlation\tnan\n";
  }

  auto labels = chain_labels(chain, false);
  if (labels.empty()) labels = chain_labels(chain, true);
  if (t.contains("weight_labels") && !labels.empty()) {
    const auto all_labels = t.at("weight_labels").get<std::vector<int>>();
    std::vector<int> truth_labels;
    for (int c : observed) truth_labels.push_back(all_labels.at(c));
    rec << "type_accuracy\t" << type_recovery(labels, truth_labels) << '\n';
  } else {
    rec << "type_accuracy\tnan\n";
  }
}

void write_scores(const std::vector<ModelScore>& scores, const std::vector<int>& heldout,
                  const fs::path& out) {
  auto rk = open_out(out / "ranking.tsv");
  rk << "# held-out predictive log likelihood: mean and std_error in nats per held-out neuron,"
        " per_bin in nats per neuron per bin\n"
     << "rank\tmodel\tmean\tstd_error\tper_bin\tdiff_to_best\tdiff_std_error\n";
  for (const auto& s : scores) {
    auto [diff, se] = score_difference(s, scores.front());
    if (&s == &scores.front()) se = 0.0;
    rk << s.rank << '\t' << s.name << '\t' << s.mean << '\t' << s.std_error << '\t' << s.per_bin
       << '\t' << diff << '\t' << se << '\n';
  }
  auto pn = open_out(out / "per_neuron.tsv");
  pn << "# value and std_error in nats, per_bin in nats per bin\n"
     << "model\tneuron\tvalue\tstd_error\tper_bin\tQ\n";
  for (const auto& s : scores) {
    for (std::size_t j = 0; j < s.per_neuron.size(); ++j) {
      const auto& e = s.per_neuron[j];
      pn << s.name << '\t' << heldout[j] << '\t' << e.value << '\t' << e.std_error << '\t'
         << e.per_bin() << '\t' << e.Q << '\n';
    }
  }
}

}  // namespace

GroundTruth cmd_simulate(const RunConfig& config, const fs::path& out) {
  config.validate();
  GroundTruth g;
  if (config.simulate_neurons > 0 || config.simulate_bins > 0) {
    const auto scale = parse_benchmark_scale(config.simulate_scale);
    const int nn = scale == BenchmarkScale::kDesk ? 20 : 200;
    const int tt = scale == BenchmarkScale::kDesk ? 50000 : 60000;
    g = make_synthetic_benchmark(config.simulate_neurons > 0 ? config.simulate_neurons : nn,
                                 config.simulate_bins > 0 ? config.simulate_bins : tt,
                                 config.seed);
  } else {
    g = make_synthetic_benchmark(parse_benchmark_scale(config.simulate_scale), config.seed);
  }
  ensure_dir(out);
  const std::string file = dataset_name(config.data_format);
  save_dataset(g.spikes, out / file, config.data_format);
  const json j = truth_json(g, file, file_checksum(out / file), config.data_format);
  write_file(out / "truth.json", j.dump(1) + "\n");
  return g;
}

void cmd_fit(const RunConfig& config, const fs::path& out, int threads, std::ostream& log) {
  config.validate();
  const FitData d = load_fit_data(config);
  ChainManifest m;
  m.seed = config.seed;
  m.num_neurons = d.observed.num_neurons();
  m.num_basis = static_cast<int>(config.tau_ms.size());
  m.config = serialize_config(config);
  m.dataset_path = fs::absolute(config.data_path).lexically_normal().string();
  m.dataset_checksum = d.checksum;
  m.observed = d.observed_columns;
  ChainStore store = ChainStore::create(out, m);

  const Basis basis = config.basis(d.observed.bin_ms);
  const FilteredSpikes shat = filter_spikes(d.observed, basis);
  ChainState state = initialize_state(d.observed, shat, config.obs_model(d.observed.num_neurons()),
                                      config.adjacency, config.weights, config.hyperpriors(),
                                      config.classes, config.dim, config.seed);
  store.checkpoint(state);
  run_stored_chain(store, state, d.observed, shat, config, threads, log);
}

void cmd_resume(const fs::path& dir, const std::optional<RunConfig>& config, int threads,
                std::ostream& log) {
  ChainStore store = ChainStore::open(dir);
  const ChainManifest& m = store.manifest();
  const RunConfig stored = parse_config(m.config, (dir / "manifest.json").string());
  if (config && !(*config == stored)) {
    throw ConfigError(dir.string() + ": config differs from the one the chain was started with");
  }
  if (file_checksum(m.dataset_path) != m.dataset_checksum) {
    throw DataError(m.dataset_path + ": dataset changed since the chain was started");
  }
  const SpikeData spikes = select_neurons(load_dataset(m.dataset_path), m.observed);
  const FilteredSpikes shat = filter_spikes(spikes, stored.basis(spikes.bin_ms));
  ChainState state = store.load_checkpoint();
  store.truncate_after(state.iteration);
  run_stored_chain(store, state, spikes, shat, stored, threads, log);
}

std::vector<ModelScore> cmd_predict(const fs::path& chain_dir, const fs::path& out, int threads,
                                    const EvalOverrides& overrides) {
  const StoredFit f = open_fit(chain_dir);
  const EvalData d = load_eval_data(f);
  const auto scores = compare_models({{f.chain.samples.front().spec.name(), &f.chain}}, d.shat,
                                     d.basis, d.heldout,
                                     predict_options(f.config, overrides, threads),
                                     overrides.seed.value_or(f.config.seed));
  ensure_dir(out);
  const ModelScore& s = scores.front();
  auto os = open_out(out / "predictive.tsv");
  os << "# held-out predictive log likelihood: value and std_error in nats per held-out neuron,"
        " per_bin in nats per neuron per bin\n"
     << "neuron\tvalue\tstd_error\tper_bin\tQ\n";
  for (std::size_t j = 0; j < s.per_neuron.size(); ++j) {
    const auto& e = s.per_neuron[j];
    os << f.config.heldout[j] << '\t' << e.value << '\t' << e.std_error << '\t' << e.per_bin()
       << '\t' << e.Q << '\n';
  }
  os << "mean\t" << s.mean << '\t' << s.std_error << '\t' << s.per_bin << '\t'
     << s.per_neuron.front().Q << '\n';

  const std::string truth = overrides.truth_path.value_or(f.config.truth_path);
  if (!truth.empty()) write_recovery(f.chain, f.store.manifest().observed, truth, out);
  return scores;
}

std::vector<ModelScore> cmd_compare(const std::vector<fs::path>& chain_dirs, const fs::path& out,
                                    int threads, const EvalOverrides& overrides) {
  if (chain_dirs.empty()) throw ConfigError("compare: no chains given");
  std::vector<StoredFit> fits;
  for (const auto& dir : chain_dirs) fits.push_back(open_fit(dir));
  const StoredFit& first = fits.front();
  for (std::size_t i = 1; i < fits.size(); ++i) {
    const ChainManifest& a = first.store.manifest();
    const ChainManifest& b = fits[i].store.manifest();
    if (a.dataset_checksum != b.dataset_checksum || a.observed != b.observed ||
        first.config.heldout != fits[i].config.heldout) {
      throw ConfigError(chain_dirs[i].string() + ": fit on different data than " +
                        chain_dirs[0].string());
    }
    if (first.config.tau_ms != fits[i].config.tau_ms ||
        first.config.dt_max != fits[i].config.dt_max) {
      throw ConfigError(chain_dirs[i].string() + ": basis differs from " + chain_dirs[0].string());
    }
  }
  const EvalData d = load_eval_data(first);

  std::map<std::string, int> uses;
  for (const auto& f : fits) ++uses[f.chain.samples.front().spec.name()];
  std::vector<ModelFit> models;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    std::string name = fits[i].chain.samples.front().spec.name();
    if (uses[name] > 1) name += "@" + chain_dirs[i].filename().string();
    models.push_back({name, &fits[i].chain});
  }
  const auto scores = compare_models(models, d.shat, d.basis, d.heldout,
                                     predict_options(first.config, overrides, threads),
                                     overrides.seed.value_or(first.config.seed));
  ensure_dir(out);
  write_scores(scores, first.config.heldout, out);
  return scores;
}

std::vector<BenchRow> cmd_bench(const RunConfig& config, const fs::path& out, int threads,
                                std::ostream& log) {
  config.validate();
  ensure_dir(out);
  auto os = open_out(out / "bench.tsv");
  os << "# seconds per iteration; t_obs = auxiliary variable sampling, t_net = network sampling\n"
     << "axis\tvalue\tneurons\tbins\trho\tedges_per_neuron\tt_obs\tt_net\n";
  std::vector<BenchRow> rows;
  for (double value : config.bench_grid) {
    BenchRow row{value, config.bench_neurons, config.bench_bins, config.bench_rho, 0, 0, 0};
    if (config.bench_axis == "T") row.bins = static_cast<int>(value);
    if (config.bench_axis == "N") row.neurons = static_cast<int>(value);
    if (config.bench_axis == "rho") row.rho = value;
    if (row.neurons < 1 || row.bins < 1 || row.rho < 0.0 || row.rho > 1.0) {
      throw ConfigError("bench.grid: value " + std::to_string(value) + " out of range for axis " +
                        config.bench_axis);
    }

    const GroundTruth g = make_density_benchmark(row.neurons, row.bins, row.rho, config.seed);
    const FilteredSpikes shat = filter_spikes(g.spikes, g.basis);
    ChainState state = initialize_state(g.spikes, shat, g.obs, AdjacencyKind::kIndependent,
                                        WeightKind::kIndependent, config.hyperpriors(), 1, 1,
                                        config.seed);
    state.net = g.net;
    state.spec.adjacency = IndependentAdjacency{row.rho};
    state.psi = activation_matrix(shat, state.net);
    SweepConfig sc = config.sweep(resolve_threads(threads));
    sc.toggles.globals = false;

    sweep(state, g.spikes, shat, sc);  // warm-up
    for (int it = 0; it < config.bench_iterations; ++it) {
      const PhaseTimes t = sweep(state, g.spikes, shat, sc);
      row.t_obs += t.obs;
      row.t_net += t.net;
      row.edges += static_cast<double>(state.net.adjacency.sum()) / row.neurons;
    }
    row.t_obs /= config.bench_iterations;
    row.t_net /= config.bench_iterations;
    row.edges /= config.bench_iterations;
    os << config.bench_axis << '\t' << value << '\t' << row.neurons << '\t' << row.bins << '\t'
       << row.rho << '\t' << row.edges << '\t' << row.t_obs << '\t' << row.t_net << std::endl;
    char line[200];
    std::snprintf(line, sizeof(line), "%s=%g N=%d T=%d edges/neuron=%.2f t_obs=%.4f t_net=%.4f",
                  config.bench_axis.c_str(), value, row.neurons, row.bins, row.edges, row.t_obs,
                  row.t_net);
    log << line << std::endl;
    rows.push_back(row);
  }
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian network GLMs for spike trains"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 1;
  std::string resume_dir;
  std::vector<std::string> chains;

  app.add_option("--config", config_path, "config file");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);

  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset and its ground truth");
  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler and store the chain");
  fit->add_option("--resume", resume_dir, "continue the chain stored in this directory");
  auto* predict = app.add_subcommand("predict", "held-out log likelihood and recovery metrics");
  predict->add_option("chain", chains, "chain directory")->expected(1);
  auto* compare = app.add_subcommand("compare", "rank fitted models by held-out likelihood");
  compare->add_option("chains", chains, "chain directories");
  auto* bench = app.add_subcommand("bench", "time the sampler phases over a grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    std::optional<RunConfig> config;
    if (!config_path.empty()) config = load_config(config_path);
    if (config && seed) config->seed = *seed;
    RunConfig defaults;
    if (seed) defaults.seed = *seed;
    const auto need_out = [&] {
      if (out_dir.empty()) throw ConfigError("--out is required");
      return fs::path(out_dir);
    };
    EvalOverrides overrides;
    overrides.seed = seed;
    if (config) {
      overrides.samples = config->predict_samples;
      if (!config->truth_path.empty()) overrides.truth_path = config->truth_path;
    }

    if (*simulate) {
      const GroundTruth g = cmd_simulate(config.value_or(defaults), need_out());
      out << "simulated " << g.spikes.num_neurons() << " neurons x " << g.spikes.num_bins()
          << " bins into " << out_dir << '\n';
    } else if (*fit) {
      if (!resume_dir.empty()) {
        cmd_resume(resume_dir, config, threads, out);
      } else {
        if (!config) throw ConfigError("fit: --config is required");
        cmd_fit(*config, need_out(), threads, out);
      }
    } else if (*predict) {
      const auto scores = cmd_predict(chains.front(), need_out(), threads, overrides);
      out << "mean held-out log likelihood " << scores.front().mean << " +/- "
          << scores.front().std_error << " nats/neuron (" << scores.front().per_bin
          << " nats/neuron/bin)\n";
    } else if (*compare) {
      if (chains.empty() && config) chains = config->compare_chains;
      std::vector<fs::path> dirs(chains.begin(), chains.end());
      for (const auto& s : cmd_compare(dirs, need_out(), threads, overrides)) {
        out << s.rank << ' ' << s.name << ' ' << s.mean << " +/- " << s.std_error << '\n';
      }
    } else if (*bench) {
      cmd_bench(config.value_or(defaults), need_out(), threads, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace nglm::cli
