#include "nglm/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "nglm/errors.hpp"
#include "nglm/simulate.hpp"

namespace nglm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---- value codecs ----------------------------------------------------------

std::string format(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, r.ptr};
}
std::string format(int v) { return std::to_string(v); }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(bool v) { return v ? "true" : "false"; }
std::string format(const std::string& v) { return v; }
std::string format(CountKind v) { return std::string(to_string(v)); }
std::string format(AdjacencyKind v) { return std::string(to_string(v)); }
std::string format(WeightKind v) { return std::string(to_string(v)); }
std::string format(DatasetFormat v) { return std::string(to_string(v)); }
template <typename T>
std::string format(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format(v[i]);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

void parse(std::string_view s, double& out) { out = parse_number<double>(s); }
void parse(std::string_view s, int& out) { out = parse_number<int>(s); }
void parse(std::string_view s, std::uint64_t& out) { out = parse_number<std::uint64_t>(s); }
void parse(std::string_view s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
  } else if (s == "false" || s == "0") {
    out = false;
  } else {
    throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
  }
}
void parse(std::string_view s, std::string& out) { out = std::string(s); }
void parse(std::string_view s, CountKind& out) { out = parse_count_kind(s); }
void parse(std::string_view s, AdjacencyKind& out) { out = parse_adjacency_kind(s); }
void parse(std::string_view s, WeightKind& out) { out = parse_weight_kind(s); }
void parse(std::string_view s, DatasetFormat& out) { out = parse_dataset_format(s); }
template <typename T>
void parse(std::string_view s, std::vector<T>& out) {
  out.clear();
  for (auto item : split_list(s)) {
    T v{};
    parse(item, v);
    out.push_back(v);
  }
}

struct Entry {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <typename T>
Entry field(std::string key, T RunConfig::*member) {
  return {std::move(key), [member](const RunConfig& c) { return format(c.*member); },
          [member](RunConfig& c, std::string_view v) { parse(v, c.*member); }};
}

Entry toggle(std::string key, bool UpdateToggles::*member) {
  return {std::move(key), [member](const RunConfig& c) { return format(c.toggles.*member); },
          [member](RunConfig& c, std::string_view v) { parse(v, c.toggles.*member); }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      field("seed", &RunConfig::seed),
      field("model.count", &RunConfig::count),
      field("model.nu", &RunConfig::nu),
      field("prior.adjacency", &RunConfig::adjacency),
      field("prior.weights", &RunConfig::weights),
      field("prior.classes", &RunConfig::classes),
      field("prior.dim", &RunConfig::dim),
      field("hyper.rho.alpha", &RunConfig::rho_alpha),
      field("hyper.rho.beta", &RunConfig::rho_beta),
      field("hyper.pi_alpha", &RunConfig::pi_alpha),
      field("hyper.weight.mean", &RunConfig::weight_mean),
      field("hyper.weight.kappa", &RunConfig::weight_kappa),
      field("hyper.weight.scale", &RunConfig::weight_scale),
      field("hyper.weight.dof", &RunConfig::weight_dof),
      field("hyper.distance.mean", &RunConfig::distance_mean),
      field("hyper.distance.kappa", &RunConfig::distance_kappa),
      field("hyper.distance.shape", &RunConfig::distance_shape),
      field("hyper.distance.rate", &RunConfig::distance_rate),
      field("hyper.location.learn", &RunConfig::learn_location_scale),
      field("hyper.location.shape", &RunConfig::location_shape),
      field("hyper.location.rate", &RunConfig::location_rate),
      field("hyper.location.fixed_var", &RunConfig::fixed_location_var),
      field("hyper.gamma0.mean", &RunConfig::gamma0_mean),
      field("hyper.gamma0.var", &RunConfig::gamma0_var),
      field("hyper.bias.learn", &RunConfig::learn_bias),
      field("hyper.bias.mean", &RunConfig::bias_mean),
      field("hyper.bias.var", &RunConfig::bias_var),
      field("hyper.bias.prior_mean", &RunConfig::bias_prior_mean),
      field("hyper.bias.prior_kappa", &RunConfig::bias_prior_kappa),
      field("hyper.bias.prior_shape", &RunConfig::bias_prior_shape),
      field("hyper.bias.prior_rate", &RunConfig::bias_prior_rate),
      field("hyper.nu.shape", &RunConfig::nu_shape),
      field("hyper.nu.rate", &RunConfig::nu_rate),
      field("basis.tau_ms", &RunConfig::tau_ms),
      field("basis.dt_max", &RunConfig::dt_max),
      field("sweep.iterations", &RunConfig::iterations),
      field("sweep.burn_in", &RunConfig::burn_in),
      field("sweep.thin", &RunConfig::thin),
      field("sweep.checkpoint_every", &RunConfig::checkpoint_every),
      toggle("sweep.update.omega", &UpdateToggles::omega),
      toggle("sweep.update.adjacency", &UpdateToggles::adjacency),
      toggle("sweep.update.weights", &UpdateToggles::weights),
      toggle("sweep.update.observation", &UpdateToggles::observation),
      toggle("sweep.update.latents", &UpdateToggles::latents),
      toggle("sweep.update.globals", &UpdateToggles::globals),
      field("hmc.step_size", &RunConfig::hmc_step_size),
      field("hmc.leapfrog_steps", &RunConfig::hmc_leapfrog_steps),
      field("hmc.adapt", &RunConfig::hmc_adapt),
      field("data.path", &RunConfig::data_path),
      field("data.format", &RunConfig::data_format),
      field("data.heldout", &RunConfig::heldout),
      field("data.truth", &RunConfig::truth_path),
      field("simulate.scale", &RunConfig::simulate_scale),
      field("simulate.neurons", &RunConfig::simulate_neurons),
      field("simulate.bins", &RunConfig::simulate_bins),
      field("predict.samples", &RunConfig::predict_samples),
      field("compare.chains", &RunConfig::compare_chains),
      field("bench.axis", &RunConfig::bench_axis),
      field("bench.grid", &RunConfig::bench_grid),
      field("bench.iterations", &RunConfig::bench_iterations),
      field("bench.neurons", &RunConfig::bench_neurons),
      field("bench.bins", &RunConfig::bench_bins),
      field("bench.rho", &RunConfig::bench_rho),
  };
  return entries;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  try {
    CountModel{count, nu}.validate();
  } catch (const std::exception& e) {
    fail(std::string("model: ") + e.what());
  }
  if (classes < 1) fail("prior.classes must be >= 1");
  if (dim < 1) fail("prior.dim must be >= 1");
  for (double v : {rho_alpha, rho_beta, pi_alpha, weight_kappa, weight_scale, distance_kappa,
                   distance_shape, distance_rate, location_shape, location_rate,
                   fixed_location_var, gamma0_var, bias_var, bias_prior_kappa, bias_prior_shape,
                   bias_prior_rate, nu_shape, nu_rate}) {
    if (!(v > 0.0)) fail("hyperparameter " + format(v) + " must be positive");
  }
  if (tau_ms.empty()) fail("basis.tau_ms needs at least one time constant");
  for (double t : tau_ms) {
    if (!(t > 0.0)) fail("basis.tau_ms entries must be positive");
  }
  if (!(weight_dof > static_cast<double>(tau_ms.size()) - 1.0)) {
    fail("hyper.weight.dof must exceed K - 1");
  }
  if (dt_max < 0) fail("basis.dt_max must be >= 0");
  if (checkpoint_every < 1) fail("sweep.checkpoint_every must be >= 1");
  if (burn_in >= iterations) fail("sweep.burn_in must be below sweep.iterations");
  sweep(1).validate();
  for (int n : heldout) {
    if (n < 0) fail("data.heldout indices must be >= 0");
  }
  if (std::set<int>(heldout.begin(), heldout.end()).size() != heldout.size()) {
    fail("data.heldout lists a neuron twice");
  }
  auto check_text = [&](const std::string& key, const std::string& v, bool list_item) {
    if (v.find_first_of("#\n\r") != std::string::npos || trim(v) != v ||
        (list_item && (v.empty() || v.find(',') != std::string::npos))) {
      fail(key + " value '" + v + "' cannot be written to a config file");
    }
  };
  check_text("data.path", data_path, false);
  check_text("data.truth", truth_path, false);
  for (const auto& c : compare_chains) check_text("compare.chains", c, true);
  try {
    parse_benchmark_scale(simulate_scale);
  } catch (const std::exception& e) {
    fail(std::string("simulate.scale: ") + e.what());
  }
  if (simulate_neurons < 0 || simulate_bins < 0) fail("simulate sizes must be >= 0");
  if (predict_samples < 0) fail("predict.samples must be >= 0");
  if (bench_axis != "T" && bench_axis != "N" && bench_axis != "rho") {
    fail("bench.axis must be T, N or rho");
  }
  if (bench_grid.empty()) fail("bench.grid needs at least one point");
  for (double g : bench_grid) {
    if (!(g > 0.0)) fail("bench.grid points must be positive");
  }
  if (bench_iterations < 1 || bench_neurons < 1 || bench_bins < 1) {
    fail("bench sizes must be >= 1");
  }
  if (!(bench_rho > 0.0 && bench_rho <= 1.0)) fail("bench.rho must be in (0, 1]");
}

Hyperpriors RunConfig::hyperpriors() const {
  Hyperpriors h;
  const int k = static_cast<int>(tau_ms.size());
  h.rho = {rho_alpha, rho_beta};
  h.pi_alpha = pi_alpha;
  h.weights = NormalInverseWishart::isotropic(k, weight_mean, weight_kappa, weight_scale, weight_dof);
  h.distance_baseline = {distance_mean, distance_kappa, distance_shape, distance_rate};
  h.location_scale = {location_shape, location_rate};
  h.learn_location_scale = learn_location_scale;
  h.fixed_location_var = fixed_location_var;
  h.gamma0_mean = gamma0_mean;
  h.gamma0_var = gamma0_var;
  h.learn_bias = learn_bias;
  h.bias_hyper = {bias_prior_mean, bias_prior_kappa, bias_prior_shape, bias_prior_rate};
  h.bias_mean = bias_mean;
  h.bias_var = bias_var;
  h.nu_shape = nu_shape;
  h.nu_rate = nu_rate;
  return h;
}

Basis RunConfig::basis(double bin_ms) const {
  const double longest = *std::max_element(tau_ms.begin(), tau_ms.end());
  const int lags = dt_max > 0 ? dt_max : default_dt_max(longest, bin_ms);
  return exponential_basis(tau_ms, bin_ms, lags);
}

SweepConfig RunConfig::sweep(int threads) const {
  SweepConfig s;
  s.iterations = iterations;
  s.burn_in = burn_in;
  s.thin = thin;
  s.hmc_step_size = hmc_step_size;
  s.hmc_leapfrog_steps = hmc_leapfrog_steps;
  s.hmc_adapt = hmc_adapt;
  s.seed = seed;
  s.threads = threads;
  s.toggles = toggles;
  return s;
}

ObsModel RunConfig::obs_model(int num_neurons) const {
  return ObsModel::uniform(count, num_neurons, nu);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& entries = registry();
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const Entry& e) { return e.key == key; });
    if (it == entries.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "key '" + key + "' given twice");
    try {
      it->set(config, value);
    } catch (const std::exception& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.string());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Entry& e : registry()) out += e.key + " = " + e.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Entry& e : registry()) keys.push_back(e.key);
  return keys;
}

}  // namespace nglm
