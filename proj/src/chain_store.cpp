#include "nglm/chain_store.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nglm/errors.hpp"
#include "nglm/io.hpp"

namespace nglm {

namespace {

using json = nlohmann::json;

constexpr char kSamplesMagic[7] = {'N', 'G', 'L', 'M', 'C', 'H', 'N'};

void put_net(binary::Writer& w, const NetworkState& net) {
  w.put<std::int32_t>(net.num_basis);
  w.put_matrix(net.adjacency);
  w.put_matrix(net.weights);
  w.put_matrix(net.bias);
}

NetworkState get_net(binary::Reader& r) {
  NetworkState net;
  net.num_basis = r.get<std::int32_t>();
  net.adjacency = r.get_matrix<Eigen::MatrixXi>();
  net.weights = r.get_matrix<Eigen::MatrixXd>();
  net.bias = r.get_matrix<Eigen::VectorXd>();
  return net;
}

void put_hyper(binary::Writer& w, const Hyperpriors& h) {
  w.put(h.rho.alpha);
  w.put(h.rho.beta);
  w.put(h.pi_alpha);
  w.put_matrix(h.weights.mean);
  w.put(h.weights.kappa);
  w.put_matrix(h.weights.scale);
  w.put(h.weights.dof);
  for (double v : {h.distance_baseline.mean, h.distance_baseline.kappa,
                   h.distance_baseline.shape, h.distance_baseline.rate}) {
    w.put(v);
  }
  w.put(h.location_scale.shape);
  w.put(h.location_scale.rate);
  w.put<std::uint8_t>(h.learn_location_scale);
  w.put(h.fixed_location_var);
  w.put(h.gamma0_mean);
  w.put(h.gamma0_var);
  w.put<std::uint8_t>(h.learn_bias);
  for (double v : {h.bias_hyper.mean, h.bias_hyper.kappa, h.bias_hyper.shape, h.bias_hyper.rate}) {
    w.put(v);
  }
  w.put(h.bias_mean);
  w.put(h.bias_var);
  w.put(h.nu_shape);
  w.put(h.nu_rate);
}

Hyperpriors get_hyper(binary::Reader& r) {
  Hyperpriors h;
  h.rho.alpha = r.get<double>();
  h.rho.beta = r.get<double>();
  h.pi_alpha = r.get<double>();
  h.weights.mean = r.get_matrix<Eigen::VectorXd>();
  h.weights.kappa = r.get<double>();
  h.weights.scale = r.get_matrix<Eigen::MatrixXd>();
  h.weights.dof = r.get<double>();
  h.distance_baseline.mean = r.get<double>();
  h.distance_baseline.kappa = r.get<double>();
  h.distance_baseline.shape = r.get<double>();
  h.distance_baseline.rate = r.get<double>();
  h.location_scale.shape = r.get<double>();
  h.location_scale.rate = r.get<double>();
  h.learn_location_scale = r.get<std::uint8_t>() != 0;
  h.fixed_location_var = r.get<double>();
  h.gamma0_mean = r.get<double>();
  h.gamma0_var = r.get<double>();
  h.learn_bias = r.get<std::uint8_t>() != 0;
  h.bias_hyper.mean = r.get<double>();
  h.bias_hyper.kappa = r.get<double>();
  h.bias_hyper.shape = r.get<double>();
  h.bias_hyper.rate = r.get<double>();
  h.bias_mean = r.get<double>();
  h.bias_var = r.get<double>();
  h.nu_shape = r.get<double>();
  h.nu_rate = r.get<double>();
  return h;
}

void put_dual(binary::Writer& w, const DualAveraging& d) {
  for (double v : {d.step_size, d.target_accept, d.gamma, d.t0, d.kappa, d.mu, d.log_step_bar, d.h_bar}) {
    w.put(v);
  }
  w.put<std::int32_t>(d.count);
}

DualAveraging get_dual(binary::Reader& r) {
  DualAveraging d;
  for (double* v : {&d.step_size, &d.target_accept, &d.gamma, &d.t0, &d.kappa, &d.mu,
                    &d.log_step_bar, &d.h_bar}) {
    *v = r.get<double>();
  }
  d.count = r.get<std::int32_t>();
  return d;
}

std::string read_all(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  return read_file(path);
}

// Writes to a sibling temp file and renames it over `path`.
void replace_file(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, contents);
  std::filesystem::rename(tmp, path);
}

std::string samples_header() {
  std::string h(kSamplesMagic, sizeof(kSamplesMagic));
  h.push_back(static_cast<char>(kChainFormatVersion));
  return h;
}

// Complete records in samples.bin with their byte ranges; a torn tail is ignored.
std::vector<std::pair<std::size_t, std::size_t>> scan_records(const std::string& bytes,
                                                              const std::string& source) {
  const std::string header = samples_header();
  if (bytes.size() < header.size() || bytes.compare(0, header.size(), header) != 0) {
    throw DataError(source + ": not a chain sample file (version " +
                    std::to_string(kChainFormatVersion) + ")");
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t pos = header.size();
  while (bytes.size() - pos >= 8) {
    std::uint64_t len;
    std::memcpy(&len, bytes.data() + pos, 8);
    len = binary::to_little(len);
    if (bytes.size() - pos - 8 < len) break;
    out.emplace_back(pos + 8, static_cast<std::size_t>(len));
    pos += 8 + static_cast<std::size_t>(len);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> sample_record_fields() {
  return {{"iteration", "i32"},
          {"log_prob", "f64"},
          {"num_basis", "i32"},
          {"adjacency", "matrix<i32> N x N, a(m, n) = m -> n"},
          {"weights", "matrix<f64> N x N*K"},
          {"bias", "matrix<f64> N x 1"},
          {"nu", "matrix<f64> N x 1"},
          {"prior", "prior spec: adjacency variant, weight variant, hyperpriors, bias prior"}};
}

void encode_spec(binary::Writer& w, const PriorSpec& spec) {
  w.put<std::uint8_t>(static_cast<std::uint8_t>(spec.adjacency.index()));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, IndependentAdjacency>) {
          w.put(p.rho);
        } else if constexpr (std::is_same_v<T, SbmAdjacency>) {
          w.put_matrix(p.pi);
          w.put_matrix(p.rho);
          w.put_ints(p.labels);
        } else if constexpr (std::is_same_v<T, DistanceAdjacency>) {
          w.put_matrix(p.locations);
          w.put(p.gamma0);
          w.put(p.location_var);
        }
      },
      spec.adjacency);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(spec.weights.index()));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, IndependentWeights>) {
          w.put_matrix(p.mean);
          w.put_matrix(p.cov);
        } else if constexpr (std::is_same_v<T, SbmWeights>) {
          w.put_matrix(p.pi);
          w.put<std::uint32_t>(static_cast<std::uint32_t>(p.mean.size()));
          for (std::size_t i = 0; i < p.mean.size(); ++i) {
            w.put_matrix(p.mean[i]);
            w.put_matrix(p.cov[i]);
          }
          w.put_ints(p.labels);
        } else {
          w.put_matrix(p.locations);
          w.put(p.mu0);
          w.put(p.variance);
          w.put(p.location_var);
          w.put<std::int32_t>(p.num_basis);
        }
      },
      spec.weights);
  put_hyper(w, spec.hyper);
  w.put(spec.bias.mean);
  w.put(spec.bias.variance);
}

PriorSpec decode_spec(binary::Reader& r) {
  PriorSpec spec;
  switch (r.get<std::uint8_t>()) {
    case 0:
      spec.adjacency = DenseAdjacency{};
      break;
    case 1:
      spec.adjacency = IndependentAdjacency{r.get<double>()};
      break;
    case 2: {
      SbmAdjacency p;
      p.pi = r.get_matrix<Eigen::VectorXd>();
      p.rho = r.get_matrix<Eigen::MatrixXd>();
      p.labels = r.get_ints();
      spec.adjacency = std::move(p);
      break;
    }
    case 3: {
      DistanceAdjacency p;
      p.locations = r.get_matrix<Eigen::MatrixXd>();
      p.gamma0 = r.get<double>();
      p.location_var = r.get<double>();
      spec.adjacency = std::move(p);
      break;
    }
    default:
      throw DataError(r.source() + ": unknown adjacency prior tag");
  }
  switch (r.get<std::uint8_t>()) {
    case 0: {
      IndependentWeights p;
      p.mean = r.get_matrix<Eigen::VectorXd>();
      p.cov = r.get_matrix<Eigen::MatrixXd>();
      spec.weights = std::move(p);
      break;
    }
    case 1: {
      SbmWeights p;
      p.pi = r.get_matrix<Eigen::VectorXd>();
      const auto blocks = r.get<std::uint32_t>();
      for (std::uint32_t i = 0; i < blocks; ++i) {
        p.mean.push_back(r.get_matrix<Eigen::VectorXd>());
        p.cov.push_back(r.get_matrix<Eigen::MatrixXd>());
      }
      p.labels = r.get_ints();
      spec.weights = std::move(p);
      break;
    }
    case 2: {
      DistanceWeights p;
      p.locations = r.get_matrix<Eigen::MatrixXd>();
      p.mu0 = r.get<double>();
      p.variance = r.get<double>();
      p.location_var = r.get<double>();
      p.num_basis = r.get<std::int32_t>();
      spec.weights = std::move(p);
      break;
    }
    default:
      throw DataError(r.source() + ": unknown weight prior tag");
  }
  spec.hyper = get_hyper(r);
  spec.bias.mean = r.get<double>();
  spec.bias.variance = r.get<double>();
  return spec;
}

void encode_sample(binary::Writer& w, const Sample& s) {
  w.put<std::int32_t>(s.iteration);
  w.put(s.log_prob);
  put_net(w, s.net);
  w.put_matrix(s.nu);
  encode_spec(w, s.spec);
}

Sample decode_sample(binary::Reader& r) {
  Sample s;
  s.iteration = r.get<std::int32_t>();
  s.log_prob = r.get<double>();
  s.net = get_net(r);
  s.nu = r.get_matrix<Eigen::VectorXd>();
  s.spec = decode_spec(r);
  return s;
}

std::vector<char> sample_bytes(const Sample& sample) {
  binary::Writer w;
  encode_sample(w, sample);
  return w.bytes();
}

void encode_state(binary::Writer& w, const ChainState& s) {
  w.put<std::int32_t>(s.iteration);
  put_net(w, s.net);
  encode_spec(w, s.spec);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(s.obs.kind));
  w.put_matrix(s.obs.nu);
  w.put_matrix(s.psi);
  w.put_matrix(s.omega);
  put_dual(w, s.hmc_adjacency);
  put_dual(w, s.hmc_weights);
}

ChainState decode_state(binary::Reader& r) {
  ChainState s;
  s.iteration = r.get<std::int32_t>();
  s.net = get_net(r);
  s.spec = decode_spec(r);
  const auto kind = r.get<std::uint8_t>();
  if (kind > 2) throw DataError(r.source() + ": unknown observation model tag");
  s.obs.kind = static_cast<CountKind>(kind);
  s.obs.nu = r.get_matrix<Eigen::VectorXd>();
  s.psi = r.get_matrix<Eigen::MatrixXd>();
  s.omega = r.get_matrix<Eigen::MatrixXd>();
  s.hmc_adjacency = get_dual(r);
  s.hmc_weights = get_dual(r);
  return s;
}

ChainStore ChainStore::create(const std::filesystem::path& dir, ChainManifest manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory: " + ec.message());
  ChainStore store;
  store.dir_ = dir;
  store.manifest_ = std::move(manifest);
  store.manifest_.format_version = kChainFormatVersion;
  store.manifest_.iterations_completed = 0;
  store.manifest_.num_samples = 0;
  replace_file(dir / "samples.bin", samples_header());
  std::filesystem::remove(dir / "checkpoint.bin", ec);
  write_file(dir / "progress.log", "");
  store.write_manifest();
  return store;
}

ChainStore ChainStore::open(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  json j;
  try {
    j = json::parse(read_file(path));
    ChainStore store;
    store.dir_ = dir;
    ChainManifest& m = store.manifest_;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kChainFormatVersion) {
      throw DataError(path.string() + ": unsupported chain format version " +
                      std::to_string(m.format_version));
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations_completed = j.at("iterations_completed").get<int>();
    m.num_samples = j.at("num_samples").get<int>();
    m.num_neurons = j.at("num_neurons").get<int>();
    m.num_basis = j.at("num_basis").get<int>();
    m.config = j.at("config").get<std::string>();
    m.dataset_path = j.at("dataset").at("path").get<std::string>();
    m.dataset_checksum = j.at("dataset").at("checksum").get<std::string>();
    m.observed = j.at("dataset").at("observed").get<std::vector<int>>();
    return store;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed manifest: " + e.what());
  }
}

void ChainStore::write_manifest() const {
  json j;
  j["format_version"] = manifest_.format_version;
  j["seed"] = manifest_.seed;
  j["iterations_completed"] = manifest_.iterations_completed;
  j["num_samples"] = manifest_.num_samples;
  j["num_neurons"] = manifest_.num_neurons;
  j["num_basis"] = manifest_.num_basis;
  j["config"] = manifest_.config;
  j["dataset"] = {{"path", manifest_.dataset_path},
                  {"checksum", manifest_.dataset_checksum},
                  {"observed", manifest_.observed}};
  j["substreams"] = "splitmix64(seed, phase, iteration, index); phases init=1 omega=2 neuron=3 "
                    "observation=4 latent=5 global=6 simulate=7 predict=8 network=9";
  json fields = json::array();
  for (const auto& [name, type] : sample_record_fields()) fields.push_back({{"name", name}, {"type", type}});
  j["record_fields"] = fields;
  j["record_framing"] = "u64 little-endian byte length, then fields in order; matrices are u32 rows, u32 cols, column-major values";
  replace_file(dir_ / "manifest.json", j.dump(2) + "\n");
}

void ChainStore::append(const Sample& sample) {
  binary::Writer w;
  encode_sample(w, sample);
  binary::Writer framed;
  framed.put<std::uint64_t>(w.bytes().size());
  std::ofstream os(dir_ / "samples.bin", std::ios::binary | std::ios::app);
  if (!os) throw DataError((dir_ / "samples.bin").string() + ": cannot append");
  framed.write_to(os);
  w.write_to(os);
  if (!os) throw DataError((dir_ / "samples.bin").string() + ": write failed");
  ++manifest_.num_samples;
}

void ChainStore::checkpoint(const ChainState& state) {
  binary::Writer w;
  encode_state(w, state);
  replace_file(dir_ / "checkpoint.bin", std::string_view(w.bytes().data(), w.bytes().size()));
  manifest_.iterations_completed = state.iteration;
  write_manifest();
}

ChainState ChainStore::load_checkpoint() const {
  const auto path = dir_ / "checkpoint.bin";
  if (!std::filesystem::exists(path)) throw DataError(path.string() + ": no checkpoint to resume from");
  const std::string bytes = read_file(path);
  binary::Reader r(bytes.data(), bytes.size(), path.string());
  ChainState state = decode_state(r);
  if (!r.done()) throw DataError(path.string() + ": trailing bytes after checkpoint");
  return state;
}

Chain ChainStore::load_chain() const {
  const auto path = dir_ / "samples.bin";
  const std::string bytes = read_all(path);
  Chain chain;
  chain.seed = manifest_.seed;
  for (const auto& [offset, len] : scan_records(bytes, path.string())) {
    binary::Reader r(bytes.data() + offset, len, path.string());
    chain.samples.push_back(decode_sample(r));
    if (!r.done()) throw DataError(path.string() + ": record length mismatch");
  }
  return chain;
}

void ChainStore::truncate_after(int iteration) {
  const auto path = dir_ / "samples.bin";
  const std::string bytes = read_all(path);
  std::string kept = samples_header();
  int count = 0;
  for (const auto& [offset, len] : scan_records(bytes, path.string())) {
    binary::Reader r(bytes.data() + offset, len, path.string());
    if (r.get<std::int32_t>() > iteration) break;
    kept.append(bytes, offset - 8, len + 8);
    ++count;
  }
  replace_file(path, kept);
  manifest_.num_samples = count;

  const auto log_path = dir_ / "progress.log";
  if (!std::filesystem::exists(log_path)) return;
  std::istringstream is(read_all(log_path));
  std::string line, log;
  while (std::getline(is, line)) {
    int iter = 0;
    if (std::sscanf(line.c_str(), "iter=%d", &iter) == 1 && iter > iteration) break;
    log += line + '\n';
  }
  replace_file(log_path, log);
}

void ChainStore::log_progress(const std::string& line) {
  std::ofstream os(dir_ / "progress.log", std::ios::app);
  os << line << '\n';
}

}  // namespace nglm
