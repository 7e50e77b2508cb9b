#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nglm/chain_store.hpp"
#include "nglm/config.hpp"
#include "nglm/errors.hpp"
#include "nglm/eval.hpp"
#include "nglm/io.hpp"
#include "nglm/simulate.hpp"

using namespace nglm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nglm_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SpikeData small_data() {
  SpikeData d;
  d.bin_ms = 2.5;
  d.counts.resize(4, 3);
  d.counts << 0, 1, 2, 3, 0, 0, 0, 7, 1, 4294967, 0, 2;
  return d;
}

std::string text_of(const SpikeData& d) {
  std::ostringstream os;
  write_dataset_text(d, os);
  return os.str();
}

void expect_data_error(const std::string& text, const std::string& fragment) {
  std::istringstream is(text);
  try {
    read_dataset_text(is, "f.txt");
    FAIL("no error for: " << text);
  } catch (const DataError& e) {
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
  }
}

}  // namespace

TEST_CASE("text dataset format") {
  const SpikeData d = small_data();
  const std::string text = text_of(d);
  CHECK(text.substr(0, text.find('\n')) == "4 3 2.5");
  CHECK(text.find("\n4294967 0 2\n") != std::string::npos);
  std::istringstream is(text);
  const SpikeData back = read_dataset_text(is, "mem");
  CHECK(back.counts == d.counts);
  CHECK(back.bin_ms == d.bin_ms);
  // blank lines and tabs are tolerated
  std::istringstream loose("2 2 1\n\n0\t1\n 3 4 \n");
  CHECK(read_dataset_text(loose, "mem").counts(1, 1) == 4);
}

TEST_CASE("text dataset errors carry path and line") {
  expect_data_error("", "f.txt:1:");
  expect_data_error("2 2\n", "f.txt:1: expected header");
  expect_data_error("2 2 1\n0 1\n", "f.txt:3: expected 2 rows");
  expect_data_error("2 2 1\n0 1\n1\n", "f.txt:3: expected 2 counts, found 1");
  expect_data_error("2 2 1\n0 1\n1 -1\n", "f.txt:3: count -1");
  expect_data_error("2 2 1\n0 x\n1 1\n", "f.txt:2: non-integer");
  expect_data_error("1 2 1\n0 1\n1 1\n", "f.txt:3: extra row");
  expect_data_error("1 2 0\n0 1\n", "bin width");
  expect_data_error("1.5 2 1\n0 1\n", "integers");
}

TEST_CASE("binary dataset layout is exact") {
  const SpikeData d = small_data();
  std::ostringstream os;
  write_dataset_binary(d, os);
  const std::string b = os.str();
  REQUIRE(b.size() == 4 + 2 + 8 + 4 + 8 + 12 * 4);
  CHECK(b.substr(0, 4) == "NGLM");
  CHECK(static_cast<unsigned char>(b[4]) == 1);
  CHECK(b[5] == 0);
  CHECK(static_cast<unsigned char>(b[6]) == 4);  // T, u64 little-endian
  CHECK(static_cast<unsigned char>(b[14]) == 3);  // N, u32
  double bin;
  std::memcpy(&bin, b.data() + 18, 8);
  CHECK(bin == 2.5);
  // row-major: second value is counts(0, 1) = 1, fourth is counts(1, 0) = 3
  CHECK(static_cast<unsigned char>(b[26 + 4]) == 1);
  CHECK(static_cast<unsigned char>(b[26 + 12]) == 3);

  std::istringstream is(b);
  CHECK(read_dataset_binary(is, "mem").counts == d.counts);
  std::istringstream cut(b.substr(0, b.size() - 1));
  CHECK_THROWS_AS(read_dataset_binary(cut, "mem"), DataError);
  std::string bad = b;
  bad[0] = 'X';
  std::istringstream badis(bad);
  CHECK_THROWS_AS(read_dataset_binary(badis, "mem"), DataError);
}

TEST_CASE("text and binary readers agree") {
  const fs::path dir = scratch("formats");
  const GroundTruth g = make_synthetic_benchmark(6, 3000, 4);
  save_dataset(g.spikes, dir / "d.txt", DatasetFormat::kText);
  save_dataset(g.spikes, dir / "d.bin", DatasetFormat::kBinary);
  const SpikeData a = load_dataset(dir / "d.txt");
  const SpikeData b = load_dataset(dir / "d.bin");
  CHECK(a.counts == g.spikes.counts);
  CHECK(a.counts == b.counts);
  CHECK(a.bin_ms == b.bin_ms);
  CHECK(file_checksum(dir / "d.bin") == checksum(read_file(dir / "d.bin")));
  CHECK(checksum("") == "cbf29ce484222325");
  CHECK(checksum("a") == "af63dc4c8601ec8c");
  CHECK_THROWS_AS(load_dataset(dir / "missing.bin"), DataError);
}

TEST_CASE("neuron selection") {
  const SpikeData d = small_data();
  const SpikeData sel = select_neurons(d, {2, 0});
  CHECK(sel.counts.col(0) == d.counts.col(2));
  CHECK(sel.counts.col(1) == d.counts.col(0));
  const SpikeData dropped = drop_neurons(d, {1});
  CHECK(dropped.num_neurons() == 2);
  CHECK(dropped.counts.col(1) == d.counts.col(2));
  CHECK_THROWS_AS(select_neurons(d, {3}), ConfigError);
  CHECK_THROWS_AS(drop_neurons(d, {-1}), ConfigError);
}

TEST_CASE("config round trip") {
  RunConfig c;
  CHECK(parse_config(serialize_config(c)) == c);

  RunConfig odd;
  odd.seed = 18446744073709551615ULL;
  odd.count = CountKind::kNegativeBinomial;
  odd.nu = 0.1 + 0.2;
  odd.adjacency = AdjacencyKind::kSbm;
  odd.weights = WeightKind::kDistance;
  odd.tau_ms = {3.0, 1.0 / 3.0, 1e-7};
  odd.heldout = {19, 3};
  odd.compare_chains = {"runs/a", "runs/b c"};
  odd.toggles.latents = false;
  odd.learn_bias = false;
  odd.data_path = "";
  odd.bench_grid = {0.05, 0.1};
  odd.bench_axis = "rho";
  odd.data_format = DatasetFormat::kText;
  odd.validate();
  const RunConfig back = parse_config(serialize_config(odd));
  CHECK(back == odd);
  CHECK(serialize_config(back) == serialize_config(odd));

  // every key is written once
  const std::string text = serialize_config(c);
  for (const auto& key : config_keys()) {
    const bool present = ("\n" + text).find("\n" + key + " = ") != std::string::npos;
    CHECK_MESSAGE(present, key);
  }
}

TEST_CASE("config parse errors") {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      parse_config(text, "run.cfg");
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(error_of("seed = 3\nsweep.itertions = 5\n").find("run.cfg:2: unknown key 'sweep.itertions'") == 0);
  CHECK(error_of("seed = 3\nseed = 4\n").find("run.cfg:2:") == 0);
  CHECK(error_of("seed 3\n").find("run.cfg:1: expected") == 0);
  CHECK(error_of("model.count = poisson\n").find("run.cfg:1: model.count") == 0);
  CHECK(error_of("sweep.iterations = ten\n").find("run.cfg:1:") == 0);
  CHECK(error_of("hmc.adapt = maybe\n").find("run.cfg:1:") == 0);
  CHECK(error_of("data.format = csv\n").find("run.cfg:1:") == 0);

  const RunConfig c = parse_config("# comment\n\n  sweep.iterations = 20   # trailing\nbasis.tau_ms = 5, 10\n");
  CHECK(c.iterations == 20);
  CHECK(c.tau_ms == std::vector<double>{5.0, 10.0});
  CHECK(c.basis(1.0).num_basis() == 2);
  CHECK(c.basis(1.0).dt_max() == 50);
  CHECK(c.hyperpriors().weights.mean.size() == 2);

  RunConfig bad;
  bad.burn_in = bad.iterations;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.count = CountKind::kBinomial;
  bad.nu = 2.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.data_path = "a#b";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.heldout = {1, 1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.simulate_scale = "huge";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("chain store reload is bitwise") {
  const fs::path dir = scratch("chain");
  const GroundTruth g = make_synthetic_benchmark(5, 1500, 2);
  const FilteredSpikes shat = filter_spikes(g.spikes, g.basis);
  for (auto [adj, wt] : {std::pair{AdjacencyKind::kDistance, WeightKind::kSbm},
                         std::pair{AdjacencyKind::kSbm, WeightKind::kDistance},
                         std::pair{AdjacencyKind::kDense, WeightKind::kIndependent}}) {
    ChainState state = initialize_state(g.spikes, shat, ObsModel::uniform(CountKind::kNegativeBinomial, 5, 2.0),
                                        adj, wt, Hyperpriors{}, 2, 2, 7);
    SweepConfig sc;
    sc.iterations = 6;
    sc.burn_in = 2;
    sc.seed = 7;
    const Chain chain = run_chain(state, g.spikes, shat, sc);

    ChainManifest m;
    m.seed = 7;
    m.num_neurons = 5;
    m.config = "seed = 7\n";
    m.observed = {0, 1, 2, 3, 4};
    ChainStore store = ChainStore::create(dir, m);
    for (const auto& s : chain.samples) store.append(s);
    store.checkpoint(state);

    const ChainStore reopened = ChainStore::open(dir);
    CHECK(reopened.manifest().iterations_completed == 6);
    CHECK(reopened.manifest().num_samples == 4);
    CHECK(reopened.manifest().observed == m.observed);
    const Chain loaded = reopened.load_chain();
    REQUIRE(loaded.samples.size() == chain.samples.size());
    for (std::size_t i = 0; i < chain.samples.size(); ++i) {
      CHECK(sample_bytes(loaded.samples[i]) == sample_bytes(chain.samples[i]));
      CHECK(loaded.samples[i].net == chain.samples[i].net);
    }
    // metrics from the reloaded chain match exactly
    CHECK(edge_marginals(loaded) == edge_marginals(chain));

    const ChainState back = reopened.load_checkpoint();
    binary::Writer a, b;
    encode_state(a, state);
    encode_state(b, back);
    CHECK(a.bytes() == b.bytes());
  }
}

TEST_CASE("chain store truncation and torn records") {
  const fs::path dir = scratch("torn");
  ChainManifest m;
  m.num_neurons = 2;
  ChainStore store = ChainStore::create(dir, m);
  for (int it = 1; it <= 5; ++it) {
    Sample s{it, NetworkState::empty(2, 1), PriorSpec{}, Eigen::VectorXd::Ones(2), -1.0 * it};
    s.spec.adjacency = DenseAdjacency{};
    s.spec.weights = IndependentWeights{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
    store.append(s);
  }
  {
    std::ofstream os(dir / "samples.bin", std::ios::binary | std::ios::app);
    os.write("\x40\x00\x00\x00\x00\x00\x00\x00garbage", 15);
  }
  CHECK(store.load_chain().samples.size() == 5);
  store.truncate_after(3);
  const Chain c = store.load_chain();
  REQUIRE(c.samples.size() == 3);
  CHECK(c.samples.back().iteration == 3);
  CHECK(c.samples.back().log_prob == -3.0);
  CHECK_THROWS_AS(store.load_checkpoint(), DataError);
  CHECK_THROWS_AS(ChainStore::open(dir / "nothing"), DataError);
}
