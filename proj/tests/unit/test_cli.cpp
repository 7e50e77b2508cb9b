#include <filesystem>
#include <sstream>
#include <streambuf>

#include "commands.hpp"
#include "doctest.h"
#include "nglm/chain_store.hpp"
#include "nglm/errors.hpp"
#include "nglm/io.hpp"

using namespace nglm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nglm_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "nglm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

// Small simulated dataset shared by the fit tests.
fs::path small_dataset(const fs::path& dir) {
  RunConfig sim;
  sim.seed = 11;
  sim.simulate_neurons = 8;
  sim.simulate_bins = 3000;
  cli::cmd_simulate(sim, dir);
  return dir / "data.bin";
}

RunConfig small_fit(const fs::path& data) {
  RunConfig c;
  c.seed = 5;
  c.data_path = data.string();
  c.heldout = {6, 7};
  c.iterations = 30;
  c.burn_in = 10;
  c.checkpoint_every = 10;
  return c;
}

// Streambuf that throws after a fixed number of lines, standing in for a
// process killed mid-run.
class CrashAfter : public std::streambuf {
 public:
  explicit CrashAfter(int lines) : left_(lines) {}

 protected:
  int overflow(int c) override {
    if (c == '\n' && --left_ == 0) throw std::runtime_error("killed");
    return c;
  }

 private:
  int left_;
};

std::string strip_times(const std::string& log) {
  std::istringstream is(log);
  std::string line, out;
  while (std::getline(is, line)) out += line.substr(0, line.find(" t_obs")) + '\n';
  return out;
}

}  // namespace

TEST_CASE("simulate is byte-identical for a fixed seed") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  RunConfig cfg;
  cfg.seed = 3;
  cfg.simulate_neurons = 6;
  cfg.simulate_bins = 2000;
  cli::cmd_simulate(cfg, a);
  cli::cmd_simulate(cfg, b);
  CHECK(read_file(a / "data.bin") == read_file(b / "data.bin"));
  CHECK(read_file(a / "truth.json") == read_file(b / "truth.json"));
  cfg.seed = 4;
  cli::cmd_simulate(cfg, c);
  CHECK(read_file(a / "data.bin") != read_file(c / "data.bin"));

  cfg.seed = 3;
  cfg.data_format = DatasetFormat::kText;
  const fs::path t = scratch("sim_text");
  cli::cmd_simulate(cfg, t);
  CHECK(load_dataset(t / "data.txt").counts == load_dataset(a / "data.bin").counts);
}

TEST_CASE("fit with every update disabled keeps the initial state") {
  const fs::path dir = scratch("frozen");
  RunConfig cfg = small_fit(small_dataset(dir / "data"));
  cfg.toggles = UpdateToggles::none();
  cfg.hmc_adapt = false;
  std::ostringstream log;
  cli::cmd_fit(cfg, dir / "chain", 1, log);
  const Chain chain = ChainStore::open(dir / "chain").load_chain();
  REQUIRE(chain.samples.size() == 20);
  const Sample& first = chain.samples.front();
  for (const auto& s : chain.samples) {
    CHECK(s.net.adjacency == first.net.adjacency);
    CHECK(s.net.weights == first.net.weights);
    CHECK(s.net.bias == first.net.bias);
    CHECK(s.log_prob == first.log_prob);
  }
}

TEST_CASE("resume after a crash reproduces the uninterrupted chain") {
  const fs::path dir = scratch("resume");
  const RunConfig cfg = small_fit(small_dataset(dir / "data"));
  std::ostringstream full_log;
  cli::cmd_fit(cfg, dir / "full", 1, full_log);

  CrashAfter crash(23);
  std::ostream crash_log(&crash);
  crash_log.exceptions(std::ios::badbit);
  CHECK_THROWS(cli::cmd_fit(cfg, dir / "cut", 1, crash_log));
  CHECK(ChainStore::open(dir / "cut").manifest().iterations_completed == 20);

  std::ostringstream rest;
  cli::cmd_resume(dir / "cut", cfg, 1, rest);
  CHECK(read_file(dir / "cut" / "samples.bin") == read_file(dir / "full" / "samples.bin"));
  CHECK(read_file(dir / "cut" / "checkpoint.bin") == read_file(dir / "full" / "checkpoint.bin"));
  CHECK(strip_times(read_file(dir / "cut" / "progress.log")) ==
        strip_times(read_file(dir / "full" / "progress.log")));

  RunConfig other = cfg;
  other.seed = 6;
  CHECK_THROWS_AS(cli::cmd_resume(dir / "cut", other, 1, rest), ConfigError);
}

TEST_CASE("chains do not depend on the thread count") {
  const fs::path dir = scratch("threads");
  const RunConfig cfg = small_fit(small_dataset(dir / "data"));
  std::ostringstream log;
  cli::cmd_fit(cfg, dir / "t1", 1, log);
  cli::cmd_fit(cfg, dir / "t3", 3, log);
  CHECK(read_file(dir / "t1" / "samples.bin") == read_file(dir / "t3" / "samples.bin"));
}

TEST_CASE("predict and compare write scored tables") {
  const fs::path dir = scratch("predict");
  RunConfig cfg = small_fit(small_dataset(dir / "data"));
  cfg.truth_path = (dir / "data" / "truth.json").string();
  std::ostringstream log;
  cli::cmd_fit(cfg, dir / "a", 1, log);
  cli::cmd_fit(cfg, dir / "b", 1, log);

  const auto one = cli::cmd_predict(dir / "a", dir / "pred", 1);
  REQUIRE(one.size() == 1);
  CHECK(one.front().per_neuron.size() == 2);
  CHECK(one.front().mean < 0.0);
  for (const char* f : {"predictive.tsv", "recovery.tsv", "edge_marginals.tsv", "locations.tsv",
                        "distance_pairs.tsv"}) {
    CHECK_MESSAGE(fs::exists(dir / "pred" / f), f);
  }
  CHECK(read_file(dir / "pred" / "recovery.tsv").find("adjacency_auc\t") != std::string::npos);

  // identical chains tie exactly and match the single-model score
  const auto both = cli::cmd_compare({dir / "a", dir / "b"}, dir / "cmp", 1);
  REQUIRE(both.size() == 2);
  CHECK(both[0].mean == both[1].mean);
  CHECK(both[0].rank == both[1].rank);
  CHECK(both[0].mean == one.front().mean);
  CHECK(both[0].name != both[1].name);

  RunConfig moved = cfg;
  moved.heldout = {5, 7};
  cli::cmd_fit(moved, dir / "c", 1, log);
  CHECK_THROWS_AS(cli::cmd_compare({dir / "a", dir / "c"}, dir / "cmp2", 1), ConfigError);
}

TEST_CASE("bench times both phases over the grid") {
  const fs::path dir = scratch("bench");
  RunConfig cfg;
  cfg.bench_axis = "rho";
  cfg.bench_grid = {0.05, 0.4};
  cfg.bench_neurons = 10;
  cfg.bench_bins = 500;
  cfg.bench_iterations = 1;
  std::ostringstream log;
  const auto rows = cli::cmd_bench(cfg, dir, 1, log);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].edges > rows[0].edges);
  CHECK(rows[1].t_net > 0.0);
  CHECK(fs::exists(dir / "bench.tsv"));
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  std::string err;
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"bench", "--threads", "-1", "--out", dir.string()}) == 2);

  write_file(dir / "bad.cfg", "seed = 1\nno.such.key = 2\n");
  CHECK(run_cli({"fit", "--config", (dir / "bad.cfg").string(), "--out", dir.string()}, &err) ==
        2);
  CHECK(err.find("bad.cfg:2") != std::string::npos);
  CHECK(run_cli({"fit", "--out", dir.string()}) == 2);

  write_file(dir / "missing.cfg", "data.path = " + (dir / "nope.bin").string() + "\n");
  CHECK(run_cli({"fit", "--config", (dir / "missing.cfg").string(), "--out",
                 (dir / "c").string()}) == 3);

  SpikeData burst;
  burst.counts = Eigen::MatrixXi::Constant(20, 3, 2);
  save_dataset(burst, dir / "burst.bin", DatasetFormat::kBinary);
  write_file(dir / "burst.cfg", "data.path = " + (dir / "burst.bin").string() + "\n");
  CHECK(run_cli({"fit", "--config", (dir / "burst.cfg").string(), "--out",
                 (dir / "c").string()}, &err) == 3);
  CHECK(err.find("bernoulli") != std::string::npos);

  write_file(dir / "sim.cfg", "simulate.neurons = 4\nsimulate.bins = 500\n");
  CHECK(run_cli({"simulate", "--config", (dir / "sim.cfg").string(), "--seed", "9", "--out",
                 (dir / "sim").string()}) == 0);
  CHECK(fs::exists(dir / "sim" / "truth.json"));
  CHECK(read_file(dir / "sim" / "truth.json").find("\"seed\": 9") != std::string::npos);
}
