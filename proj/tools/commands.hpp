#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nglm/config.hpp"
#include "nglm/eval.hpp"
#include "nglm/simulate.hpp"

namespace nglm::cli {

namespace fs = std::filesystem;

// Writes data.<bin|txt> and truth.json into `out`.
GroundTruth cmd_simulate(const RunConfig& config, const fs::path& out);

// Fits `config` on data.path minus data.heldout and stores the chain in
// `out`. Progress lines go to `log` and to out/progress.log.
void cmd_fit(const RunConfig& config, const fs::path& out, int threads, std::ostream& log);

// Continues the chain in `dir` from its checkpoint. A config, when given,
// must match the one the chain was started with.
void cmd_resume(const fs::path& dir, const std::optional<RunConfig>& config, int threads,
                std::ostream& log);

// Evaluation settings taken from a config given alongside stored chains.
struct EvalOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::string> truth_path;
};

// Held-out predictive log likelihood for each neuron in data.heldout, plus
// recovery metrics and plot-ready files when data.truth is set.
std::vector<ModelScore> cmd_predict(const fs::path& chain_dir, const fs::path& out, int threads,
                                    const EvalOverrides& overrides = {});

// All chains must share the dataset, observed columns and held-out set.
std::vector<ModelScore> cmd_compare(const std::vector<fs::path>& chain_dirs, const fs::path& out,
                                    int threads, const EvalOverrides& overrides = {});

struct BenchRow {
  double value = 0.0;
  int neurons = 0;
  int bins = 0;
  double rho = 0.0;
  double edges = 0.0;  // mean incoming edges per neuron over timed sweeps
  double t_obs = 0.0;  // seconds per iteration
  double t_net = 0.0;
};

std::vector<BenchRow> cmd_bench(const RunConfig& config, const fs::path& out, int threads,
                                std::ostream& log);

// Full command line. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nglm::cli
