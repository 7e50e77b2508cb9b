#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nglm/binary.hpp"
#include "nglm/gibbs.hpp"

namespace nglm {

inline constexpr int kChainFormatVersion = 1;

// Directory layout:
//   manifest.json   config snapshot, seed, progress, record field table
//   samples.bin     "NGLMCHN" + version byte, then (u64 length, record) pairs
//   checkpoint.bin  full sampler state after `iterations_completed` sweeps
//   progress.log    one ProgressRecord line per sweep
struct ChainManifest {
  int format_version = kChainFormatVersion;
  std::uint64_t seed = 0;
  int iterations_completed = 0;
  int num_samples = 0;
  int num_neurons = 0;
  int num_basis = 1;
  std::string config;  // serialized RunConfig
  std::string dataset_path;
  std::string dataset_checksum;
  std::vector<int> observed;  // dataset columns the chain was fit on
};

// Field table stored in the manifest, in record order.
std::vector<std::pair<std::string, std::string>> sample_record_fields();

void encode_spec(binary::Writer& w, const PriorSpec& spec);
PriorSpec decode_spec(binary::Reader& r);
void encode_sample(binary::Writer& w, const Sample& sample);
Sample decode_sample(binary::Reader& r);
void encode_state(binary::Writer& w, const ChainState& state);
ChainState decode_state(binary::Reader& r);

// Bytes of a sample's encoding; equal bytes means bitwise-equal samples.
std::vector<char> sample_bytes(const Sample& sample);

class ChainStore {
 public:
  // Starts an empty store, replacing any previous one in `dir`.
  static ChainStore create(const std::filesystem::path& dir, ChainManifest manifest);
  static ChainStore open(const std::filesystem::path& dir);

  const ChainManifest& manifest() const { return manifest_; }
  const std::filesystem::path& dir() const { return dir_; }

  void append(const Sample& sample);
  // Writes the checkpoint, then the manifest, each via a rename.
  void checkpoint(const ChainState& state);
  ChainState load_checkpoint() const;
  Chain load_chain() const;
  // Drops records and progress lines past `iteration` and any torn trailing
  // record.
  void truncate_after(int iteration);
  void log_progress(const std::string& line);

 private:
  void write_manifest() const;

  std::filesystem::path dir_;
  ChainManifest manifest_;
};

}  // namespace nglm
