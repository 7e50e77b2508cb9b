#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nglm/types.hpp"

namespace nglm {

// Text: header "T N bin_ms" then T rows of N counts.
// Binary: "NGLM", u16 version, u64 T, u32 N, f64 bin_ms, T*N u32 counts,
// little-endian, row-major.
enum class DatasetFormat { kText, kBinary };

inline constexpr std::uint16_t kDatasetVersion = 1;

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view to_string(DatasetFormat format);

void write_dataset_text(const SpikeData& data, std::ostream& os);
void write_dataset_binary(const SpikeData& data, std::ostream& os);
// `source` prefixes error messages, normally the file path.
SpikeData read_dataset_text(std::istream& is, const std::string& source);
SpikeData read_dataset_binary(std::istream& is, const std::string& source);

void save_dataset(const SpikeData& data, const std::filesystem::path& path, DatasetFormat format);
// Format is detected from the leading magic bytes.
SpikeData load_dataset(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// FNV-1a over the raw bytes, rendered as 16 hex digits.
std::string checksum(std::string_view bytes);
std::string file_checksum(const std::filesystem::path& path);

// Columns `neurons` in the given order.
SpikeData select_neurons(const SpikeData& data, const std::vector<int>& neurons);
// All columns except `neurons`, in their original order.
SpikeData drop_neurons(const SpikeData& data, const std::vector<int>& neurons);

}  // namespace nglm
