#include "nglm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "nglm/binary.hpp"
#include "nglm/errors.hpp"

namespace nglm {

namespace {

constexpr char kMagic[4] = {'N', 'G', 'L', 'M'};

std::string at_line(const std::string& source, long line) {
  return source + ":" + std::to_string(line) + ": ";
}

// Splits on blanks; returns false on an unparsable token.
template <typename T>
bool parse_tokens(std::string_view line, std::vector<T>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    T v{};
    const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
    if (ec != std::errc() || ptr != line.data() + j) return false;
    out.push_back(v);
    i = j;
  }
  return true;
}

void check_dims(long long t, long long n, double bin_ms, const std::string& where) {
  if (t < 0 || n < 1) throw DataError(where + "need T >= 0 and N >= 1, got T=" + std::to_string(t) + " N=" + std::to_string(n));
  if (n > std::numeric_limits<int>::max() || t > std::numeric_limits<int>::max()) {
    throw DataError(where + "dimensions too large");
  }
  if (!(bin_ms > 0.0)) throw DataError(where + "bin width must be positive");
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "text") return DatasetFormat::kText;
  if (name == "binary") return DatasetFormat::kBinary;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (text or binary)");
}

std::string_view to_string(DatasetFormat format) {
  return format == DatasetFormat::kText ? "text" : "binary";
}

void write_dataset_text(const SpikeData& data, std::ostream& os) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), data.bin_ms);
  os << data.num_bins() << ' ' << data.num_neurons() << ' ' << std::string_view(buf, r.ptr - buf) << '\n';
  std::string line;
  for (int t = 0; t < data.num_bins(); ++t) {
    line.clear();
    for (int n = 0; n < data.num_neurons(); ++n) {
      if (n) line.push_back(' ');
      r = std::to_chars(buf, buf + sizeof(buf), data.counts(t, n));
      line.append(buf, r.ptr);
    }
    line.push_back('\n');
    os << line;
  }
}

SpikeData read_dataset_text(std::istream& is, const std::string& source) {
  std::string line;
  long lineno = 0;
  auto next = [&]() {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next()) throw DataError(at_line(source, 1) + "empty file, expected header 'T N bin_ms'");
  std::vector<double> header;
  if (!parse_tokens(line, header) || header.size() != 3) {
    throw DataError(at_line(source, lineno) + "expected header 'T N bin_ms'");
  }
  const auto t_bins = static_cast<long long>(header[0]);
  const auto n_neurons = static_cast<long long>(header[1]);
  if (header[0] != static_cast<double>(t_bins) || header[1] != static_cast<double>(n_neurons)) {
    throw DataError(at_line(source, lineno) + "T and N must be integers");
  }
  check_dims(t_bins, n_neurons, header[2], at_line(source, lineno));
  SpikeData data;
  data.bin_ms = header[2];
  data.counts.resize(t_bins, n_neurons);
  std::vector<long long> row;
  for (long long t = 0; t < t_bins; ++t) {
    if (!next()) {
      throw DataError(at_line(source, lineno + 1) + "expected " + std::to_string(t_bins) +
                      " rows, found " + std::to_string(t));
    }
    if (!parse_tokens(line, row)) throw DataError(at_line(source, lineno) + "non-integer count");
    if (static_cast<long long>(row.size()) != n_neurons) {
      throw DataError(at_line(source, lineno) + "expected " + std::to_string(n_neurons) +
                      " counts, found " + std::to_string(row.size()));
    }
    for (long long n = 0; n < n_neurons; ++n) {
      if (row[n] < 0 || row[n] > std::numeric_limits<int>::max()) {
        throw DataError(at_line(source, lineno) + "count " + std::to_string(row[n]) +
                        " out of range for neuron " + std::to_string(n));
      }
      data.counts(t, n) = static_cast<int>(row[n]);
    }
  }
  if (next()) throw DataError(at_line(source, lineno) + "extra row after " + std::to_string(t_bins) + " bins");
  return data;
}

void write_dataset_binary(const SpikeData& data, std::ostream& os) {
  binary::Writer w;
  for (char c : kMagic) w.put(c);
  w.put<std::uint16_t>(kDatasetVersion);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(data.num_bins()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.num_neurons()));
  w.put<double>(data.bin_ms);
  for (int t = 0; t < data.num_bins(); ++t) {
    for (int n = 0; n < data.num_neurons(); ++n) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(data.counts(t, n)));
    }
  }
  w.write_to(os);
}

SpikeData read_dataset_binary(std::istream& is, const std::string& source) {
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  binary::Reader r(bytes.data(), bytes.size(), source);
  char magic[4];
  for (char& c : magic) c = r.get<char>();
  if (std::memcmp(magic, kMagic, 4) != 0) throw DataError(source + ": missing NGLM magic bytes");
  const auto version = r.get<std::uint16_t>();
  if (version != kDatasetVersion) {
    throw DataError(source + ": unsupported dataset version " + std::to_string(version));
  }
  const auto t_bins = r.get<std::uint64_t>();
  const auto n_neurons = r.get<std::uint32_t>();
  const double bin_ms = r.get<double>();
  check_dims(static_cast<long long>(t_bins), n_neurons, bin_ms, source + ": ");
  const std::size_t expected = 26 + static_cast<std::size_t>(t_bins) * n_neurons * 4;
  if (bytes.size() != expected) {
    throw DataError(source + ": expected " + std::to_string(expected) + " bytes for T=" +
                    std::to_string(t_bins) + " N=" + std::to_string(n_neurons) + ", found " +
                    std::to_string(bytes.size()));
  }
  SpikeData data;
  data.bin_ms = bin_ms;
  data.counts.resize(static_cast<Eigen::Index>(t_bins), n_neurons);
  for (Eigen::Index t = 0; t < data.counts.rows(); ++t) {
    for (Eigen::Index n = 0; n < data.counts.cols(); ++n) {
      const auto v = r.get<std::uint32_t>();
      if (v > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
        throw DataError(source + ": count out of range at bin " + std::to_string(t));
      }
      data.counts(t, n) = static_cast<int>(v);
    }
  }
  return data;
}

void save_dataset(const SpikeData& data, const std::filesystem::path& path, DatasetFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(path.string() + ": cannot open for writing");
  if (format == DatasetFormat::kText) {
    write_dataset_text(data, os);
  } else {
    write_dataset_binary(data, os);
  }
  if (!os) throw DataError(path.string() + ": write failed");
}

SpikeData load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(path.string() + ": cannot open dataset");
  char head[4] = {};
  is.read(head, 4);
  const bool is_binary = is.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0;
  is.clear();
  is.seekg(0);
  return is_binary ? read_dataset_binary(is, path.string()) : read_dataset_text(is, path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(path.string() + ": cannot open for writing");
  os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!os) throw DataError(path.string() + ": write failed");
}

std::string checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_checksum(const std::filesystem::path& path) { return checksum(read_file(path)); }

SpikeData select_neurons(const SpikeData& data, const std::vector<int>& neurons) {
  SpikeData out;
  out.bin_ms = data.bin_ms;
  out.counts.resize(data.num_bins(), static_cast<Eigen::Index>(neurons.size()));
  for (std::size_t i = 0; i < neurons.size(); ++i) {
    if (neurons[i] < 0 || neurons[i] >= data.num_neurons()) {
      throw ConfigError("neuron index " + std::to_string(neurons[i]) + " out of range [0, " +
                        std::to_string(data.num_neurons()) + ")");
    }
    out.counts.col(static_cast<Eigen::Index>(i)) = data.counts.col(neurons[i]);
  }
  return out;
}

SpikeData drop_neurons(const SpikeData& data, const std::vector<int>& neurons) {
  std::vector<int> keep;
  for (int n = 0; n < data.num_neurons(); ++n) {
    if (std::find(neurons.begin(), neurons.end(), n) == neurons.end()) keep.push_back(n);
  }
  for (int n : neurons) {
    if (n < 0 || n >= data.num_neurons()) {
      throw ConfigError("neuron index " + std::to_string(n) + " out of range [0, " +
                        std::to_string(data.num_neurons()) + ")");
    }
  }
  return select_neurons(data, keep);
}

}  // namespace nglm
