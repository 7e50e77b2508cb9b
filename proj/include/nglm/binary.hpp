#pragma once

// Little-endian encoding helpers shared by the dataset and chain formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "nglm/errors.hpp"

namespace nglm::binary {

template <typename T>
T to_little(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    const auto* p = reinterpret_cast<const char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  template <typename Derived>
  void put_matrix(const Eigen::DenseBase<Derived>& m) {
    put<std::uint32_t>(static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) put(m(i, j));
    }
  }
  void put_ints(const std::vector<int>& v) {
    put<std::uint32_t>(static_cast<std::uint32_t>(v.size()));
    for (int x : v) put<std::int32_t>(x);
  }

  const std::vector<char>& bytes() const { return bytes_; }
  void write_to(std::ostream& os) const { os.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size())); }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size, std::string source)
      : data_(data), size_(size), source_(std::move(source)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }
  template <typename Matrix>
  Matrix get_matrix() {
    const auto rows = get<std::uint32_t>();
    const auto cols = get<std::uint32_t>();
    using Scalar = typename Matrix::Scalar;
    need(static_cast<std::size_t>(rows) * cols * sizeof(Scalar));
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = get<Scalar>();
    }
    return m;
  }
  std::vector<int> get_ints() {
    const auto n = get<std::uint32_t>();
    need(static_cast<std::size_t>(n) * 4);
    std::vector<int> v(n);
    for (int& x : v) x = get<std::int32_t>();
    return v;
  }

  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == size_; }
  const std::string& source() const { return source_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) {
      throw DataError(source_ + ": truncated at byte " + std::to_string(pos_) + " (needed " +
                      std::to_string(n) + " more)");
    }
  }

  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string source_;
};

}  // namespace nglm::binary
