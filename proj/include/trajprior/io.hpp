// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_IO_HPP_
#define TRAJPRIOR_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajprior/common.hpp"

namespace trajprior {

// Little-endian byte encoding, independent of host byte order.
class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);

  const std::string& data() const { return buf_; }
  std::string release() { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data, std::string what = "input")
      : data_(data), what_(std::move(what)) {}

  std::string_view bytes(std::size_t n);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();

  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string what_;
};

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written artifact. Throws Error on failure and
// leaves nothing behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string content_hash(std::string_view contents);

// Self-describing container of named arrays. Numeric arrays carry a
// (rows, cols) shape; text entries hold opaque strings such as RNG states.
class ArrayStore {
 public:
  void put(const std::string& name, const Matrix& m);
  void put(const std::string& name, const Vector& v);
  void put(const std::string& name, std::span<const double> values);
  void put_scalar(const std::string& name, double value);
  void put_u64(const std::string& name, std::span<const std::uint64_t> values);
  void put_u64_scalar(const std::string& name, std::uint64_t value);
  void put_text(const std::string& name, std::string text);

  bool has(const std::string& name) const;
  Matrix matrix(const std::string& name) const;
  Vector vector(const std::string& name) const;
  double scalar(const std::string& name) const;
  std::vector<std::uint64_t> u64s(const std::string& name) const;
  std::uint64_t u64_scalar(const std::string& name) const;
  const std::string& text(const std::string& name) const;

  std::vector<std::string> names() const;

  std::string serialize() const;
  static ArrayStore deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }
  static ArrayStore load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

 private:
  enum class Kind : std::uint8_t { kF64 = 1, kU64 = 2, kText = 3 };
  struct Entry {
    Kind kind = Kind::kF64;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::vector<double> f64;
    std::vector<std::uint64_t> u64;
    std::string text;
  };

  const Entry& get(const std::string& name, Kind kind) const;

  std::map<std::string, Entry> entries_;
};

}  // namespace trajprior

#endif  // TRAJPRIOR_IO_HPP_
