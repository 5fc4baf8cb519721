// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace trajprior {

namespace {

constexpr std::string_view kStoreMagic = "TJA1";

}  // namespace

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw FormatError(what_ + ": truncated (needed " + std::to_string(n) + " bytes at offset " +
                      std::to_string(pos_) + ")");
  }
}

std::string_view ByteReader::bytes(std::size_t n) {
  need(n);
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() {
  need(1);
  return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string content_hash(std::string_view contents) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : contents) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ArrayStore::put(const std::string& name, const Matrix& m) {
  Entry e;
  e.kind = Kind::kF64;
  e.rows = static_cast<std::uint64_t>(m.rows());
  e.cols = static_cast<std::uint64_t>(m.cols());
  e.f64.assign(m.data(), m.data() + m.size());
  entries_[name] = std::move(e);
}

void ArrayStore::put(const std::string& name, const Vector& v) {
  put(name, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

void ArrayStore::put(const std::string& name, std::span<const double> values) {
  Entry e;
  e.kind = Kind::kF64;
  e.rows = values.size();
  e.cols = 1;
  e.f64.assign(values.begin(), values.end());
  entries_[name] = std::move(e);
}

void ArrayStore::put_scalar(const std::string& name, double value) {
  put(name, std::span<const double>(&value, 1));
}

void ArrayStore::put_u64(const std::string& name, std::span<const std::uint64_t> values) {
  Entry e;
  e.kind = Kind::kU64;
  e.rows = values.size();
  e.cols = 1;
  e.u64.assign(values.begin(), values.end());
  entries_[name] = std::move(e);
}

void ArrayStore::put_u64_scalar(const std::string& name, std::uint64_t value) {
  put_u64(name, std::span<const std::uint64_t>(&value, 1));
}

void ArrayStore::put_text(const std::string& name, std::string text) {
  Entry e;
  e.kind = Kind::kText;
  e.text = std::move(text);
  entries_[name] = std::move(e);
}

bool ArrayStore::has(const std::string& name) const { return entries_.count(name) != 0; }

const ArrayStore::Entry& ArrayStore::get(const std::string& name, Kind kind) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw FormatError("container has no entry '" + name + "'");
  if (it->second.kind != kind) throw FormatError("container entry '" + name + "' has the wrong type");
  return it->second;
}

Matrix ArrayStore::matrix(const std::string& name) const {
  const auto& e = get(name, Kind::kF64);
  Matrix m(static_cast<Eigen::Index>(e.rows), static_cast<Eigen::Index>(e.cols));
  std::copy(e.f64.begin(), e.f64.end(), m.data());
  return m;
}

Vector ArrayStore::vector(const std::string& name) const {
  const auto& e = get(name, Kind::kF64);
  return Eigen::Map<const Vector>(e.f64.data(), static_cast<Eigen::Index>(e.f64.size()));
}

double ArrayStore::scalar(const std::string& name) const {
  const auto& e = get(name, Kind::kF64);
  if (e.f64.size() != 1) throw FormatError("container entry '" + name + "' is not a scalar");
  return e.f64[0];
}

std::vector<std::uint64_t> ArrayStore::u64s(const std::string& name) const {
  return get(name, Kind::kU64).u64;
}

std::uint64_t ArrayStore::u64_scalar(const std::string& name) const {
  const auto& e = get(name, Kind::kU64);
  if (e.u64.size() != 1) throw FormatError("container entry '" + name + "' is not a scalar");
  return e.u64[0];
}

const std::string& ArrayStore::text(const std::string& name) const {
  return get(name, Kind::kText).text;
}

std::vector<std::string> ArrayStore::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::string ArrayStore::serialize() const {
  ByteWriter w;
  w.bytes(kStoreMagic);
  w.u32(static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [name, e] : entries_) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name);
    w.u8(static_cast<std::uint8_t>(e.kind));
    switch (e.kind) {
      case Kind::kF64:
        w.u64(e.rows);
        w.u64(e.cols);
        for (double v : e.f64) w.f64(v);
        break;
      case Kind::kU64:
        w.u64(e.rows);
        w.u64(e.cols);
        for (auto v : e.u64) w.u64(v);
        break;
      case Kind::kText:
        w.u64(e.text.size());
        w.bytes(e.text);
        break;
    }
  }
  return w.release();
}

ArrayStore ArrayStore::deserialize(std::string_view bytes) {
  ByteReader r(bytes, "array container");
  if (r.bytes(4) != kStoreMagic) throw FormatError("array container: bad magic");
  ArrayStore store;
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.u32();
    std::string name(r.bytes(len));
    Entry e;
    e.kind = static_cast<Kind>(r.u8());
    switch (e.kind) {
      case Kind::kF64:
      case Kind::kU64: {
        e.rows = r.u64();
        e.cols = r.u64();
        const auto n = e.rows * e.cols;
        if (n > r.remaining() / 8) throw FormatError("array container: entry '" + name + "' truncated");
        if (e.kind == Kind::kF64) {
          e.f64.resize(n);
          for (auto& v : e.f64) v = r.f64();
        } else {
          e.u64.resize(n);
          for (auto& v : e.u64) v = r.u64();
        }
        break;
      }
      case Kind::kText: {
        const auto n = r.u64();
        e.text = std::string(r.bytes(n));
        break;
      }
      default:
        throw FormatError("array container: unknown entry kind for '" + name + "'");
    }
    store.entries_[name] = std::move(e);
  }
  if (!r.at_end()) throw FormatError("array container: trailing bytes");
  return store;
}

}  // namespace trajprior
