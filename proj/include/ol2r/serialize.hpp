#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "ol2r/errors.hpp"

namespace ol2r {

/// Little binary buffer for checkpoint payloads. Doubles are written raw
/// so restored state is bit-identical.
class BinaryWriter {
 public:
  void put_u32(std::uint32_t v) { put_raw(&v, sizeof(v)); }
  void put_u64(std::uint64_t v) { put_raw(&v, sizeof(v)); }
  void put_i64(std::int64_t v) { put_raw(&v, sizeof(v)); }
  void put_double(double v) { put_raw(&v, sizeof(v)); }
  void put_string(const std::string& s) {
    put_u64(s.size());
    put_raw(s.data(), s.size());
  }
  void put_doubles(std::span<const double> v) {
    put_u64(v.size());
    put_raw(v.data(), v.size() * sizeof(double));
  }

  const std::string& buffer() const { return buf_; }

 private:
  void put_raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string_view data) : data_(data) {}

  std::uint32_t get_u32() { return get_raw<std::uint32_t>(); }
  std::uint64_t get_u64() { return get_raw<std::uint64_t>(); }
  std::int64_t get_i64() { return get_raw<std::int64_t>(); }
  double get_double() { return get_raw<double>(); }
  std::string get_string() {
    const std::uint64_t n = get_u64();
    check(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<double> get_doubles() {
    const std::uint64_t n = get_u64();
    check(n * sizeof(double));
    std::vector<double> v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  template <typename T>
  T get_raw() {
    check(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void check(std::uint64_t n) const {
    if (pos_ + n > data_.size())
      throw CheckpointError("checkpoint payload truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a_hash(std::string_view data);

}  // namespace ol2r
