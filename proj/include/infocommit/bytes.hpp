#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infocommit/field.hpp"

namespace infocommit {

using Bytes = std::vector<std::uint8_t>;

// Little-endian writer for payloads and persisted state. Field elements use
// the field's width: 8 bytes for prime fields, 1 byte for table fields.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void raw(std::span<const std::uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  // u32 length prefix followed by the bytes.
  void blob(std::span<const std::uint8_t> data);
  void str(const std::string& s);
  void fe(const Field& field, Fe e);
  // u32 count prefix followed by the elements.
  void fes(const Field& field, std::span<const Fe> es);

  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes buf_;
};

// Bounds-checked reader; every failure is a DecodeError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  Bytes raw(std::size_t n);
  Bytes blob();
  std::string str();
  Fe fe(const Field& field);
  std::vector<Fe> fes(const Field& field);

  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const;

 private:
  void need(std::size_t n) const;
  std::uint64_t get_le(int width);

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> data);

}  // namespace infocommit
