#include "infocommit/bytes.hpp"

#include "infocommit/errors.hpp"

namespace infocommit {

void ByteWriter::blob(std::span<const std::uint8_t> data) {
  u32(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

void ByteWriter::str(const std::string& s) {
  blob(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void ByteWriter::fe(const Field& field, Fe e) { put_le(e.v, static_cast<int>(field.element_width())); }

void ByteWriter::fes(const Field& field, std::span<const Fe> es) {
  u32(static_cast<std::uint32_t>(es.size()));
  for (Fe e : es) fe(field, e);
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw DecodeError(DecodeError::Kind::truncated, "truncated input: need " + std::to_string(n) +
                                                        " bytes, have " + std::to_string(remaining()));
  }
}

std::uint64_t ByteReader::get_le(int width) {
  need(static_cast<std::size_t>(width));
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
  pos_ += static_cast<std::size_t>(width);
  return v;
}

Bytes ByteReader::raw(std::size_t n) {
  need(n);
  Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_), data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return out;
}

Bytes ByteReader::blob() {
  const std::uint32_t n = u32();
  return raw(n);
}

std::string ByteReader::str() {
  auto b = blob();
  return {b.begin(), b.end()};
}

Fe ByteReader::fe(const Field& field) {
  const std::uint64_t v = get_le(static_cast<int>(field.element_width()));
  if (v >= field.order()) {
    throw DecodeError(DecodeError::Kind::out_of_range,
                      "element " + std::to_string(v) + " out of range for " + field.describe());
  }
  return Fe{v};
}

std::vector<Fe> ByteReader::fes(const Field& field) {
  const std::uint32_t n = u32();
  need(std::size_t{n} * field.element_width());
  std::vector<Fe> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(fe(field));
  return out;
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    throw DecodeError(DecodeError::Kind::malformed, std::to_string(remaining()) + " trailing bytes");
  }
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

}  // namespace infocommit
