#include "permledger/codec.hpp"

#include <limits>

#include "permledger/error.hpp"

namespace permledger {

void Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Writer::bytes(ByteView v) {
  if (v.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::Decode, "field exceeds 4 GiB");
  }
  u32(static_cast<std::uint32_t>(v.size()));
  raw(v);
}

ByteView Reader::raw(std::size_t n) {
  if (n > remaining()) {
    throw Error(ErrorCode::Decode, "truncated input: need " + std::to_string(n) + " bytes at offset " +
                                       std::to_string(pos_));
  }
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint32_t Reader::u32() {
  auto v = raw(4);
  std::uint32_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

std::uint64_t Reader::u64() {
  auto v = raw(8);
  std::uint64_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

ByteView Reader::bytes_view() { return raw(u32()); }

Bytes Reader::bytes() {
  auto v = bytes_view();
  return {v.begin(), v.end()};
}

std::string Reader::str() { return to_string(bytes_view()); }

bool Reader::boolean() {
  auto v = u8();
  if (v > 1) throw Error(ErrorCode::Decode, "invalid boolean byte");
  return v == 1;
}

void Reader::expect_done() const {
  if (!done()) {
    throw Error(ErrorCode::Decode, std::to_string(remaining()) + " trailing bytes");
  }
}

}  // namespace permledger
