#pragma once

#include <array>
#include <cstring>
#include <string>
#include <string_view>

#include "permledger/bytes.hpp"

namespace permledger {

// Canonical encoding: big-endian integers, u32 length prefixes, fields in
// declared order. Every hashed or signed structure is encoded through this.
class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(ByteView v) { buf_.insert(buf_.end(), v.begin(), v.end()); }
  void bytes(ByteView v);
  void str(std::string_view v) { bytes(as_bytes(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }

  const Bytes& data() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView raw(std::size_t n);
  Bytes bytes();
  ByteView bytes_view();
  std::string str();
  bool boolean();

  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    std::array<std::uint8_t, N> out{};
    auto v = raw(N);
    std::memcpy(out.data(), v.data(), N);
    return out;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }
  /// Throws Error(Decode) when trailing bytes remain.
  void expect_done() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace permledger
