#include "permledger/bytes.hpp"

#include <algorithm>
#include <cstring>
#include <functional>

#include "permledger/error.hpp"

namespace permledger {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::Decode, "hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::Decode, "invalid hex character");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> to_array(ByteView data) {
  if (data.size() != N) {
    throw Error(ErrorCode::Decode, "expected " + std::to_string(N) + " bytes, got " +
                                       std::to_string(data.size()));
  }
  std::array<std::uint8_t, N> out{};
  std::memcpy(out.data(), data.data(), N);
  return out;
}

template std::array<std::uint8_t, 32> to_array<32>(ByteView);
template std::array<std::uint8_t, 64> to_array<64>(ByteView);

bool contains_subsequence(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(),
                     std::boyer_moore_horspool_searcher(needle.begin(), needle.end())) != haystack.end();
}

}  // namespace permledger
