#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace permledger {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Hash256 = std::array<std::uint8_t, 32>;

/// Milliseconds since the Unix epoch (or virtual milliseconds in the simulator).
using TimestampMs = std::uint64_t;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

std::string to_hex(ByteView data);
/// Throws Error(Decode) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> to_array(ByteView data);

bool contains_subsequence(ByteView haystack, ByteView needle);

}  // namespace permledger
