#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hammer/hex.hpp"

namespace hammer {

using Selector = std::array<uint8_t, 4>;

/// First 4 bytes of Keccak-256 over the canonical signature, e.g.
/// "setItem(uint256,uint256)".
Selector function_selector(std::string_view signature);

/// Selector followed by each argument as a 32-byte big-endian word.
/// Output length is always 4 + 32 * args.size().
std::vector<uint8_t> encode_call(const Selector& selector, std::span<const Word32> args);

/// Convenience overload for 64-bit-valued arguments.
std::vector<uint8_t> encode_call(const Selector& selector, std::initializer_list<uint64_t> args);

inline constexpr std::string_view kSetItemSignature = "setItem(uint256,uint256)";
inline constexpr std::string_view kGetItemSignature = "getItem(uint256)";

const Selector& set_item_selector();
const Selector& get_item_selector();

}  // namespace hammer
