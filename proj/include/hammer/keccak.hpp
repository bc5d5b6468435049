#pragma once

#include <cstddef>
#include <cstdint>

#include "hammer/hex.hpp"

namespace hammer {

/// Keccak-256 (original pad-0x01 variant used for contract selectors and tx
/// hashes, not the SHA-3 pad-0x06 one).
Hash32 keccak256(const uint8_t* data, size_t len);

Hash32 keccak256(const std::vector<uint8_t>& data);
Hash32 keccak256(std::string_view data);

}  // namespace hammer
