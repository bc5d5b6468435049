#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hammer {

using Address = std::array<uint8_t, 20>;
using Hash32 = std::array<uint8_t, 32>;
using Word32 = std::array<uint8_t, 32>;  // one ABI word, big-endian

class HexError : public std::runtime_error {
public:
    explicit HexError(const std::string& what) : std::runtime_error(what) {}
};

/// "0x"-prefixed, lowercase, even-length byte-string rendering ("0x" for empty).
std::string to_hex(const uint8_t* data, size_t len);
std::string to_hex(const std::vector<uint8_t>& bytes);
template <size_t N>
std::string to_hex(const std::array<uint8_t, N>& bytes) {
    return to_hex(bytes.data(), N);
}

/// Decodes a "0x"-prefixed even-length hex string; throws HexError otherwise.
std::vector<uint8_t> from_hex(const std::string& text);

/// Minimal-length "0x"-prefixed quantity (Ethereum convention): 0 -> "0x0".
std::string to_quantity(uint64_t value);

/// Accepts any valid hex quantity (leading zeros tolerated); throws HexError
/// on malformed or > 64-bit input.
uint64_t from_quantity(const std::string& text);

/// Parses "0x" + 40 hex chars into a 20-byte address.
Address parse_address(const std::string& text);

/// Parses "0x" + 64 hex chars into a 32-byte hash.
Hash32 parse_hash32(const std::string& text);

/// Big-endian 32-byte word holding a 64-bit value in its low bytes.
Word32 word_from_u64(uint64_t value);

/// Reads the low 8 bytes of a big-endian word; throws if high bytes nonzero.
uint64_t word_to_u64(const Word32& word);

}  // namespace hammer
