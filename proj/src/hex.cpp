#include "hammer/hex.hpp"

namespace hammer {

namespace {

constexpr char kDigits[] = "0123456789abcdef";

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string to_hex(const uint8_t* data, size_t len) {
    std::string out = "0x";
    out.reserve(2 + 2 * len);
    for (size_t i = 0; i < len; ++i) {
        out.push_back(kDigits[data[i] >> 4]);
        out.push_back(kDigits[data[i] & 0xf]);
    }
    return out;
}

std::string to_hex(const std::vector<uint8_t>& bytes) {
    return to_hex(bytes.data(), bytes.size());
}

std::vector<uint8_t> from_hex(const std::string& text) {
    if (text.size() < 2 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        throw HexError("missing 0x prefix in \"" + text + "\"");
    }
    if ((text.size() - 2) % 2 != 0) throw HexError("odd-length hex string \"" + text + "\"");
    std::vector<uint8_t> out;
    out.reserve((text.size() - 2) / 2);
    for (size_t i = 2; i < text.size(); i += 2) {
        const int hi = nibble(text[i]);
        const int lo = nibble(text[i + 1]);
        if (hi < 0 || lo < 0) throw HexError("invalid hex digit in \"" + text + "\"");
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string to_quantity(uint64_t value) {
    if (value == 0) return "0x0";
    char buf[19];  // "0x" + 16 digits + NUL
    int pos = sizeof(buf) - 1;
    buf[pos] = '\0';
    while (value != 0) {
        buf[--pos] = kDigits[value & 0xf];
        value >>= 4;
    }
    pos -= 2;
    buf[pos] = '0';
    buf[pos + 1] = 'x';
    return std::string(buf + pos);
}

uint64_t from_quantity(const std::string& text) {
    if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        throw HexError("malformed quantity \"" + text + "\"");
    }
    uint64_t value = 0;
    for (size_t i = 2; i < text.size(); ++i) {
        const int d = nibble(text[i]);
        if (d < 0) throw HexError("invalid hex digit in quantity \"" + text + "\"");
        if (value >> 60) throw HexError("quantity overflows 64 bits: \"" + text + "\"");
        value = (value << 4) | static_cast<uint64_t>(d);
    }
    return value;
}

Address parse_address(const std::string& text) {
    const auto bytes = from_hex(text);
    if (bytes.size() != 20) {
        throw HexError("address must be 20 bytes, got " + std::to_string(bytes.size()));
    }
    Address out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

Hash32 parse_hash32(const std::string& text) {
    const auto bytes = from_hex(text);
    if (bytes.size() != 32) {
        throw HexError("hash must be 32 bytes, got " + std::to_string(bytes.size()));
    }
    Hash32 out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

Word32 word_from_u64(uint64_t value) {
    Word32 out{};
    for (int i = 0; i < 8; ++i) {
        out[31 - i] = static_cast<uint8_t>(value >> (8 * i));
    }
    return out;
}

uint64_t word_to_u64(const Word32& word) {
    for (size_t i = 0; i < 24; ++i) {
        if (word[i] != 0) throw HexError("word does not fit in 64 bits");
    }
    uint64_t value = 0;
    for (size_t i = 24; i < 32; ++i) {
        value = (value << 8) | word[i];
    }
    return value;
}

}  // namespace hammer
