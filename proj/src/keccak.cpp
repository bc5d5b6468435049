#include "hammer/keccak.hpp"

#include <array>
#include <cstring>

namespace hammer {

namespace {

constexpr int kRounds = 24;
constexpr size_t kRate = 136;  // bytes; 1088-bit rate for 256-bit output

constexpr std::array<uint64_t, kRounds> kRoundConstants{
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// rho rotation offsets indexed x + 5y.
constexpr std::array<int, 25> kRotation{
    0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41, 45, 15, 21, 8, 18, 2, 61, 56, 14,
};

// pi destination index for each source lane x + 5y.
constexpr std::array<int, 25> kPi{
    0, 10, 20, 5, 15, 16, 1, 11, 21, 6, 7, 17, 2, 12, 22, 23, 8, 18, 3, 13, 14, 24, 9, 19, 4,
};

inline uint64_t rotl(uint64_t v, int n) {
    return n == 0 ? v : (v << n) | (v >> (64 - n));
}

void keccak_f(std::array<uint64_t, 25>& a) {
    for (int round = 0; round < kRounds; ++round) {
        // theta
        uint64_t c[5];
        for (int x = 0; x < 5; ++x) {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        }
        for (int x = 0; x < 5; ++x) {
            const uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5) {
                a[x + y] ^= d;
            }
        }
        // rho + pi
        std::array<uint64_t, 25> b;
        for (int i = 0; i < 25; ++i) {
            b[kPi[i]] = rotl(a[i], kRotation[i]);
        }
        // chi
        for (int y = 0; y < 25; y += 5) {
            for (int x = 0; x < 5; ++x) {
                a[x + y] = b[x + y] ^ (~b[(x + 1) % 5 + y] & b[(x + 2) % 5 + y]);
            }
        }
        // iota
        a[0] ^= kRoundConstants[round];
    }
}

}  // namespace

Hash32 keccak256(const uint8_t* data, size_t len) {
    std::array<uint64_t, 25> state{};
    uint8_t block[kRate];

    while (len >= kRate) {
        for (size_t i = 0; i < kRate / 8; ++i) {
            uint64_t lane;
            std::memcpy(&lane, data + 8 * i, 8);
            state[i] ^= lane;  // little-endian host assumed
        }
        keccak_f(state);
        data += kRate;
        len -= kRate;
    }

    std::memset(block, 0, kRate);
    if (len > 0) std::memcpy(block, data, len);
    block[len] = 0x01;
    block[kRate - 1] |= 0x80;
    for (size_t i = 0; i < kRate / 8; ++i) {
        uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);
        state[i] ^= lane;
    }
    keccak_f(state);

    Hash32 out;
    std::memcpy(out.data(), state.data(), 32);
    return out;
}

Hash32 keccak256(const std::vector<uint8_t>& data) {
    return keccak256(data.data(), data.size());
}

Hash32 keccak256(std::string_view data) {
    return keccak256(reinterpret_cast<const uint8_t*>(data.data()), data.size());
}

}  // namespace hammer
