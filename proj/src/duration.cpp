#include "hammer/duration.hpp"

#include <array>
#include <cctype>

namespace hammer {

namespace {

struct Unit {
    const char* suffix;
    uint64_t millis;
    int rank;
};

// Ordered so "ms" is matched before "m".
constexpr std::array<Unit, 4> kUnits{{
    {"ms", 1, 0},
    {"h", 3'600'000, 3},
    {"m", 60'000, 2},
    {"s", 1'000, 1},
}};

[[noreturn]] void fail(const std::string& msg, const std::string& text) {
    throw DurationParseError(msg + " in \"" + text + "\"");
}

}  // namespace

Duration parse_duration(const std::string& text) {
    if (text.empty()) throw DurationParseError("empty duration");

    uint64_t total = 0;
    int last_rank = 4;  // above 'h'
    size_t i = 0;
    while (i < text.size()) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            fail("expected digits, got \"" + text.substr(i, 1) + "\"", text);
        }
        uint64_t value = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            const uint64_t digit = static_cast<uint64_t>(text[i] - '0');
            if (value > (UINT64_MAX - digit) / 10) fail("value overflow", text);
            value = value * 10 + digit;
            ++i;
        }
        const Unit* unit = nullptr;
        for (const auto& u : kUnits) {
            const std::string_view sfx(u.suffix);
            if (text.compare(i, sfx.size(), sfx) == 0) {
                unit = &u;
                break;
            }
        }
        if (unit == nullptr) {
            if (i >= text.size()) fail("missing unit after value", text);
            fail("unknown unit \"" + text.substr(i, 1) + "\"", text);
        }
        i += std::string_view(unit->suffix).size();
        if (unit->rank >= last_rank) {
            fail(std::string("unit \"") + unit->suffix + "\" out of descending order", text);
        }
        last_rank = unit->rank;
        if (unit->millis != 0 && value > UINT64_MAX / unit->millis) fail("value overflow", text);
        const uint64_t part = value * unit->millis;
        if (total > UINT64_MAX - part) fail("value overflow", text);
        total += part;
    }
    return Duration{total};
}

std::string format_duration(Duration d) {
    if (d.millis == 0) return "0s";
    std::string out;
    uint64_t rest = d.millis;
    const uint64_t h = rest / 3'600'000;
    rest %= 3'600'000;
    const uint64_t m = rest / 60'000;
    rest %= 60'000;
    const uint64_t s = rest / 1'000;
    const uint64_t ms = rest % 1'000;
    if (h) out += std::to_string(h) + "h";
    if (m) out += std::to_string(m) + "m";
    if (s) out += std::to_string(s) + "s";
    if (ms) out += std::to_string(ms) + "ms";
    return out;
}

}  // namespace hammer
