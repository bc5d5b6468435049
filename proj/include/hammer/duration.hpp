#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hammer {

/// Millisecond-resolution duration as written in config files: "1m", "30s",
/// "10ms", "0s", and compound forms like "1m30s" (strictly descending units).
struct Duration {
    uint64_t millis = 0;

    constexpr Duration() = default;
    constexpr explicit Duration(uint64_t ms) : millis(ms) {}

    static constexpr Duration zero() { return Duration{0}; }
    static constexpr Duration from_seconds(uint64_t s) { return Duration{s * 1000}; }

    std::chrono::nanoseconds ns() const { return std::chrono::milliseconds(millis); }

    friend bool operator==(const Duration&, const Duration&) = default;
    friend auto operator<=>(const Duration&, const Duration&) = default;
};

class DurationParseError : public std::runtime_error {
public:
    explicit DurationParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses "<int><unit>" sequences, units in {ms, s, m, h}, left-to-right with
/// strictly descending units. Throws DurationParseError naming the offending
/// token.
Duration parse_duration(const std::string& text);

/// Canonical largest-unit-first rendering; parse_duration(format_duration(d))
/// == d for every representable value. Zero renders as "0s".
std::string format_duration(Duration d);

}  // namespace hammer
