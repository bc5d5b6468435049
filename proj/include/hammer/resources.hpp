#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hammer {

/// One host measurement. Fields are optional because a metric whose source
/// is unreadable must be reported as absent, not as zero.
struct ResourceSample {
    int64_t at_ns = 0;                      // caller's clock timestamp
    std::optional<double> cpu_percent;      // system-wide busy share since last sample
    std::optional<uint64_t> rss_bytes;      // this process
    std::optional<uint64_t> net_rx_bytes;   // cumulative, all interfaces except lo
    std::optional<uint64_t> net_tx_bytes;

    friend bool operator==(const ResourceSample&, const ResourceSample&) = default;
};

/// Reads /proc (or a substitute tree in tests). CPU utilization is a delta
/// between consecutive sample() calls, so the first call never reports it.
class ResourceSampler {
public:
    explicit ResourceSampler(std::string proc_root = "/proc");

    ResourceSample sample(int64_t at_ns);

private:
    std::string proc_root_;
    bool have_prev_ = false;
    uint64_t prev_busy_ = 0;
    uint64_t prev_total_ = 0;
};

}  // namespace hammer
