#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hammer/clock.hpp"
#include "hammer/duration.hpp"
#include "hammer/rpc_client.hpp"
#include "hammer/rpc_codec.hpp"

namespace hammer {

/// Throughput measured over one block: transactions in the block divided by
/// the timestamp span to its parent. block_timestamp (chain seconds) rides
/// along so samples can be exported as a time series.
struct TpsSample {
    uint64_t block_number = 0;
    uint64_t block_timestamp = 0;
    uint64_t tx_count = 0;
    double span_seconds = 0.0;

    double tps() const { return span_seconds > 0.0 ? tx_count / span_seconds : 0.0; }

    friend bool operator==(const TpsSample&, const TpsSample&) = default;
};

/// `cur` must sit immediately above `prev` with a strictly later timestamp;
/// anything else throws std::invalid_argument.
TpsSample block_tps(const Block& prev, const Block& cur);

/// Total transactions over total span, which weights fast and slow blocks
/// correctly; this is not the mean of the per-block rates. Absent for an
/// empty sample list.
std::optional<double> aggregate_tps(std::span<const TpsSample> samples);

struct LatencyStats {
    uint64_t count = 0;
    int64_t min_ns = 0;
    int64_t max_ns = 0;
    double mean_ns = 0.0;
    int64_t p50_ns = 0;
    int64_t p95_ns = 0;
    int64_t p99_ns = 0;

    friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

/// Percentiles use the nearest-rank rule: p(q) is the element at 1-based
/// index ceil(q * n) of the sorted samples. Empty input yields all zeros.
LatencyStats latency_stats(std::vector<int64_t> samples_ns);

struct WatchOptions {
    Duration poll_interval = Duration{500};
    Duration initial_backoff = Duration{500};
    Duration retry_budget = Duration::from_seconds(30);
};

struct WatchResult {
    uint64_t last_block = 0;  // highest height handed to the callback
    bool failed = false;
    std::string error;
};

/// Follows the chain head, invoking `on_block` exactly once per height, in
/// order, starting at `from_block`. Polls eth_blockNumber every
/// poll_interval; transport errors back off doubling from initial_backoff
/// until retry_budget is exhausted, which ends the watch with failed=true.
/// When `stop` turns true the watcher sweeps up to the current head once
/// more and returns, so blocks sealed just before the stop are not missed.
WatchResult watch_blocks(const JsonRpcClient& client, Clock& clock, uint64_t from_block,
                         const std::function<void(const Block&)>& on_block,
                         const std::function<bool()>& stop, const WatchOptions& options = {});

}  // namespace hammer
