#include "hammer/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hammer {

namespace {

/// Exact nearest-rank index for q = num/1000: smallest valid 1-based index
/// >= q*n, computed in integers so ranks like 0.9*10 never round up.
int64_t percentile_of(const std::vector<int64_t>& sorted, uint64_t num) {
    const uint64_t n = sorted.size();
    uint64_t idx = (num * n + 999) / 1000;
    if (idx < 1) idx = 1;
    return sorted[idx - 1];
}

}  // namespace

TpsSample block_tps(const Block& prev, const Block& cur) {
    if (prev.number + 1 != cur.number) {
        throw std::invalid_argument("block_tps requires consecutive blocks");
    }
    if (cur.timestamp <= prev.timestamp) {
        throw std::invalid_argument("block_tps requires strictly increasing timestamps");
    }
    TpsSample sample;
    sample.block_number = cur.number;
    sample.block_timestamp = cur.timestamp;
    sample.tx_count = cur.tx_hashes.size();
    sample.span_seconds = static_cast<double>(cur.timestamp - prev.timestamp);
    return sample;
}

std::optional<double> aggregate_tps(std::span<const TpsSample> samples) {
    if (samples.empty()) return std::nullopt;
    uint64_t total_tx = 0;
    double total_span = 0.0;
    for (const auto& s : samples) {
        total_tx += s.tx_count;
        total_span += s.span_seconds;
    }
    if (total_span <= 0.0) return std::nullopt;
    return static_cast<double>(total_tx) / total_span;
}

LatencyStats latency_stats(std::vector<int64_t> samples_ns) {
    LatencyStats stats;
    if (samples_ns.empty()) return stats;
    std::sort(samples_ns.begin(), samples_ns.end());
    stats.count = samples_ns.size();
    stats.min_ns = samples_ns.front();
    stats.max_ns = samples_ns.back();
    const double sum = std::accumulate(samples_ns.begin(), samples_ns.end(), 0.0);
    stats.mean_ns = sum / static_cast<double>(samples_ns.size());
    stats.p50_ns = percentile_of(samples_ns, 500);
    stats.p95_ns = percentile_of(samples_ns, 950);
    stats.p99_ns = percentile_of(samples_ns, 990);
    return stats;
}

WatchResult watch_blocks(const JsonRpcClient& client, Clock& clock, uint64_t from_block,
                         const std::function<void(const Block&)>& on_block,
                         const std::function<bool()>& stop, const WatchOptions& options) {
    ClockParticipant guard(clock);
    WatchResult result;
    uint64_t next = from_block;
    Duration backoff = options.initial_backoff;
    uint64_t spent_ms = 0;

    for (;;) {
        const bool final_pass = stop && stop();
        try {
            const uint64_t head = fetch_block_number(client);
            while (next <= head) {
                const auto block = fetch_block(client, next);
                if (!block) break;  // head raced ahead of storage; retry next poll
                on_block(*block);
                result.last_block = next;
                ++next;
            }
            backoff = options.initial_backoff;
            spent_ms = 0;
        } catch (const std::exception& e) {
            if (final_pass) return result;
            if (spent_ms + backoff.millis > options.retry_budget.millis) {
                result.failed = true;
                result.error = e.what();
                return result;
            }
            clock.sleep_for(backoff.ns(), stop);
            spent_ms += backoff.millis;
            backoff.millis *= 2;
            continue;
        }
        if (final_pass) return result;
        clock.sleep_for(options.poll_interval.ns(), stop);
    }
}

}  // namespace hammer
