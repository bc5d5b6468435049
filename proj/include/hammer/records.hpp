#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hammer/duration.hpp"
#include "hammer/hex.hpp"

namespace hammer {

enum class TxStatus { pending, included, failed_timeout, rejected };

std::string to_string(TxStatus status);

/// One tracked submission. For write workloads, included means a receipt was
/// observed and both inclusion fields are set. Read-mode records reuse
/// `included` for a successful call and set only inclusion_time (reads have
/// no block); rejected covers any submission-side RPC failure.
struct TxRecord {
    uint64_t seq = 0;            // global, 0-based across the whole run
    uint64_t profile_index = 0;
    uint64_t node_index = 0;
    int64_t submit_ns = 0;       // monotonic clock
    std::optional<Hash32> tx_hash;
    TxStatus status = TxStatus::pending;
    std::optional<uint64_t> inclusion_block;
    std::optional<int64_t> inclusion_ns;

    /// Submission-to-receipt-observation time; absent unless included.
    std::optional<int64_t> latency_ns() const {
        if (!inclusion_ns) return std::nullopt;
        return *inclusion_ns - submit_ns;
    }
};

struct ProfileResult {
    uint64_t profile_index = 0;
    uint64_t produced = 0;
    uint64_t included = 0;
    uint64_t failed_timeout = 0;
    uint64_t rejected = 0;
    Duration wall_time;
    std::vector<TxRecord> records;
    std::vector<uint64_t> node_submitted;  // per node, aligned with plan.nodes
};

}  // namespace hammer
