#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hammer/clock.hpp"
#include "hammer/metrics.hpp"
#include "hammer/plan.hpp"
#include "hammer/records.hpp"
#include "hammer/report.hpp"
#include "hammer/rpc_client.hpp"

namespace hammer {

/// Round-robin dispatch: transaction i of a profile goes to node i mod k.
uint64_t assign_node(uint64_t seq_within_profile, uint64_t node_count);

/// Hands out sender nonces exactly once each, starting from the chain's
/// pending count. Initialize once per run.
class NonceCounter {
public:
    explicit NonceCounter(uint64_t initial) : initial_(initial), next_(initial) {}

    uint64_t next() { return next_.fetch_add(1, std::memory_order_relaxed); }
    uint64_t initial() const { return initial_; }
    uint64_t issued() const { return next_.load(std::memory_order_relaxed) - initial_; }

private:
    uint64_t initial_;
    std::atomic<uint64_t> next_;
};

/// eth_getTransactionCount(sender, "pending"); surfaces RPC errors.
uint64_t fetch_initial_nonce(const JsonRpcClient& client, const Address& sender);

/// Raised when a profile cannot run at all (every node unreachable).
class ProfileAbortError : public std::runtime_error {
public:
    explicit ProfileAbortError(const std::string& what) : std::runtime_error(what) {}
};

/// Plan-wide state shared by every profile of a run.
struct PlanContext {
    const TestPlan* plan = nullptr;
    Clock* clock = nullptr;
    std::vector<const JsonRpcClient*> clients;  // aligned with plan->nodes
    NonceCounter* nonces = nullptr;
    uint64_t profile_index = 0;
    uint64_t seq_base = 0;  // global seq of this profile's first record
    Duration receipt_poll = Duration{250};
};

/// Runs one profile to completion: profile.workers concurrent submitters,
/// then receipt polling until every record is terminal. Throws
/// ProfileAbortError when no node answers the initial probe.
///
/// Virtual-clock contract: call with one freeze hold on ctx.clock; the hold
/// is released once every worker is registered and re-taken by the last
/// worker to finish, so the function also returns holding one. This keeps
/// time pinned across the pool's start and drain, where otherwise unrelated
/// sleepers could advance the clock by a scheduling-dependent amount.
ProfileResult run_profile(const TestProfile& profile, const PlanContext& ctx);

struct RunOptions {
    Duration receipt_poll = Duration{250};
    Duration resource_period = Duration::from_seconds(1);
    bool collect_resources = true;
    std::string proc_root = "/proc";
};

struct RunResult {
    RunSummary summary;
    std::vector<ProfileResult> profiles;  // full records, for CSV export
    std::vector<TpsSample> tps_samples;   // per observed block, in order
    bool aborted = false;
    std::string abort_reason;
};

/// Executes the whole plan: profiles strictly in order, each followed by its
/// quiet period; a block watcher and a resource sampler run alongside. On a
/// profile abort the partial summary keeps the completed profiles.
RunResult run_plan(const TestPlan& plan, Clock& clock, const RunOptions& options = {});

}  // namespace hammer
