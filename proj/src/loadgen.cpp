#include "hammer/loadgen.hpp"

#include <algorithm>
#include <ctime>
#include <latch>
#include <thread>

#include "hammer/abi.hpp"
#include "hammer/workload.hpp"

namespace hammer {

uint64_t assign_node(uint64_t seq_within_profile, uint64_t node_count) {
    if (node_count == 0) throw std::invalid_argument("node_count must be at least 1");
    return seq_within_profile % node_count;
}

uint64_t fetch_initial_nonce(const JsonRpcClient& client, const Address& sender) {
    return fetch_transaction_count(client, sender, "pending");
}

namespace {

Address to_address(const std::vector<uint8_t>& bytes) {
    Address out{};
    std::copy_n(bytes.begin(), std::min<size_t>(bytes.size(), out.size()), out.begin());
    return out;
}

void fetch_max(std::atomic<int64_t>& target, int64_t value) {
    int64_t cur = target.load(std::memory_order_relaxed);
    while (cur < value &&
           !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
}

struct ProfileShared {
    const TestProfile* profile;
    const PlanContext* ctx;
    std::vector<TxRecord>* records;
    std::atomic<uint64_t> dispenser{0};
    std::atomic<int64_t> last_terminal{0};
    std::unique_ptr<std::latch> ready;   // workers + orchestrator
    std::atomic<uint64_t> active{0};
};

/// Registers the worker with the clock, waits for the whole pool to be
/// registered, and on the way out has the last worker freeze the clock so
/// no other sleeper can advance time before the orchestrator resumes.
class WorkerGate {
public:
    explicit WorkerGate(ProfileShared& shared)
        : shared_(shared), guard_(*shared.ctx->clock) {
        shared_.ready->arrive_and_wait();
    }

    ~WorkerGate() {
        if (shared_.active.fetch_sub(1) == 1) shared_.ctx->clock->freeze();
    }

private:
    ProfileShared& shared_;
    ClockParticipant guard_;
};

/// Submits every transaction the dispenser hands out, then polls receipts
/// for its own submissions until all are terminal. Submissions never sleep,
/// so on a virtual clock a profile's whole load lands before the next seal.
void write_worker(ProfileShared& shared) {
    const TestProfile& profile = *shared.profile;
    const PlanContext& ctx = *shared.ctx;
    Clock& clock = *ctx.clock;
    WorkerGate gate(shared);

    const uint64_t n = profile.transactions;
    const uint64_t k = ctx.clients.size();
    const Address sender = to_address(ctx.plan->sender_address);
    const Address contract = to_address(ctx.plan->contract_address);
    std::vector<TxRecord>& records = *shared.records;

    std::vector<size_t> mine;
    for (;;) {
        const uint64_t w = shared.dispenser.fetch_add(1, std::memory_order_relaxed);
        if (w >= n) break;
        const uint64_t seq = ctx.seq_base + w;
        TxRecord& rec = records[w];
        rec.seq = seq;
        rec.profile_index = ctx.profile_index;
        rec.node_index = assign_node(w, k);

        TxCall call;
        call.from = sender;
        call.to = contract;
        if (profile.call_contract_method) {
            call.data = encode_call(set_item_selector(),
                                    {seq, workload_value(ctx.plan->seed, seq)});
        } else {
            call.value_wei = 1;  // plain transfer probe
        }
        call.nonce = ctx.nonces->next();

        rec.submit_ns = clock.now().count();
        try {
            rec.tx_hash = submit_transaction(*ctx.clients[rec.node_index], call);
            mine.push_back(static_cast<size_t>(w));
        } catch (const std::exception&) {
            rec.status = TxStatus::rejected;
            fetch_max(shared.last_terminal, clock.now().count());
        }
    }

    const int64_t timeout_ns = static_cast<int64_t>(ctx.plan->receipt_timeout.ns().count());
    while (!mine.empty()) {
        size_t keep = 0;
        for (size_t i = 0; i < mine.size(); ++i) {
            TxRecord& rec = records[mine[i]];
            bool done = false;
            try {
                const auto receipt =
                    fetch_receipt(*ctx.clients[rec.node_index], *rec.tx_hash);
                if (receipt) {
                    const int64_t now = clock.now().count();
                    rec.status = TxStatus::included;
                    rec.inclusion_block = receipt->block_number;
                    rec.inclusion_ns = now;
                    fetch_max(shared.last_terminal, now);
                    done = true;
                }
            } catch (const std::exception&) {
                // transient transport failure: keep polling until the deadline
            }
            if (!done && clock.now().count() - rec.submit_ns >= timeout_ns) {
                rec.status = TxStatus::failed_timeout;
                fetch_max(shared.last_terminal, clock.now().count());
                done = true;
            }
            if (!done) mine[keep++] = mine[i];
        }
        mine.resize(keep);
        if (!mine.empty()) clock.sleep_for(ctx.receipt_poll.ns());
    }
}

/// Read-mode worker: getItem calls cycling over keys written earlier in the
/// run (key 0 when nothing was written). Latency is the call round trip.
void read_worker(ProfileShared& shared) {
    const TestProfile& profile = *shared.profile;
    const PlanContext& ctx = *shared.ctx;
    Clock& clock = *ctx.clock;
    WorkerGate gate(shared);

    const uint64_t n = profile.transactions;
    const uint64_t k = ctx.clients.size();
    const Address sender = to_address(ctx.plan->sender_address);
    const Address contract = to_address(ctx.plan->contract_address);
    std::vector<TxRecord>& records = *shared.records;

    for (;;) {
        const uint64_t w = shared.dispenser.fetch_add(1, std::memory_order_relaxed);
        if (w >= n) break;
        TxRecord& rec = records[w];
        rec.seq = ctx.seq_base + w;
        rec.profile_index = ctx.profile_index;
        rec.node_index = assign_node(w, k);

        const uint64_t key = ctx.seq_base > 0 ? w % ctx.seq_base : 0;
        TxCall call;
        call.from = sender;
        call.to = contract;
        call.data = encode_call(get_item_selector(), {key});

        rec.submit_ns = clock.now().count();
        try {
            call_read(*ctx.clients[rec.node_index], call);
            rec.inclusion_ns = clock.now().count();
            rec.status = TxStatus::included;
            fetch_max(shared.last_terminal, *rec.inclusion_ns);
        } catch (const std::exception&) {
            rec.status = TxStatus::rejected;
            fetch_max(shared.last_terminal, clock.now().count());
        }
    }
}

bool probe_any(const std::vector<const JsonRpcClient*>& clients, std::string& error) {
    for (const auto* client : clients) {
        try {
            fetch_block_number(*client);
            return true;
        } catch (const std::exception& e) {
            if (error.empty()) error = std::string(client->url()) + ": " + e.what();
        }
    }
    return false;
}

LatencyStats stats_of(const std::vector<int64_t>& samples) {
    return latency_stats(samples);
}

}  // namespace

ProfileResult run_profile(const TestProfile& profile, const PlanContext& ctx) {
    std::string probe_error;
    if (!probe_any(ctx.clients, probe_error)) {
        if (probe_error.empty()) probe_error = "no nodes configured";
        throw ProfileAbortError("profile " + std::to_string(ctx.profile_index) +
                                ": all nodes unreachable (" + probe_error + ")");
    }

    ProfileResult result;
    result.profile_index = ctx.profile_index;
    result.records.resize(profile.transactions);

    ProfileShared shared;
    shared.profile = &profile;
    shared.ctx = &ctx;
    shared.records = &result.records;
    const int64_t t0 = ctx.clock->now().count();
    shared.last_terminal.store(t0);

    const uint64_t worker_count = std::min<uint64_t>(profile.workers, profile.transactions);
    shared.ready = std::make_unique<std::latch>(static_cast<ptrdiff_t>(worker_count) + 1);
    shared.active.store(worker_count);

    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (uint64_t i = 0; i < worker_count; ++i) {
        pool.emplace_back([&shared, &profile] {
            if (profile.mode == WorkloadMode::read) {
                read_worker(shared);
            } else {
                write_worker(shared);
            }
        });
    }
    // Every worker is registered with the clock once the latch opens, so a
    // caller-held freeze can be released without time escaping first.
    shared.ready->arrive_and_wait();
    ctx.clock->unfreeze();
    for (auto& thread : pool) thread.join();

    result.produced = result.records.size();
    result.node_submitted.assign(ctx.clients.size(), 0);
    for (const auto& rec : result.records) {
        ++result.node_submitted[rec.node_index];
        switch (rec.status) {
            case TxStatus::included: ++result.included; break;
            case TxStatus::failed_timeout: ++result.failed_timeout; break;
            case TxStatus::rejected: ++result.rejected; break;
            case TxStatus::pending: break;  // unreachable at completion
        }
    }
    const int64_t t_end = std::max(shared.last_terminal.load(), t0);
    result.wall_time = Duration{static_cast<uint64_t>(t_end - t0) / 1'000'000};
    return result;
}

RunResult run_plan(const TestPlan& plan, Clock& clock, const RunOptions& options) {
    RunResult out;
    out.summary.started_at_unix = static_cast<int64_t>(::time(nullptr));

    // Pin virtual time for every stretch where this thread orchestrates
    // rather than sleeps; run_profile takes the hold over while its workers
    // run and hands it back when the last worker drains.
    clock.freeze();
    const int64_t run_t0 = clock.now().count();

    std::vector<std::unique_ptr<JsonRpcClient>> owned;
    std::vector<const JsonRpcClient*> clients;
    owned.reserve(plan.nodes.size());
    for (const auto& node : plan.nodes) {
        owned.push_back(std::make_unique<JsonRpcClient>(node.url));
        clients.push_back(owned.back().get());
    }

    // One reachable node supplies the initial nonce and the watcher anchor.
    const Address sender = to_address(plan.sender_address);
    std::optional<uint64_t> initial_nonce;
    std::optional<Block> anchor;
    std::string first_error;
    for (const auto* client : clients) {
        try {
            const uint64_t head = fetch_block_number(*client);
            anchor = fetch_block(*client, head);
            if (!anchor) continue;
            initial_nonce = fetch_initial_nonce(*client, sender);
            break;
        } catch (const std::exception& e) {
            if (first_error.empty()) first_error = std::string(client->url()) + ": " + e.what();
        }
    }

    auto finalize = [&](bool aborted, const std::string& reason) {
        out.aborted = aborted;
        out.abort_reason = reason;

        std::vector<int64_t> write_lat, read_lat;
        bool any_read_profile = false;
        for (const auto& result : out.profiles) {
            const bool is_read =
                plan.profiles[result.profile_index].mode == WorkloadMode::read;
            any_read_profile = any_read_profile || is_read;

            ProfileSummary ps;
            ps.index = result.profile_index;
            ps.produced = result.produced;
            ps.included = result.included;
            ps.failed_timeout = result.failed_timeout;
            ps.rejected = result.rejected;
            ps.wall_time = result.wall_time;
            ps.node_submitted = result.node_submitted;

            std::vector<int64_t> lat;
            std::optional<uint64_t> lo, hi;
            for (const auto& rec : result.records) {
                if (const auto l = rec.latency_ns()) {
                    lat.push_back(*l);
                    (is_read ? read_lat : write_lat).push_back(*l);
                }
                if (rec.inclusion_block) {
                    lo = lo ? std::min(*lo, *rec.inclusion_block) : *rec.inclusion_block;
                    hi = hi ? std::max(*hi, *rec.inclusion_block) : *rec.inclusion_block;
                }
            }
            ps.latency = stats_of(lat);
            if (lo) {
                std::vector<TpsSample> window;
                for (const auto& s : out.tps_samples) {
                    if (s.block_number >= *lo && s.block_number <= *hi) window.push_back(s);
                }
                ps.tps = aggregate_tps(window);
            }
            out.summary.profiles.push_back(std::move(ps));
        }

        out.summary.latency = stats_of(write_lat);
        if (any_read_profile) out.summary.read_latency = stats_of(read_lat);

        // Overall TPS covers the active window: first through last
        // tx-bearing block, so idle tails do not dilute the rate.
        size_t first = out.tps_samples.size(), last = 0;
        for (size_t i = 0; i < out.tps_samples.size(); ++i) {
            if (out.tps_samples[i].tx_count > 0) {
                if (first == out.tps_samples.size()) first = i;
                last = i;
            }
        }
        if (first < out.tps_samples.size()) {
            out.summary.tps_overall = aggregate_tps(
                std::span(out.tps_samples).subspan(first, last - first + 1));
        }

        const int64_t total_ns = clock.now().count() - run_t0;
        out.summary.total_execution =
            Duration{(static_cast<uint64_t>(std::max<int64_t>(total_ns, 0)) + 999'999) /
                     1'000'000};
    };

    if (!initial_nonce) {
        finalize(true, "all nodes unreachable (" + first_error + ")");
        clock.unfreeze();
        return out;
    }

    NonceCounter nonces(*initial_nonce);

    std::atomic<bool> stop_watch{false};
    std::mutex watch_mu;
    Block prev = *anchor;
    std::thread watcher([&] {
        watch_blocks(
            *clients[0], clock, anchor->number + 1,
            [&](const Block& block) {
                std::lock_guard lk(watch_mu);
                try {
                    out.tps_samples.push_back(block_tps(prev, block));
                } catch (const std::invalid_argument&) {
                    // non-monotonic upstream chain: skip the sample
                }
                prev = block;
            },
            [&] { return stop_watch.load(); });
    });

    std::atomic<bool> stop_sampler{false};
    std::thread sampler;
    if (options.collect_resources) {
        sampler = std::thread([&] {
            ClockParticipant guard(clock);
            ResourceSampler rs(options.proc_root);
            const auto period = options.resource_period.ns();
            Clock::ns next_at = clock.now() + period;
            while (!stop_sampler.load()) {
                if (clock.sleep_until(next_at, [&] { return stop_sampler.load(); })) break;
                out.summary.resources.push_back(rs.sample(clock.now().count()));
                next_at += period;
            }
        });
    }

    bool aborted = false;
    std::string reason;
    uint64_t seq_base = 0;
    for (size_t i = 0; i < plan.profiles.size(); ++i) {
        PlanContext ctx;
        ctx.plan = &plan;
        ctx.clock = &clock;
        ctx.clients = clients;
        ctx.nonces = &nonces;
        ctx.profile_index = i;
        ctx.seq_base = seq_base;
        ctx.receipt_poll = options.receipt_poll;
        try {
            out.profiles.push_back(run_profile(plan.profiles[i], ctx));
        } catch (const ProfileAbortError& e) {
            aborted = true;
            reason = e.what();
            break;
        }
        seq_base += out.profiles.back().produced;

        const auto quiet = plan.profiles[i].timeout.ns();
        if (quiet.count() > 0) {
            // Register before releasing the hold so the quorum keeps time
            // pinned until this thread is actually inside the sleep.
            ClockParticipant guard(clock);
            clock.unfreeze();
            clock.sleep_for(quiet);
            clock.freeze();
        }
    }

    stop_watch.store(true);
    stop_sampler.store(true);
    clock.interrupt();
    watcher.join();
    if (sampler.joinable()) sampler.join();

    finalize(aborted, reason);
    clock.unfreeze();
    return out;
}

}  // namespace hammer
