#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hammer/clock.hpp"
#include "hammer/duration.hpp"
#include "hammer/plan.hpp"
#include "hammer/rpc_codec.hpp"
#include "hammer/workload.hpp"

namespace httplib {
class Server;
}

namespace hammer::sim {

enum class ClockMode { real, virtual_time };

/// Mock chain parameters. drop_probability accepts a transaction (a hash is
/// returned) but silently discards it; reject_probability errors the
/// submission with code -32000. drop + reject must not exceed 1.
struct ChainConfig {
    Duration block_interval = Duration::from_seconds(1);
    uint64_t max_tx_per_block = 500;
    Duration rpc_latency;  // real-time delay added per request
    double drop_probability = 0.0;
    double reject_probability = 0.0;
    uint64_t seed = 0;
    ClockMode clock = ClockMode::real;
    uint64_t endpoints = 1;
};

/// Parses a chain config JSON document (camelCase keys, unknown keys
/// rejected, durations in the "1s"/"500ms" format). Throws PlanError.
ChainConfig load_chain_config(const std::string& document);

struct StoredTx {
    Hash32 hash{};
    Address from{};
    Address to{};
    uint64_t value_wei = 0;
    std::optional<uint64_t> nonce;
    std::vector<uint8_t> data;
};

struct SealedBlock {
    uint64_t number = 0;
    uint64_t timestamp = 0;  // whole seconds
    Hash32 hash{};
    Hash32 parent_hash{};
    std::vector<StoredTx> txs;
};

/// One accepted submission, stamped with the shared clock.
struct Arrival {
    int64_t at_ns = 0;
    Hash32 tx_hash{};
};

/// The chain core: an in-memory chain plus the JSON-RPC handler that serves
/// it. All mutations are serialized through one mutex; sealing is driven
/// externally (by Cluster's sealer thread or directly by tests).
class Node {
public:
    Node(ChainConfig config, Clock& clock);

    /// Full JSON-RPC dispatch over a parsed request envelope.
    wire_json handle_rpc(const wire_json& request);

    /// Body-to-body convenience: parse errors map to code -32700.
    std::string handle_rpc_text(const std::string& body);

    /// Dequeues up to max_tx_per_block transactions FIFO and appends a block
    /// with timestamp = previous + block_interval seconds.
    SealedBlock seal_one();

    uint64_t head_number() const;
    size_t mempool_size() const;
    std::vector<SealedBlock> blocks_snapshot() const;
    std::vector<Arrival> arrivals_snapshot() const;

    /// Canonical JSON of block contents and the key/value store, with empty
    /// blocks at both ends trimmed (they reflect sealer uptime around the
    /// load, not submissions); byte-equal across runs iff the submitted
    /// content and its block placement are identical.
    std::string dump_chain() const;

    const ChainConfig& config() const { return config_; }

private:
    wire_json dispatch(const std::string& method, const wire_json& params);
    wire_json rpc_send_transaction(const wire_json& params);
    wire_json rpc_get_receipt(const wire_json& params) const;
    wire_json rpc_get_block(const wire_json& params) const;
    wire_json rpc_call(const wire_json& params) const;
    wire_json rpc_transaction_count(const wire_json& params) const;
    const SealedBlock* block_at(uint64_t number) const;

    ChainConfig config_;
    Clock& clock_;
    mutable std::mutex mu_;
    std::vector<SealedBlock> blocks_;
    std::deque<StoredTx> mempool_;
    std::map<Word32, Word32> kv_;
    std::map<std::string, uint64_t> nonces_;  // sender hex -> submissions seen
    std::map<Hash32, uint64_t> included_in_;  // tx hash -> block number
    std::vector<Arrival> arrivals_;
    SplitMix64 fault_rng_;
    uint64_t submission_seq_ = 0;
};

/// A running mock cluster: N HTTP listeners sharing one Node, plus a sealer
/// thread ticking every block_interval on the supplied clock. Sealing starts
/// with the first incoming request.
class Cluster {
public:
    /// base_port 0 binds OS-assigned ports. Throws std::runtime_error on
    /// bind failure. The clock must outlive the cluster.
    Cluster(ChainConfig config, Clock& clock, const std::string& host = "127.0.0.1",
            int base_port = 0);
    ~Cluster();

    Cluster(const Cluster&) = delete;
    Cluster& operator=(const Cluster&) = delete;

    const std::vector<std::string>& endpoint_urls() const { return urls_; }
    Node& node() { return *node_; }
    const Node& node() const { return *node_; }

    /// Halts listeners and sealing; idempotent.
    void stop();

private:
    /// Spawns the sealer on the first request (no-op afterwards). Deferring
    /// it keeps a virtual clock at its start value until a client appears.
    void ensure_sealer();

    std::unique_ptr<Node> node_;
    Clock& clock_;
    std::vector<std::unique_ptr<httplib::Server>> servers_;
    std::vector<std::thread> listen_threads_;
    std::mutex sealer_mu_;
    std::thread sealer_;
    std::vector<std::string> urls_;
    std::atomic<bool> stopping_{false};
    bool stopped_ = false;
};

}  // namespace hammer::sim
