#include "hammer/simnode.hpp"

#include <httplib.h>

#include <cstring>
#include <limits>
#include <stdexcept>
#include <utility>

#include "hammer/abi.hpp"
#include "hammer/keccak.hpp"

namespace hammer::sim {

namespace {

constexpr int64_t kParseError = -32700;
constexpr int64_t kInvalidRequest = -32600;
constexpr int64_t kMethodNotFound = -32601;
constexpr int64_t kInvalidParams = -32602;
constexpr int64_t kServerError = -32000;

wire_json make_result(const wire_json& id, wire_json result) {
    wire_json out;
    out["jsonrpc"] = "2.0";
    out["id"] = id;
    out["result"] = std::move(result);
    return out;
}

wire_json make_error(const wire_json& id, int64_t code, const std::string& message) {
    wire_json out;
    out["jsonrpc"] = "2.0";
    out["id"] = id;
    out["error"] = wire_json{{"code", code}, {"message", message}};
    return out;
}

/// Thrown inside method handlers; converted to an error response by the
/// dispatcher.
struct RpcFault {
    int64_t code;
    std::string message;
};

void append_u64(std::vector<uint8_t>& buf, uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        buf.push_back(static_cast<uint8_t>(v >> shift));
    }
}

Hash32 hash_transaction(const StoredTx& tx, uint64_t seq) {
    std::vector<uint8_t> buf;
    buf.reserve(20 + 20 + 8 + 1 + 8 + tx.data.size());
    buf.insert(buf.end(), tx.from.begin(), tx.from.end());
    buf.insert(buf.end(), tx.to.begin(), tx.to.end());
    append_u64(buf, tx.value_wei);
    buf.push_back(tx.nonce ? 1 : 0);
    append_u64(buf, tx.nonce ? *tx.nonce : seq);
    buf.insert(buf.end(), tx.data.begin(), tx.data.end());
    return keccak256(buf);
}

Hash32 hash_block(uint64_t number, uint64_t timestamp, const Hash32& parent,
                  const std::vector<StoredTx>& txs) {
    std::vector<uint8_t> buf;
    buf.reserve(8 + 8 + 32 + 32 * txs.size());
    append_u64(buf, number);
    append_u64(buf, timestamp);
    buf.insert(buf.end(), parent.begin(), parent.end());
    for (const auto& tx : txs) buf.insert(buf.end(), tx.hash.begin(), tx.hash.end());
    return keccak256(buf);
}

uint64_t parse_block_tag(const wire_json& tag, uint64_t head) {
    if (!tag.is_string()) throw RpcFault{kInvalidParams, "block tag must be a string"};
    const auto text = tag.get<std::string>();
    if (text == "latest" || text == "pending") return head;
    if (text == "earliest") return 0;
    try {
        return from_quantity(text);
    } catch (const HexError& e) {
        throw RpcFault{kInvalidParams, std::string("bad block tag: ") + e.what()};
    }
}

wire_json tx_object(const StoredTx& tx) {
    wire_json obj;
    obj["hash"] = to_hex(tx.hash);
    obj["from"] = to_hex(tx.from);
    obj["to"] = to_hex(tx.to);
    obj["value"] = to_quantity(tx.value_wei);
    if (tx.nonce) obj["nonce"] = to_quantity(*tx.nonce);
    obj["input"] = to_hex(tx.data);
    return obj;
}

bool selector_matches(const std::vector<uint8_t>& data, const Selector& sel) {
    return data.size() >= 4 && std::memcmp(data.data(), sel.data(), 4) == 0;
}

Duration require_duration(const wire_json& obj, const char* key, const std::string& path) {
    if (!obj[key].is_string()) throw PlanError(path, "expected a duration string");
    try {
        return parse_duration(obj[key].get<std::string>());
    } catch (const DurationParseError& e) {
        throw PlanError(path, e.what());
    }
}

double require_probability(const wire_json& obj, const char* key, const std::string& path) {
    if (!obj[key].is_number()) throw PlanError(path, "expected a number");
    const double v = obj[key].get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw PlanError(path, "must be within [0, 1]");
    return v;
}

}  // namespace

ChainConfig load_chain_config(const std::string& document) {
    const auto doc = wire_json::parse(document, nullptr, false);
    if (doc.is_discarded()) throw PlanError("", "config is not valid JSON");
    if (!doc.is_object()) throw PlanError("", "config must be a JSON object");

    static const char* known[] = {"blockInterval", "maxTxPerBlock",     "rpcLatency",
                                  "dropProbability", "rejectProbability", "seed",
                                  "clock",         "endpoints"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw PlanError(key, "unknown key");
    }

    ChainConfig config;
    if (doc.contains("blockInterval")) {
        config.block_interval = require_duration(doc, "blockInterval", "blockInterval");
    }
    if (config.block_interval.millis < 1000 || config.block_interval.millis % 1000 != 0) {
        throw PlanError("blockInterval", "must be a whole number of seconds, at least 1s");
    }
    if (doc.contains("maxTxPerBlock")) {
        if (!doc["maxTxPerBlock"].is_number_unsigned() || doc["maxTxPerBlock"].get<uint64_t>() == 0) {
            throw PlanError("maxTxPerBlock", "must be a positive integer");
        }
        config.max_tx_per_block = doc["maxTxPerBlock"].get<uint64_t>();
    }
    if (doc.contains("rpcLatency")) {
        config.rpc_latency = require_duration(doc, "rpcLatency", "rpcLatency");
    }
    if (doc.contains("dropProbability")) {
        config.drop_probability = require_probability(doc, "dropProbability", "dropProbability");
    }
    if (doc.contains("rejectProbability")) {
        config.reject_probability =
            require_probability(doc, "rejectProbability", "rejectProbability");
    }
    if (config.drop_probability + config.reject_probability > 1.0) {
        throw PlanError("dropProbability", "dropProbability + rejectProbability exceeds 1");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) {
            throw PlanError("seed", "must be a non-negative integer");
        }
        config.seed = doc["seed"].get<uint64_t>();
    }
    if (doc.contains("clock")) {
        if (!doc["clock"].is_string()) throw PlanError("clock", "expected \"real\" or \"virtual\"");
        const auto mode = doc["clock"].get<std::string>();
        if (mode == "real") {
            config.clock = ClockMode::real;
        } else if (mode == "virtual") {
            config.clock = ClockMode::virtual_time;
        } else {
            throw PlanError("clock", "expected \"real\" or \"virtual\", got \"" + mode + "\"");
        }
    }
    if (doc.contains("endpoints")) {
        if (!doc["endpoints"].is_number_unsigned() || doc["endpoints"].get<uint64_t>() == 0) {
            throw PlanError("endpoints", "must be a positive integer");
        }
        config.endpoints = doc["endpoints"].get<uint64_t>();
    }
    return config;
}

Node::Node(ChainConfig config, Clock& clock)
    : config_(std::move(config)), clock_(clock), fault_rng_(config_.seed) {
    SealedBlock genesis;
    genesis.number = 0;
    genesis.timestamp = 1'600'000'000ULL + config_.seed % 86'400ULL;
    genesis.parent_hash = Hash32{};
    genesis.hash = hash_block(0, genesis.timestamp, genesis.parent_hash, {});
    blocks_.push_back(std::move(genesis));
}

std::string Node::handle_rpc_text(const std::string& body) {
    const auto doc = wire_json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
        return make_error(nullptr, kParseError, "parse error").dump();
    }
    return handle_rpc(doc).dump();
}

wire_json Node::handle_rpc(const wire_json& request) {
    wire_json id = nullptr;
    if (request.is_object() && request.contains("id")) id = request["id"];
    if (!request.is_object() || !request.contains("method") || !request["method"].is_string()) {
        return make_error(id, kInvalidRequest, "invalid request");
    }
    wire_json params = wire_json::array();
    if (request.contains("params")) {
        if (!request["params"].is_array()) {
            return make_error(id, kInvalidParams, "params must be an array");
        }
        params = request["params"];
    }
    try {
        return make_result(id, dispatch(request["method"].get<std::string>(), params));
    } catch (const RpcFault& fault) {
        return make_error(id, fault.code, fault.message);
    } catch (const RpcDecodeError& e) {
        return make_error(id, kInvalidParams, e.what());
    }
}

wire_json Node::dispatch(const std::string& method, const wire_json& params) {
    if (method == "eth_sendTransaction") return rpc_send_transaction(params);
    if (method == "eth_getTransactionReceipt") return rpc_get_receipt(params);
    if (method == "eth_getBlockByNumber") return rpc_get_block(params);
    if (method == "eth_call") return rpc_call(params);
    if (method == "eth_getTransactionCount") return rpc_transaction_count(params);
    if (method == "eth_blockNumber") {
        std::lock_guard lk(mu_);
        return to_quantity(blocks_.back().number);
    }
    throw RpcFault{kMethodNotFound, "the method " + method + " does not exist"};
}

wire_json Node::rpc_send_transaction(const wire_json& params) {
    if (params.size() != 1) {
        throw RpcFault{kInvalidParams, "eth_sendTransaction takes one transaction object"};
    }
    const TxCall call = tx_call_from_json(params[0]);

    std::lock_guard lk(mu_);
    const double u = fault_rng_.next_unit();
    if (u < config_.reject_probability) {
        throw RpcFault{kServerError, "transaction rejected"};
    }

    StoredTx tx;
    tx.from = call.from;
    tx.to = call.to;
    tx.value_wei = call.value_wei;
    tx.nonce = call.nonce;
    tx.data = call.data;
    tx.hash = hash_transaction(tx, submission_seq_);
    ++submission_seq_;
    ++nonces_[to_hex(tx.from)];

    const Hash32 hash = tx.hash;
    const bool dropped = u < config_.reject_probability + config_.drop_probability;
    if (!dropped) {
        arrivals_.push_back({clock_.now().count(), hash});
        mempool_.push_back(std::move(tx));
    }
    return to_hex(hash);
}

wire_json Node::rpc_get_receipt(const wire_json& params) const {
    if (params.size() != 1 || !params[0].is_string()) {
        throw RpcFault{kInvalidParams, "eth_getTransactionReceipt takes one transaction hash"};
    }
    Hash32 hash;
    try {
        hash = parse_hash32(params[0].get<std::string>());
    } catch (const HexError& e) {
        throw RpcFault{kInvalidParams, e.what()};
    }
    std::lock_guard lk(mu_);
    const auto it = included_in_.find(hash);
    if (it == included_in_.end()) return nullptr;
    Receipt receipt;
    receipt.tx_hash = hash;
    receipt.block_number = it->second;
    receipt.status = ReceiptStatus::success;
    return receipt_to_json(receipt);
}

wire_json Node::rpc_get_block(const wire_json& params) const {
    if (params.size() != 2) {
        throw RpcFault{kInvalidParams, "eth_getBlockByNumber takes a block tag and a flag"};
    }
    if (!params[1].is_boolean()) {
        throw RpcFault{kInvalidParams, "second argument must be a boolean"};
    }
    const bool full = params[1].get<bool>();
    std::lock_guard lk(mu_);
    const uint64_t number = parse_block_tag(params[0], blocks_.back().number);
    const SealedBlock* block = block_at(number);
    if (block == nullptr) return nullptr;

    wire_json obj;
    obj["number"] = to_quantity(block->number);
    obj["hash"] = to_hex(block->hash);
    obj["parentHash"] = to_hex(block->parent_hash);
    obj["timestamp"] = to_quantity(block->timestamp);
    obj["transactions"] = wire_json::array();
    for (const auto& tx : block->txs) {
        if (full) {
            obj["transactions"].push_back(tx_object(tx));
        } else {
            obj["transactions"].push_back(to_hex(tx.hash));
        }
    }
    return obj;
}

wire_json Node::rpc_call(const wire_json& params) const {
    if (params.empty() || params.size() > 2) {
        throw RpcFault{kInvalidParams, "eth_call takes a call object and a block tag"};
    }
    const TxCall call = tx_call_from_json(params[0]);
    std::lock_guard lk(mu_);
    if (params.size() == 2) parse_block_tag(params[1], blocks_.back().number);

    if (selector_matches(call.data, get_item_selector()) && call.data.size() == 4 + 32) {
        Word32 key;
        std::memcpy(key.data(), call.data.data() + 4, 32);
        const auto it = kv_.find(key);
        const Word32 value = it == kv_.end() ? Word32{} : it->second;
        return to_hex(value);
    }
    if (selector_matches(call.data, set_item_selector()) && call.data.size() == 4 + 64) {
        return to_hex(Word32{});  // calls never persist state
    }
    throw RpcFault{kServerError, "execution reverted"};
}

wire_json Node::rpc_transaction_count(const wire_json& params) const {
    if (params.empty() || params.size() > 2 || !params[0].is_string()) {
        throw RpcFault{kInvalidParams, "eth_getTransactionCount takes an address and a block tag"};
    }
    Address address;
    try {
        address = parse_address(params[0].get<std::string>());
    } catch (const HexError& e) {
        throw RpcFault{kInvalidParams, e.what()};
    }
    std::lock_guard lk(mu_);
    if (params.size() == 2) parse_block_tag(params[1], blocks_.back().number);
    const auto it = nonces_.find(to_hex(address));
    return to_quantity(it == nonces_.end() ? 0 : it->second);
}

SealedBlock Node::seal_one() {
    std::lock_guard lk(mu_);
    SealedBlock block;
    block.number = blocks_.back().number + 1;
    block.timestamp = blocks_.back().timestamp + config_.block_interval.millis / 1000;
    block.parent_hash = blocks_.back().hash;

    const size_t take = std::min<size_t>(mempool_.size(), config_.max_tx_per_block);
    block.txs.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        block.txs.push_back(std::move(mempool_.front()));
        mempool_.pop_front();
    }
    for (const auto& tx : block.txs) {
        included_in_[tx.hash] = block.number;
        if (selector_matches(tx.data, set_item_selector()) && tx.data.size() == 4 + 64) {
            Word32 key, value;
            std::memcpy(key.data(), tx.data.data() + 4, 32);
            std::memcpy(value.data(), tx.data.data() + 36, 32);
            kv_[key] = value;
        }
    }
    block.hash = hash_block(block.number, block.timestamp, block.parent_hash, block.txs);
    blocks_.push_back(block);
    return block;
}

uint64_t Node::head_number() const {
    std::lock_guard lk(mu_);
    return blocks_.back().number;
}

size_t Node::mempool_size() const {
    std::lock_guard lk(mu_);
    return mempool_.size();
}

std::vector<SealedBlock> Node::blocks_snapshot() const {
    std::lock_guard lk(mu_);
    return blocks_;
}

std::vector<Arrival> Node::arrivals_snapshot() const {
    std::lock_guard lk(mu_);
    return arrivals_;
}

const SealedBlock* Node::block_at(uint64_t number) const {
    if (number >= blocks_.size()) return nullptr;
    return &blocks_[number];
}

std::string Node::dump_chain() const {
    std::lock_guard lk(mu_);

    // Empty blocks at either end only encode how long the sealer stayed up
    // around the submissions, not what was submitted; the dump trims them so
    // the result is a pure function of the accepted request sequence. Empty
    // blocks between transaction-bearing ones are kept.
    size_t end = blocks_.size();
    while (end > 1 && blocks_[end - 1].txs.empty()) --end;
    size_t begin = 1;
    while (begin < end && blocks_[begin].txs.empty()) ++begin;

    wire_json out;
    out["blocks"] = wire_json::array();
    for (size_t i = 0; i < end; ++i) {
        if (i > 0 && i < begin) continue;  // leading empties, genesis excepted
        const auto& block = blocks_[i];
        wire_json b;
        b["number"] = block.number;
        b["timestamp"] = block.timestamp;
        b["hash"] = to_hex(block.hash);
        b["parentHash"] = to_hex(block.parent_hash);
        b["transactions"] = wire_json::array();
        for (const auto& tx : block.txs) b["transactions"].push_back(to_hex(tx.hash));
        out["blocks"].push_back(std::move(b));
    }
    out["kv"] = wire_json::object();
    for (const auto& [key, value] : kv_) {
        out["kv"][to_hex(key)] = to_hex(value);
    }
    return out.dump();
}

Cluster::Cluster(ChainConfig config, Clock& clock, const std::string& host, int base_port)
    : clock_(clock) {
    const auto latency = config.rpc_latency.ns();
    const uint64_t endpoints = config.endpoints;
    node_ = std::make_unique<Node>(std::move(config), clock);

    for (uint64_t i = 0; i < endpoints; ++i) {
        auto server = std::make_unique<httplib::Server>();
        // Handler threads are pinned to keep-alive connections; the default
        // pool (8 on small machines) deadlocks once pooled client sockets
        // outnumber it, because a stalled requester never reaches the clock
        // sleep quorum. Size the pool past any plausible worker count.
        server->new_task_queue = [] { return new httplib::ThreadPool(64); };
        // The library drops keep-alive connections after 5 requests, which
        // forces pooled clients through a reconnect every few polls. Let
        // connections live until they go idle; the idle timeout stays short
        // because parked handlers only re-check the server stop flag after
        // it expires, so it bounds how long stop() can block.
        server->set_keep_alive_max_count(std::numeric_limits<size_t>::max());
        server->set_keep_alive_timeout(1);
        server->set_read_timeout(30, 0);
        server->set_write_timeout(30, 0);
        // Nagle holds the second write of a header+body pair until the peer
        // acks; with delayed acks that is a 40ms floor per RPC, far above
        // what a burst of thousands of submissions can absorb.
        server->set_tcp_nodelay(true);
        server->Post("/", [this, latency](const httplib::Request& req, httplib::Response& res) {
            // The sealer starts on first use so a virtual clock cannot tick
            // away blocks before any client shows up; t0 is then pinned by
            // whoever froze the clock for the first request.
            ensure_sealer();
            // Latency models transit time; it is real even under a virtual
            // clock so request handling never joins the sleep quorum.
            if (latency.count() > 0) std::this_thread::sleep_for(latency);
            res.set_content(node_->handle_rpc_text(req.body), "application/json");
        });

        int port;
        if (base_port == 0) {
            port = server->bind_to_any_port(host);
            if (port <= 0) throw std::runtime_error("failed to bind a port on " + host);
        } else {
            port = base_port + static_cast<int>(i);
            if (!server->bind_to_port(host, port)) {
                throw std::runtime_error("failed to bind " + host + ":" + std::to_string(port));
            }
        }
        urls_.push_back("http://" + host + ":" + std::to_string(port));
        listen_threads_.emplace_back([srv = server.get()] { srv->listen_after_bind(); });
        servers_.push_back(std::move(server));
    }
    for (auto& server : servers_) server->wait_until_ready();
}

void Cluster::ensure_sealer() {
    std::lock_guard lk(sealer_mu_);
    if (sealer_.joinable() || stopping_.load()) return;
    sealer_ = std::thread([this] {
        ClockParticipant guard(clock_);
        const auto interval = node_->config().block_interval.ns();
        const Clock::ns t0 = clock_.now();
        for (uint64_t k = 1; !stopping_.load(); ++k) {
            const Clock::ns deadline = t0 + Clock::ns{interval.count() * static_cast<int64_t>(k)};
            if (clock_.sleep_until(deadline, [this] { return stopping_.load(); })) break;
            node_->seal_one();
        }
    });
}

Cluster::~Cluster() { stop(); }

void Cluster::stop() {
    if (stopped_) return;
    stopped_ = true;
    stopping_.store(true);
    clock_.interrupt();
    for (auto& server : servers_) server->stop();
    for (auto& thread : listen_threads_) thread.join();
    std::lock_guard lk(sealer_mu_);
    if (sealer_.joinable()) sealer_.join();
}

}  // namespace hammer::sim
