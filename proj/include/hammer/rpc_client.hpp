#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hammer/rpc_codec.hpp"

namespace httplib {
class Client;
}

namespace hammer {

/// Transport-level failure: unreachable endpoint, timeout, non-200 status.
class RpcTransportError : public std::runtime_error {
public:
    explicit RpcTransportError(const std::string& what) : std::runtime_error(what) {}
};

/// Error object returned by the node; code and message surfaced verbatim.
class RpcRemoteError : public std::runtime_error {
public:
    RpcRemoteError(int64_t code, const std::string& message)
        : std::runtime_error("RPC error " + std::to_string(code) + ": " + message), code_(code) {}

    int64_t code() const { return code_; }

private:
    int64_t code_;
};

/// JSON-RPC 2.0 client over HTTP POST. Immutable after construction and safe
/// for concurrent use: each call borrows a pooled keep-alive connection.
class JsonRpcClient {
public:
    explicit JsonRpcClient(std::string url);
    ~JsonRpcClient();

    JsonRpcClient(const JsonRpcClient&) = delete;
    JsonRpcClient& operator=(const JsonRpcClient&) = delete;

    const std::string& url() const { return url_; }

    /// Sends one request; throws RpcTransportError / RpcRemoteError /
    /// RpcDecodeError. Returns the result value (possibly null).
    wire_json call(const std::string& method, wire_json params) const;

private:
    std::unique_ptr<httplib::Client> acquire() const;
    void release(std::unique_ptr<httplib::Client> client) const;

    std::string url_;
    mutable std::atomic<int64_t> next_id_{1};
    mutable std::mutex pool_mu_;
    mutable std::vector<std::unique_ptr<httplib::Client>> pool_;
};

// Ethereum method subset.

/// eth_sendTransaction; returns the node-assigned transaction hash.
Hash32 submit_transaction(const JsonRpcClient& client, const TxCall& call);

/// eth_getBlockByNumber; nullopt when the height does not exist yet.
std::optional<Block> fetch_block(const JsonRpcClient& client, uint64_t number);
std::optional<Block> fetch_latest_block(const JsonRpcClient& client);

/// eth_getTransactionReceipt; nullopt until the tx is in a sealed block.
std::optional<Receipt> fetch_receipt(const JsonRpcClient& client, const Hash32& tx_hash);

/// eth_call with "latest"; returns the raw return data.
std::vector<uint8_t> call_read(const JsonRpcClient& client, const TxCall& call);

/// eth_blockNumber.
uint64_t fetch_block_number(const JsonRpcClient& client);

/// eth_getTransactionCount with the given tag ("pending" or "latest").
uint64_t fetch_transaction_count(const JsonRpcClient& client, const Address& address,
                                 const std::string& tag = "pending");

}  // namespace hammer
