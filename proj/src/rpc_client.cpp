#include "hammer/rpc_client.hpp"

#include <httplib.h>

namespace hammer {

JsonRpcClient::JsonRpcClient(std::string url) : url_(std::move(url)) {}

JsonRpcClient::~JsonRpcClient() = default;

std::unique_ptr<httplib::Client> JsonRpcClient::acquire() const {
    {
        std::lock_guard lk(pool_mu_);
        if (!pool_.empty()) {
            auto client = std::move(pool_.back());
            pool_.pop_back();
            return client;
        }
    }
    auto client = std::make_unique<httplib::Client>(url_);
    client->set_connection_timeout(5, 0);
    client->set_read_timeout(30, 0);
    client->set_write_timeout(30, 0);
    client->set_keep_alive(true);
    // Headers and body go out as separate writes; without this, Nagle delays
    // the body until the server acks the headers, gating every call on the
    // peer's delayed-ack timer.
    client->set_tcp_nodelay(true);
    return client;
}

void JsonRpcClient::release(std::unique_ptr<httplib::Client> client) const {
    std::lock_guard lk(pool_mu_);
    pool_.push_back(std::move(client));
}

wire_json JsonRpcClient::call(const std::string& method, wire_json params) const {
    const int64_t id = next_id_.fetch_add(1, std::memory_order_relaxed);
    const std::string body = make_request(id, method, std::move(params)).dump();

    auto client = acquire();
    auto res = client->Post("/", body, "application/json");
    if (!res) {
        // Connection is stale or the endpoint is down; do not pool it again.
        throw RpcTransportError("POST " + url_ + " failed: " + httplib::to_string(res.error()));
    }
    release(std::move(client));

    if (res->status != 200) {
        throw RpcTransportError("POST " + url_ + " returned HTTP " + std::to_string(res->status));
    }
    wire_json parsed;
    try {
        parsed = wire_json::parse(res->body);
    } catch (const wire_json::parse_error& e) {
        throw RpcDecodeError(std::string("response is not valid JSON: ") + e.what());
    }
    const RpcResponse response = parse_response(parsed, id);
    if (response.has_error) {
        throw RpcRemoteError(response.error_code, response.error_message);
    }
    return response.result;
}

Hash32 submit_transaction(const JsonRpcClient& client, const TxCall& call) {
    const auto result = client.call("eth_sendTransaction", wire_json::array({tx_call_to_json(call)}));
    if (!result.is_string()) throw RpcDecodeError("eth_sendTransaction result is not a hash string");
    try {
        return parse_hash32(result.get<std::string>());
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
}

namespace {

std::optional<Block> fetch_block_by_param(const JsonRpcClient& client, const wire_json& which) {
    const auto result = client.call("eth_getBlockByNumber", wire_json::array({which, false}));
    if (result.is_null()) return std::nullopt;
    return block_from_json(result);
}

}  // namespace

std::optional<Block> fetch_block(const JsonRpcClient& client, uint64_t number) {
    return fetch_block_by_param(client, wire_json(to_quantity(number)));
}

std::optional<Block> fetch_latest_block(const JsonRpcClient& client) {
    return fetch_block_by_param(client, wire_json("latest"));
}

std::optional<Receipt> fetch_receipt(const JsonRpcClient& client, const Hash32& tx_hash) {
    const auto result =
        client.call("eth_getTransactionReceipt", wire_json::array({to_hex(tx_hash)}));
    if (result.is_null()) return std::nullopt;
    return receipt_from_json(result);
}

std::vector<uint8_t> call_read(const JsonRpcClient& client, const TxCall& call) {
    const auto result =
        client.call("eth_call", wire_json::array({tx_call_to_json(call), "latest"}));
    if (!result.is_string()) throw RpcDecodeError("eth_call result is not a hex string");
    try {
        return from_hex(result.get<std::string>());
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
}

uint64_t fetch_block_number(const JsonRpcClient& client) {
    const auto result = client.call("eth_blockNumber", wire_json::array());
    if (!result.is_string()) throw RpcDecodeError("eth_blockNumber result is not a quantity");
    try {
        return from_quantity(result.get<std::string>());
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
}

uint64_t fetch_transaction_count(const JsonRpcClient& client, const Address& address,
                                 const std::string& tag) {
    const auto result =
        client.call("eth_getTransactionCount", wire_json::array({to_hex(address), tag}));
    if (!result.is_string()) throw RpcDecodeError("eth_getTransactionCount result is not a quantity");
    try {
        return from_quantity(result.get<std::string>());
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
}

}  // namespace hammer
