#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hammer/hex.hpp"

namespace hammer {

using wire_json = nlohmann::ordered_json;

/// One eth_sendTransaction / eth_call payload.
struct TxCall {
    Address from{};
    Address to{};
    uint64_t value_wei = 0;
    std::vector<uint8_t> data;
    std::optional<uint64_t> nonce;
};

struct Block {
    uint64_t number = 0;
    uint64_t timestamp = 0;  // whole seconds
    Hash32 hash{};
    Hash32 parent_hash{};
    std::vector<Hash32> tx_hashes;

    uint64_t parent_number() const { return number == 0 ? 0 : number - 1; }
};

enum class ReceiptStatus { success, reverted };

struct Receipt {
    Hash32 tx_hash{};
    uint64_t block_number = 0;
    ReceiptStatus status = ReceiptStatus::success;
};

class RpcDecodeError : public std::runtime_error {
public:
    explicit RpcDecodeError(const std::string& what) : std::runtime_error(what) {}
};

// JSON-RPC 2.0 framing: {"jsonrpc":"2.0","id":<int>,"method":...,"params":[...]}
wire_json make_request(int64_t id, const std::string& method, wire_json params);

/// Extracts "result" from a response; throws RpcDecodeError on malformed
/// envelopes. A remote {"error":{...}} object is reported through `error_code`
/// and `error_message` with an empty return.
struct RpcResponse {
    wire_json result;  // null when the call errored
    bool has_error = false;
    int64_t error_code = 0;
    std::string error_message;
};
RpcResponse parse_response(const wire_json& body, int64_t expect_id);

wire_json tx_call_to_json(const TxCall& call);
TxCall tx_call_from_json(const wire_json& obj);

wire_json block_to_json(const Block& block);
Block block_from_json(const wire_json& obj);

wire_json receipt_to_json(const Receipt& receipt);
Receipt receipt_from_json(const wire_json& obj);

}  // namespace hammer
