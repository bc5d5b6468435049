#include "hammer/rpc_codec.hpp"

namespace hammer {

namespace {

std::string require_string(const wire_json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw RpcDecodeError(std::string("missing or non-string field \"") + key + "\"");
    }
    return obj[key].get<std::string>();
}

uint64_t require_quantity(const wire_json& obj, const char* key) {
    try {
        return from_quantity(require_string(obj, key));
    } catch (const HexError& e) {
        throw RpcDecodeError(std::string("field \"") + key + "\": " + e.what());
    }
}

}  // namespace

wire_json make_request(int64_t id, const std::string& method, wire_json params) {
    wire_json req;
    req["jsonrpc"] = "2.0";
    req["id"] = id;
    req["method"] = method;
    req["params"] = std::move(params);
    return req;
}

RpcResponse parse_response(const wire_json& body, int64_t expect_id) {
    if (!body.is_object()) throw RpcDecodeError("response is not a JSON object");
    if (!body.contains("jsonrpc") || body["jsonrpc"] != "2.0") {
        throw RpcDecodeError("response missing jsonrpc version");
    }
    if (!body.contains("id") || !body["id"].is_number_integer() ||
        body["id"].get<int64_t>() != expect_id) {
        throw RpcDecodeError("response id does not match request");
    }
    RpcResponse out;
    if (body.contains("error")) {
        const auto& err = body["error"];
        if (!err.is_object() || !err.contains("code") || !err.contains("message")) {
            throw RpcDecodeError("malformed error object");
        }
        out.has_error = true;
        out.error_code = err["code"].get<int64_t>();
        out.error_message = err["message"].get<std::string>();
        return out;
    }
    if (!body.contains("result")) throw RpcDecodeError("response has neither result nor error");
    out.result = body["result"];
    return out;
}

wire_json tx_call_to_json(const TxCall& call) {
    wire_json obj;
    obj["from"] = to_hex(call.from);
    obj["to"] = to_hex(call.to);
    obj["value"] = to_quantity(call.value_wei);
    obj["data"] = to_hex(call.data);
    if (call.nonce) obj["nonce"] = to_quantity(*call.nonce);
    return obj;
}

TxCall tx_call_from_json(const wire_json& obj) {
    if (!obj.is_object()) throw RpcDecodeError("transaction must be an object");
    TxCall call;
    try {
        call.from = parse_address(require_string(obj, "from"));
        call.to = parse_address(require_string(obj, "to"));
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
    if (obj.contains("value")) call.value_wei = require_quantity(obj, "value");
    if (obj.contains("data")) {
        try {
            call.data = from_hex(obj["data"].get<std::string>());
        } catch (const HexError& e) {
            throw RpcDecodeError(std::string("field \"data\": ") + e.what());
        }
    }
    if (obj.contains("nonce")) call.nonce = require_quantity(obj, "nonce");
    return call;
}

wire_json block_to_json(const Block& block) {
    wire_json obj;
    obj["number"] = to_quantity(block.number);
    obj["hash"] = to_hex(block.hash);
    obj["parentHash"] = to_hex(block.parent_hash);
    obj["timestamp"] = to_quantity(block.timestamp);
    obj["transactions"] = wire_json::array();
    for (const auto& h : block.tx_hashes) obj["transactions"].push_back(to_hex(h));
    return obj;
}

Block block_from_json(const wire_json& obj) {
    if (!obj.is_object()) throw RpcDecodeError("block must be an object");
    Block block;
    block.number = require_quantity(obj, "number");
    block.timestamp = require_quantity(obj, "timestamp");
    try {
        block.hash = parse_hash32(require_string(obj, "hash"));
        block.parent_hash = parse_hash32(require_string(obj, "parentHash"));
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
    if (!obj.contains("transactions") || !obj["transactions"].is_array()) {
        throw RpcDecodeError("block missing transactions array");
    }
    for (const auto& entry : obj["transactions"]) {
        try {
            if (entry.is_string()) {
                block.tx_hashes.push_back(parse_hash32(entry.get<std::string>()));
            } else if (entry.is_object()) {
                block.tx_hashes.push_back(parse_hash32(require_string(entry, "hash")));
            } else {
                throw RpcDecodeError("transaction entry must be a hash or an object");
            }
        } catch (const HexError& e) {
            throw RpcDecodeError(e.what());
        }
    }
    return block;
}

wire_json receipt_to_json(const Receipt& receipt) {
    wire_json obj;
    obj["transactionHash"] = to_hex(receipt.tx_hash);
    obj["blockNumber"] = to_quantity(receipt.block_number);
    obj["status"] = receipt.status == ReceiptStatus::success ? "0x1" : "0x0";
    return obj;
}

Receipt receipt_from_json(const wire_json& obj) {
    if (!obj.is_object()) throw RpcDecodeError("receipt must be an object");
    Receipt receipt;
    try {
        receipt.tx_hash = parse_hash32(require_string(obj, "transactionHash"));
    } catch (const HexError& e) {
        throw RpcDecodeError(e.what());
    }
    receipt.block_number = require_quantity(obj, "blockNumber");
    const auto status = require_quantity(obj, "status");
    receipt.status = status == 1 ? ReceiptStatus::success : ReceiptStatus::reverted;
    return receipt;
}

}  // namespace hammer
