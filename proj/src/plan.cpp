#include "hammer/plan.hpp"

#include <json.hpp>

#include "hammer/hex.hpp"

namespace hammer {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw PlanError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

Duration parse_duration_field(const json& value, const std::string& path) {
    if (!value.is_string()) throw PlanError(path, "expected a duration string");
    try {
        return parse_duration(value.get<std::string>());
    } catch (const DurationParseError& e) {
        throw PlanError(path, e.what());
    }
}

uint64_t parse_count_field(const json& value, const std::string& path) {
    if (!value.is_number_unsigned()) throw PlanError(path, "expected a non-negative integer");
    return value.get<uint64_t>();
}

std::vector<uint8_t> parse_address_field(const json& value, const std::string& path) {
    if (!value.is_string()) throw PlanError(path, "expected a hex address string");
    try {
        return from_hex(value.get<std::string>());
    } catch (const HexError& e) {
        throw PlanError(path, e.what());
    }
}

TestProfile parse_profile(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw PlanError(path, "expected a profile object");
    reject_unknown_keys(obj, {"transactions", "timeout", "callContractMethod", "mode", "workers"},
                        path);
    TestProfile profile;
    if (!obj.contains("transactions")) throw PlanError(path + ".transactions", "missing");
    profile.transactions = parse_count_field(obj["transactions"], path + ".transactions");
    if (obj.contains("timeout")) {
        profile.timeout = parse_duration_field(obj["timeout"], path + ".timeout");
    }
    if (obj.contains("callContractMethod")) {
        const auto& v = obj["callContractMethod"];
        if (!v.is_boolean()) throw PlanError(path + ".callContractMethod", "expected a boolean");
        profile.call_contract_method = v.get<bool>();
    }
    if (obj.contains("mode")) {
        const auto& v = obj["mode"];
        if (!v.is_string()) throw PlanError(path + ".mode", "expected \"transaction\" or \"read\"");
        const auto s = v.get<std::string>();
        if (s == "transaction") {
            profile.mode = WorkloadMode::transaction;
        } else if (s == "read") {
            profile.mode = WorkloadMode::read;
        } else {
            throw PlanError(path + ".mode", "expected \"transaction\" or \"read\", got \"" + s + "\"");
        }
    }
    if (obj.contains("workers")) {
        profile.workers = parse_count_field(obj["workers"], path + ".workers");
    }
    return profile;
}

bool url_is_valid(const std::string& url) {
    std::string_view rest(url);
    if (rest.starts_with("http://")) {
        rest.remove_prefix(7);
    } else if (rest.starts_with("https://")) {
        rest.remove_prefix(8);
    } else {
        return false;
    }
    const auto host_end = rest.find_first_of(":/");
    return host_end != 0 && !rest.empty();
}

}  // namespace

std::string to_string(WorkloadMode mode) {
    return mode == WorkloadMode::transaction ? "transaction" : "read";
}

TestPlan load_plan(const std::string& document) {
    json root;
    try {
        root = json::parse(document);
    } catch (const json::parse_error& e) {
        throw PlanError("", std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw PlanError("", "top-level value must be an object");
    reject_unknown_keys(
        root, {"nodes", "profiles", "contractAddress", "senderAddress", "receiptTimeout", "seed"},
        "");

    TestPlan plan;
    if (!root.contains("nodes")) throw PlanError("nodes", "missing");
    if (!root["nodes"].is_array()) throw PlanError("nodes", "expected an array of URLs");
    size_t i = 0;
    for (const auto& entry : root["nodes"]) {
        const std::string path = "nodes[" + std::to_string(i) + "]";
        if (!entry.is_string()) throw PlanError(path, "expected a URL string");
        plan.nodes.push_back(NodeEndpoint{entry.get<std::string>(), "node" + std::to_string(i)});
        ++i;
    }

    if (!root.contains("profiles")) throw PlanError("profiles", "missing");
    if (!root["profiles"].is_array()) throw PlanError("profiles", "expected an array of profiles");
    i = 0;
    for (const auto& entry : root["profiles"]) {
        plan.profiles.push_back(parse_profile(entry, "profiles[" + std::to_string(i) + "]"));
        ++i;
    }

    if (!root.contains("contractAddress")) throw PlanError("contractAddress", "missing");
    plan.contract_address = parse_address_field(root["contractAddress"], "contractAddress");
    if (!root.contains("senderAddress")) throw PlanError("senderAddress", "missing");
    plan.sender_address = parse_address_field(root["senderAddress"], "senderAddress");

    if (root.contains("receiptTimeout")) {
        plan.receipt_timeout = parse_duration_field(root["receiptTimeout"], "receiptTimeout");
    }
    if (root.contains("seed")) {
        plan.seed = parse_count_field(root["seed"], "seed");
    }

    const auto violations = validate_plan(plan);
    if (!violations.empty()) {
        throw PlanError(violations.front().path, violations.front().message);
    }
    return plan;
}

std::vector<Violation> validate_plan(const TestPlan& plan) {
    std::vector<Violation> out;
    if (plan.nodes.empty()) out.push_back({"nodes", "at least one node is required"});
    for (size_t i = 0; i < plan.nodes.size(); ++i) {
        if (!url_is_valid(plan.nodes[i].url)) {
            out.push_back({"nodes[" + std::to_string(i) + "]",
                           "not a valid http(s) URL: \"" + plan.nodes[i].url + "\""});
        }
    }
    if (plan.profiles.empty()) out.push_back({"profiles", "at least one profile is required"});
    for (size_t i = 0; i < plan.profiles.size(); ++i) {
        const std::string path = "profiles[" + std::to_string(i) + "]";
        if (plan.profiles[i].transactions < 1) {
            out.push_back({path + ".transactions", "must be >= 1"});
        }
        if (plan.profiles[i].workers < 1) {
            out.push_back({path + ".workers", "must be >= 1"});
        }
    }
    if (plan.contract_address.size() != 20) {
        out.push_back({"contractAddress", "must decode to 20 bytes, got " +
                                              std::to_string(plan.contract_address.size())});
    }
    if (plan.sender_address.size() != 20) {
        out.push_back({"senderAddress", "must decode to 20 bytes, got " +
                                            std::to_string(plan.sender_address.size())});
    }
    return out;
}

std::string plan_to_json(const TestPlan& plan) {
    json root;
    root["nodes"] = json::array();
    for (const auto& node : plan.nodes) root["nodes"].push_back(node.url);
    root["contractAddress"] = to_hex(plan.contract_address);
    root["senderAddress"] = to_hex(plan.sender_address);
    root["receiptTimeout"] = format_duration(plan.receipt_timeout);
    root["seed"] = plan.seed;
    root["profiles"] = json::array();
    for (const auto& profile : plan.profiles) {
        json p;
        p["transactions"] = profile.transactions;
        p["timeout"] = format_duration(profile.timeout);
        p["callContractMethod"] = profile.call_contract_method;
        p["mode"] = to_string(profile.mode);
        p["workers"] = profile.workers;
        root["profiles"].push_back(p);
    }
    return root.dump(2);
}

}  // namespace hammer
