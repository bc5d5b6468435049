#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hammer/duration.hpp"

namespace hammer {

struct NodeEndpoint {
    std::string url;
    std::string name;  // defaults to "node<i>" by position

    friend bool operator==(const NodeEndpoint&, const NodeEndpoint&) = default;
};

enum class WorkloadMode { transaction, read };

std::string to_string(WorkloadMode mode);

struct TestProfile {
    uint64_t transactions = 0;
    Duration timeout;  // quiet period after this profile finishes
    bool call_contract_method = false;
    WorkloadMode mode = WorkloadMode::transaction;
    uint64_t workers = 8;

    friend bool operator==(const TestProfile&, const TestProfile&) = default;
};

struct TestPlan {
    std::vector<NodeEndpoint> nodes;
    std::vector<TestProfile> profiles;
    std::vector<uint8_t> contract_address;  // 20 bytes when valid
    std::vector<uint8_t> sender_address;    // 20 bytes when valid
    Duration receipt_timeout = Duration::from_seconds(60);
    uint64_t seed = 0;

    friend bool operator==(const TestPlan&, const TestPlan&) = default;
};

/// One failed invariant, with a JSON-path-like locator such as
/// "profiles[0].transactions".
struct Violation {
    std::string path;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

class PlanError : public std::runtime_error {
public:
    PlanError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message),
          path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Parses and fully validates a config document (UTF-8 JSON). Unknown keys
/// are rejected; defaults are applied (workers=8, receiptTimeout="60s",
/// seed=0, mode="transaction", callContractMethod=false). Throws PlanError
/// with a locator on any failure.
TestPlan load_plan(const std::string& document);

/// Returns every invariant violation (empty means the plan is valid).
std::vector<Violation> validate_plan(const TestPlan& plan);

/// Canonical JSON rendering with all defaults materialized; feeding the
/// output back through load_plan yields an equal plan.
std::string plan_to_json(const TestPlan& plan);

}  // namespace hammer
