#include <doctest.h>

#include <string>

#include "hammer/plan.hpp"

using namespace hammer;

namespace {

const std::string kMinimal = R"({
  "nodes": ["http://127.0.0.1:8545"],
  "profiles": [{"transactions": 100, "timeout": "30s"}],
  "contractAddress": "0x1111111111111111111111111111111111111111",
  "senderAddress": "0x2222222222222222222222222222222222222222"
})";

const std::string kFull = R"({
  "nodes": ["http://a:1", "https://b:2/rpc"],
  "profiles": [
    {"transactions": 10, "timeout": "0s", "callContractMethod": true,
     "mode": "transaction", "workers": 2},
    {"transactions": 20, "timeout": "1m30s", "mode": "read"}
  ],
  "contractAddress": "0x1111111111111111111111111111111111111111",
  "senderAddress": "0x2222222222222222222222222222222222222222",
  "receiptTimeout": "90s",
  "seed": 42
})";

}  // namespace

TEST_CASE("minimal plan gets documented defaults") {
    const TestPlan plan = load_plan(kMinimal);
    REQUIRE(plan.nodes.size() == 1);
    CHECK(plan.nodes[0].url == "http://127.0.0.1:8545");
    CHECK(plan.nodes[0].name == "node0");
    REQUIRE(plan.profiles.size() == 1);
    CHECK(plan.profiles[0].transactions == 100);
    CHECK(plan.profiles[0].timeout == parse_duration("30s"));
    CHECK(plan.profiles[0].call_contract_method == false);
    CHECK(plan.profiles[0].mode == WorkloadMode::transaction);
    CHECK(plan.profiles[0].workers == 8);
    CHECK(plan.receipt_timeout == Duration::from_seconds(60));
    CHECK(plan.seed == 0);
    CHECK(plan.contract_address.size() == 20);
    CHECK(plan.contract_address[0] == 0x11);
    CHECK(plan.sender_address[19] == 0x22);
}

TEST_CASE("full plan parses every field") {
    const TestPlan plan = load_plan(kFull);
    REQUIRE(plan.nodes.size() == 2);
    CHECK(plan.nodes[1].name == "node1");
    CHECK(plan.nodes[1].url == "https://b:2/rpc");
    REQUIRE(plan.profiles.size() == 2);
    CHECK(plan.profiles[0].workers == 2);
    CHECK(plan.profiles[0].call_contract_method);
    CHECK(plan.profiles[1].mode == WorkloadMode::read);
    CHECK(plan.profiles[1].timeout == parse_duration("1m30s"));
    CHECK(plan.receipt_timeout == parse_duration("90s"));
    CHECK(plan.seed == 42);
}

TEST_CASE("unknown keys are rejected with a locator") {
    try {
        load_plan(R"({"nodes": ["http://a:1"], "profiles": [{"transactions": 1,
                   "timeout": "0s"}], "contractAddress":
                   "0x1111111111111111111111111111111111111111", "senderAddress":
                   "0x2222222222222222222222222222222222222222", "bogus": 1})");
        FAIL("expected PlanError");
    } catch (const PlanError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }

    try {
        load_plan(R"({"nodes": ["http://a:1"], "profiles": [
                   {"transactions": 1, "timeout": "0s"},
                   {"transactions": 1, "timeout": "0s", "tps": 5}],
                   "contractAddress": "0x1111111111111111111111111111111111111111",
                   "senderAddress": "0x2222222222222222222222222222222222222222"})");
        FAIL("expected PlanError");
    } catch (const PlanError& e) {
        CHECK(e.path() == "profiles[1].tps");
    }
}

TEST_CASE("malformed documents carry a usable path") {
    CHECK_THROWS_AS(load_plan("not json"), PlanError);
    CHECK_THROWS_AS(load_plan("[]"), PlanError);

    // Wrong type for nodes entries.
    try {
        load_plan(R"({"nodes": [17], "profiles": [{"transactions": 1, "timeout": "0s"}],
                   "contractAddress": "0x1111111111111111111111111111111111111111",
                   "senderAddress": "0x2222222222222222222222222222222222222222"})");
        FAIL("expected PlanError");
    } catch (const PlanError& e) {
        CHECK(e.path() == "nodes[0]");
    }

    // Bad duration inside a profile points at the field.
    try {
        load_plan(R"({"nodes": ["http://a:1"],
                   "profiles": [{"transactions": 1, "timeout": "5x"}],
                   "contractAddress": "0x1111111111111111111111111111111111111111",
                   "senderAddress": "0x2222222222222222222222222222222222222222"})");
        FAIL("expected PlanError");
    } catch (const PlanError& e) {
        CHECK(e.path() == "profiles[0].timeout");
        CHECK(std::string(e.what()).find("unknown unit") != std::string::npos);
    }
}

TEST_CASE("validation reports every violation") {
    TestPlan plan = load_plan(kMinimal);
    CHECK(validate_plan(plan).empty());

    plan.profiles[0].transactions = 0;
    plan.profiles[0].workers = 0;
    plan.contract_address.resize(19);
    const auto violations = validate_plan(plan);
    REQUIRE(violations.size() == 3);

    bool saw_tx = false, saw_workers = false, saw_addr = false;
    for (const auto& v : violations) {
        if (v.path == "profiles[0].transactions") saw_tx = true;
        if (v.path == "profiles[0].workers") saw_workers = true;
        if (v.path == "contractAddress") saw_addr = true;
    }
    CHECK(saw_tx);
    CHECK(saw_workers);
    CHECK(saw_addr);
}

TEST_CASE("validation catches bad urls and empty lists") {
    TestPlan plan = load_plan(kMinimal);
    plan.nodes[0].url = "ftp://nope";
    auto violations = validate_plan(plan);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].path == "nodes[0]");

    plan.nodes.clear();
    violations = validate_plan(plan);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].path == "nodes");

    plan = load_plan(kMinimal);
    plan.profiles.clear();
    violations = validate_plan(plan);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].path == "profiles");
}

TEST_CASE("load_plan rejects invariant violations too") {
    // transactions = 0 fails at load time, not just via validate_plan.
    CHECK_THROWS_AS(
        load_plan(R"({"nodes": ["http://a:1"],
                   "profiles": [{"transactions": 0, "timeout": "0s"}],
                   "contractAddress": "0x1111111111111111111111111111111111111111",
                   "senderAddress": "0x2222222222222222222222222222222222222222"})"),
        PlanError);
    CHECK_THROWS_AS(
        load_plan(R"({"nodes": [], "profiles": [{"transactions": 1, "timeout": "0s"}],
                   "contractAddress": "0x1111111111111111111111111111111111111111",
                   "senderAddress": "0x2222222222222222222222222222222222222222"})"),
        PlanError);
}

TEST_CASE("plan_to_json round-trips and is canonical") {
    const TestPlan once = load_plan(kFull);
    const std::string rendered = plan_to_json(once);
    const TestPlan twice = load_plan(rendered);
    CHECK(once == twice);
    CHECK(plan_to_json(twice) == rendered);

    // Defaults are materialized in the output.
    const std::string minimal = plan_to_json(load_plan(kMinimal));
    CHECK(minimal.find("\"workers\": 8") != std::string::npos);
    CHECK(minimal.find("\"receiptTimeout\": \"1m\"") != std::string::npos);
    CHECK(minimal.find("\"seed\": 0") != std::string::npos);
}
