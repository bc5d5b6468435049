#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "hammer/abi.hpp"
#include "hammer/clock.hpp"
#include "hammer/hex.hpp"
#include "hammer/loadgen.hpp"
#include "hammer/plan.hpp"
#include "hammer/simnode.hpp"
#include "hammer/workload.hpp"

using namespace hammer;

namespace {

std::vector<uint8_t> addr_bytes(uint8_t fill) { return std::vector<uint8_t>(20, fill); }

Address addr_of(uint8_t fill) {
    Address a{};
    a.fill(fill);
    return a;
}

TestPlan plan_for(const std::vector<std::string>& urls) {
    TestPlan plan;
    for (size_t i = 0; i < urls.size(); ++i) {
        plan.nodes.push_back({urls[i], "node" + std::to_string(i)});
    }
    plan.contract_address = addr_bytes(0xcc);
    plan.sender_address = addr_bytes(0xaa);
    return plan;
}

/// Clients plus the context plumbing run_profile expects.
struct Harness {
    std::vector<std::unique_ptr<JsonRpcClient>> owned;
    NonceCounter nonces{0};
    PlanContext ctx;

    Harness(const TestPlan& plan, Clock& clock, uint64_t initial_nonce = 0)
        : nonces(initial_nonce) {
        for (const auto& node : plan.nodes) {
            owned.push_back(std::make_unique<JsonRpcClient>(node.url));
            ctx.clients.push_back(owned.back().get());
        }
        ctx.plan = &plan;
        ctx.clock = &clock;
        ctx.nonces = &nonces;
    }
};

}  // namespace

TEST_CASE("assign_node cycles through the nodes") {
    CHECK(assign_node(0, 3) == 0);
    CHECK(assign_node(1, 3) == 1);
    CHECK(assign_node(2, 3) == 2);
    CHECK(assign_node(3, 3) == 0);
    CHECK(assign_node(7, 3) == 1);
    for (uint64_t i = 0; i < 20; ++i) CHECK(assign_node(i, 1) == 0);
    CHECK_THROWS_AS(assign_node(0, 0), std::invalid_argument);
}

TEST_CASE("round-robin keeps per-node counts within one of each other") {
    const uint64_t n = 100, k = 7;
    std::vector<uint64_t> counts(k, 0);
    for (uint64_t i = 0; i < n; ++i) ++counts[assign_node(i, k)];
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
    CHECK(std::accumulate(counts.begin(), counts.end(), uint64_t{0}) == n);
}

TEST_CASE("nonce counter hands out each value exactly once across threads") {
    NonceCounter counter(100);
    CHECK(counter.initial() == 100);

    std::vector<std::thread> threads;
    std::vector<std::vector<uint64_t>> taken(8);
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 250; ++i) taken[t].push_back(counter.next());
        });
    }
    for (auto& t : threads) t.join();

    std::vector<uint64_t> all;
    for (const auto& v : taken) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    REQUIRE(all.size() == 2000);
    for (size_t i = 0; i < all.size(); ++i) CHECK(all[i] == 100 + i);
    CHECK(counter.issued() == 2000);
}

TEST_CASE("workload values replay the seeded generator by index") {
    const uint64_t seed = 424242;
    SplitMix64 rng(seed);
    for (uint64_t seq = 0; seq < 200; ++seq) {
        CHECK(workload_value(seed, seq) == rng.next());
    }
    CHECK(workload_value(1, 0) != workload_value(2, 0));
}

TEST_CASE("initial nonce comes from the pending transaction count") {
    sim::ChainConfig config;
    config.block_interval = Duration::from_seconds(3600);
    RealClock clock;
    sim::Cluster cluster(config, clock);
    const JsonRpcClient client(cluster.endpoint_urls().front());
    const Address sender = addr_of(0xaa);

    CHECK(fetch_initial_nonce(client, sender) == 0);

    for (int i = 0; i < 2; ++i) {
        TxCall call;
        call.from = sender;
        call.to = addr_of(0xbb);
        call.value_wei = 1;
        submit_transaction(client, call);
    }
    CHECK(fetch_initial_nonce(client, sender) == 2);
    cluster.stop();

    const JsonRpcClient dead("http://127.0.0.1:1");
    CHECK_THROWS_AS(fetch_initial_nonce(dead, sender), RpcTransportError);
}

TEST_CASE("write profile drives transfers to inclusion") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    config.endpoints = 2;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());
    Harness h(plan, clock);

    TestProfile profile;
    profile.transactions = 40;
    profile.workers = 4;

    clock.freeze();
    const ProfileResult result = run_profile(profile, h.ctx);
    clock.unfreeze();
    cluster.stop();

    CHECK(result.produced == 40);
    CHECK(result.included == 40);
    CHECK(result.failed_timeout == 0);
    CHECK(result.rejected == 0);
    CHECK(result.included + result.failed_timeout + result.rejected == result.produced);
    CHECK(result.node_submitted == std::vector<uint64_t>{20, 20});
    CHECK(h.nonces.issued() == 40);
    CHECK(result.wall_time.millis >= 1000);
    CHECK(result.wall_time.millis <= 1500);

    for (size_t i = 0; i < result.records.size(); ++i) {
        const TxRecord& rec = result.records[i];
        CHECK(rec.seq == i);
        CHECK(rec.profile_index == 0);
        CHECK(rec.node_index == i % 2);
        CHECK(rec.status == TxStatus::included);
        CHECK(rec.tx_hash.has_value());
        REQUIRE(rec.inclusion_block.has_value());
        CHECK(*rec.inclusion_block == 1);  // one seal carries the whole burst
        REQUIRE(rec.inclusion_ns.has_value());
        CHECK(rec.submit_ns == 0);  // submitted while time was pinned
        CHECK(*rec.inclusion_ns >= rec.submit_ns);
    }
}

TEST_CASE("contract profile stores the seeded value under each sequence key") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());
    plan.seed = 99;
    Harness h(plan, clock);

    TestProfile profile;
    profile.transactions = 5;
    profile.workers = 2;
    profile.call_contract_method = true;

    clock.freeze();
    const ProfileResult result = run_profile(profile, h.ctx);
    CHECK(result.included == 5);

    for (uint64_t key = 0; key < 5; ++key) {
        TxCall call;
        call.from = addr_of(0xaa);
        call.to = addr_of(0xcc);
        call.data = encode_call(get_item_selector(), {key});
        const auto got = call_read(*h.ctx.clients[0], call);
        const Word32 expect = word_from_u64(workload_value(99, key));
        CHECK(got == std::vector<uint8_t>(expect.begin(), expect.end()));
    }
    clock.unfreeze();
    cluster.stop();
}

TEST_CASE("profile aborts when every node is unreachable") {
    TestPlan plan = plan_for({"http://127.0.0.1:1", "http://127.0.0.1:2"});
    RealClock clock;
    Harness h(plan, clock);

    TestProfile profile;
    profile.transactions = 3;

    try {
        run_profile(profile, h.ctx);
        FAIL("expected ProfileAbortError");
    } catch (const ProfileAbortError& e) {
        const std::string what = e.what();
        CHECK(what.find("profile 0") != std::string::npos);
        CHECK(what.find("all nodes unreachable") != std::string::npos);
        CHECK(what.find("http://127.0.0.1:1") != std::string::npos);
    }
}

TEST_CASE("dropped submissions time out instead of hanging") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    config.drop_probability = 1.0;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());
    plan.receipt_timeout = Duration::from_seconds(2);
    Harness h(plan, clock);

    TestProfile profile;
    profile.transactions = 6;
    profile.workers = 2;

    clock.freeze();
    const ProfileResult result = run_profile(profile, h.ctx);
    clock.unfreeze();
    cluster.stop();

    CHECK(result.produced == 6);
    CHECK(result.included == 0);
    CHECK(result.failed_timeout == 6);
    CHECK(result.rejected == 0);
    CHECK(result.wall_time.millis == 2000);  // exactly the receipt timeout
    for (const auto& rec : result.records) {
        CHECK(rec.status == TxStatus::failed_timeout);
        CHECK(rec.tx_hash.has_value());  // the node accepted it, then lost it
        CHECK_FALSE(rec.inclusion_block.has_value());
        CHECK_FALSE(rec.inclusion_ns.has_value());
    }
}

TEST_CASE("rejected submissions are terminal immediately") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    config.reject_probability = 1.0;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());
    Harness h(plan, clock);

    TestProfile profile;
    profile.transactions = 6;
    profile.workers = 3;

    clock.freeze();
    const ProfileResult result = run_profile(profile, h.ctx);
    clock.unfreeze();
    cluster.stop();

    CHECK(result.rejected == 6);
    CHECK(result.included == 0);
    CHECK(result.failed_timeout == 0);
    CHECK(result.wall_time.millis == 0);
    for (const auto& rec : result.records) {
        CHECK(rec.status == TxStatus::rejected);
        CHECK_FALSE(rec.tx_hash.has_value());
    }
}

TEST_CASE("read profile measures call round trips") {
    sim::ChainConfig config;
    config.block_interval = Duration::from_seconds(3600);
    RealClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());
    Harness h(plan, clock);

    TestProfile profile;
    profile.transactions = 5;
    profile.workers = 2;
    profile.mode = WorkloadMode::read;

    const ProfileResult result = run_profile(profile, h.ctx);
    cluster.stop();

    CHECK(result.produced == 5);
    CHECK(result.included == 5);  // unknown keys read as zero, still a success
    for (const auto& rec : result.records) {
        CHECK(rec.status == TxStatus::included);
        CHECK_FALSE(rec.tx_hash.has_value());
        CHECK_FALSE(rec.inclusion_block.has_value());
        REQUIRE(rec.latency_ns().has_value());
        CHECK(*rec.latency_ns() >= 0);
    }
    CHECK(h.nonces.issued() == 0);  // reads spend no nonces
}

TEST_CASE("run_plan executes profiles in order with quiet gaps") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    config.endpoints = 2;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());
    plan.seed = 7;
    plan.receipt_timeout = Duration::from_seconds(30);

    TestProfile writes;
    writes.transactions = 30;
    writes.workers = 4;
    writes.call_contract_method = true;
    writes.timeout = Duration::from_seconds(5);
    plan.profiles.push_back(writes);

    TestProfile reads;
    reads.transactions = 20;
    reads.workers = 3;
    reads.mode = WorkloadMode::read;
    plan.profiles.push_back(reads);

    const RunResult run = run_plan(plan, clock);
    cluster.stop();

    CHECK_FALSE(run.aborted);
    REQUIRE(run.profiles.size() == 2);
    CHECK(run.profiles[0].produced == 30);
    CHECK(run.profiles[0].included == 30);
    CHECK(run.profiles[1].produced == 20);
    CHECK(run.profiles[1].included == 20);
    CHECK(run.profiles[0].node_submitted == std::vector<uint64_t>{15, 15});

    // Global sequence numbers continue across profiles.
    for (size_t i = 0; i < 20; ++i) CHECK(run.profiles[1].records[i].seq == 30 + i);

    // The write burst lands at the pinned start instant; the reads happen
    // after the full 5 s quiet period.
    for (const auto& rec : run.profiles[0].records) CHECK(rec.submit_ns == 0);
    for (const auto& rec : run.profiles[1].records) {
        CHECK(rec.submit_ns >= 5'000'000'000);
    }

    // Every included transaction shows up in exactly one observed block.
    uint64_t sampled_tx = 0;
    for (const auto& s : run.tps_samples) sampled_tx += s.tx_count;
    CHECK(sampled_tx == 30);

    REQUIRE(run.summary.profiles.size() == 2);
    REQUIRE(run.summary.profiles[0].tps.has_value());
    CHECK(*run.summary.profiles[0].tps == doctest::Approx(30.0));
    CHECK_FALSE(run.summary.profiles[1].tps.has_value());
    REQUIRE(run.summary.tps_overall.has_value());
    CHECK(*run.summary.tps_overall == doctest::Approx(30.0));

    CHECK(run.summary.latency.count == 30);
    REQUIRE(run.summary.read_latency.has_value());
    CHECK(run.summary.read_latency->count == 20);

    CHECK(run.summary.total_execution.millis >= 5000);
    CHECK(run.summary.total_execution.millis <= 10000);
    CHECK(run.summary.resources.size() >= 4);  // one per virtual second
}

TEST_CASE("run_plan keeps completed profiles when a later one aborts") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);

    TestPlan plan = plan_for(cluster.endpoint_urls());

    TestProfile first;
    first.transactions = 5;
    first.workers = 2;
    first.timeout = Duration::from_seconds(10);
    plan.profiles.push_back(first);
    plan.profiles.push_back(first);  // never reaches the probe alive

    // Kill the cluster partway through the quiet period.
    std::thread killer([&] {
        ClockParticipant guard(clock);
        clock.sleep_until(Clock::ns{8'000'000'000});
        cluster.stop();
    });

    const RunResult run = run_plan(plan, clock);
    killer.join();

    CHECK(run.aborted);
    CHECK(run.abort_reason.find("profile 1") != std::string::npos);
    CHECK(run.abort_reason.find("all nodes unreachable") != std::string::npos);
    REQUIRE(run.profiles.size() == 1);
    CHECK(run.profiles[0].produced == 5);
    CHECK(run.profiles[0].included == 5);
    REQUIRE(run.summary.profiles.size() == 1);
    CHECK(run.summary.profiles[0].included == 5);
    CHECK(run.summary.total_execution.millis >= 10000);
    CHECK(run.summary.total_execution.millis <= 20000);
}

TEST_CASE("run_plan reports an immediate abort when no node ever answers") {
    TestPlan plan = plan_for({"http://127.0.0.1:1"});
    TestProfile profile;
    profile.transactions = 3;
    plan.profiles.push_back(profile);

    VirtualClock clock;
    const RunResult run = run_plan(plan, clock);

    CHECK(run.aborted);
    CHECK(run.abort_reason.find("all nodes unreachable") != std::string::npos);
    CHECK(run.profiles.empty());
    CHECK(run.summary.profiles.empty());
    CHECK_FALSE(run.summary.tps_overall.has_value());
}
