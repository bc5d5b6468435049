#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hammer/clock.hpp"
#include "hammer/metrics.hpp"
#include "hammer/rpc_client.hpp"
#include "hammer/rpc_codec.hpp"
#include "hammer/simnode.hpp"

using namespace hammer;

namespace {

Block make_block(uint64_t number, uint64_t timestamp, size_t tx_count) {
    Block b;
    b.number = number;
    b.timestamp = timestamp;
    b.tx_hashes.resize(tx_count);
    return b;
}

wire_json submit_params(uint8_t salt) {
    wire_json tx;
    tx["from"] = "0x" + std::string(38, 'a') + (salt < 10 ? "0" : "") + std::to_string(salt);
    tx["to"] = "0x" + std::string(40, 'b');
    tx["value"] = "0x1";
    return wire_json::array({tx});
}

void submit_one(const JsonRpcClient& client, uint8_t salt) {
    const auto result = client.call("eth_sendTransaction", submit_params(salt));
    REQUIRE(result.is_string());
}

}  // namespace

TEST_CASE("block tps over one block") {
    const Block prev = make_block(4, 1000, 7);
    const Block cur = make_block(5, 1001, 2);
    const TpsSample sample = block_tps(prev, cur);
    CHECK(sample.block_number == 5);
    CHECK(sample.block_timestamp == 1001);
    CHECK(sample.tx_count == 2);
    CHECK(sample.span_seconds == doctest::Approx(1.0));
    CHECK(sample.tps() == doctest::Approx(2.0));
}

TEST_CASE("block tps spreads the count over the whole span") {
    const Block prev = make_block(9, 100, 0);
    const Block cur = make_block(10, 103, 600);
    const TpsSample sample = block_tps(prev, cur);
    CHECK(sample.span_seconds == doctest::Approx(3.0));
    CHECK(sample.tps() == doctest::Approx(200.0));
}

TEST_CASE("block tps rejects gaps and stalled timestamps") {
    const Block base = make_block(4, 1000, 1);
    CHECK_THROWS_AS(block_tps(base, make_block(6, 1002, 1)), std::invalid_argument);
    CHECK_THROWS_AS(block_tps(base, make_block(4, 1001, 1)), std::invalid_argument);
    CHECK_THROWS_AS(block_tps(base, make_block(5, 1000, 1)), std::invalid_argument);
    CHECK_THROWS_AS(block_tps(base, make_block(5, 999, 1)), std::invalid_argument);
}

TEST_CASE("aggregate tps weights by span, not by sample") {
    std::vector<TpsSample> samples;
    samples.push_back(TpsSample{1, 101, 500, 1.0});
    samples.push_back(TpsSample{2, 104, 600, 3.0});
    const auto agg = aggregate_tps(samples);
    REQUIRE(agg.has_value());
    // 1100 tx over 4 s, not the 350 a mean of per-block rates would give.
    CHECK(*agg == doctest::Approx(275.0));
}

TEST_CASE("aggregate tps is absent when there is nothing to aggregate") {
    CHECK_FALSE(aggregate_tps({}).has_value());
    std::vector<TpsSample> degenerate;
    degenerate.push_back(TpsSample{1, 100, 5, 0.0});
    CHECK_FALSE(aggregate_tps(degenerate).has_value());
}

TEST_CASE("latency stats over a small sample") {
    const LatencyStats stats = latency_stats({300, 100, 200});
    CHECK(stats.count == 3);
    CHECK(stats.min_ns == 100);
    CHECK(stats.max_ns == 300);
    CHECK(stats.mean_ns == doctest::Approx(200.0));
    CHECK(stats.p50_ns == 200);
    CHECK(stats.p95_ns == 300);
    CHECK(stats.p99_ns == 300);
}

TEST_CASE("latency stats singleton and empty") {
    const LatencyStats one = latency_stats({42});
    CHECK(one.count == 1);
    CHECK(one.min_ns == 42);
    CHECK(one.max_ns == 42);
    CHECK(one.mean_ns == doctest::Approx(42.0));
    CHECK(one.p50_ns == 42);
    CHECK(one.p95_ns == 42);
    CHECK(one.p99_ns == 42);

    const LatencyStats none = latency_stats({});
    CHECK(none == LatencyStats{});
}

TEST_CASE("p95 of twenty samples lands on rank 19") {
    // ceil(0.95 * 20) is exactly 19, but naive floating-point evaluation
    // yields 19.000000000000004 and rounds the rank up to 20.
    std::vector<int64_t> samples(20);
    for (int i = 0; i < 20; ++i) samples[i] = i + 1;
    const LatencyStats stats = latency_stats(samples);
    CHECK(stats.p50_ns == 10);
    CHECK(stats.p95_ns == 19);
    CHECK(stats.p99_ns == 20);
}

TEST_CASE("percentiles at round counts") {
    std::vector<int64_t> samples(100);
    for (int i = 0; i < 100; ++i) samples[i] = 10 * (i + 1);
    const LatencyStats stats = latency_stats(samples);
    CHECK(stats.p50_ns == 500);
    CHECK(stats.p95_ns == 950);
    CHECK(stats.p99_ns == 990);
    CHECK(stats.mean_ns == doctest::Approx(505.0));
}

TEST_CASE("latency stats ignore input order") {
    std::vector<int64_t> samples(37);
    for (size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<int64_t>(i * i + 3);
    const LatencyStats sorted_stats = latency_stats(samples);
    std::mt19937_64 rng(99);
    std::shuffle(samples.begin(), samples.end(), rng);
    CHECK(latency_stats(samples) == sorted_stats);
}

TEST_CASE("watch_blocks sweeps pre-sealed blocks exactly once, in order") {
    sim::ChainConfig config;
    config.block_interval = Duration::from_seconds(3600);  // sealer stays out of the way
    RealClock clock;
    sim::Cluster cluster(config, clock);
    const JsonRpcClient client(cluster.endpoint_urls().front());

    submit_one(client, 1);
    cluster.node().seal_one();  // height 1, one tx
    submit_one(client, 2);
    submit_one(client, 3);
    cluster.node().seal_one();  // height 2, two txs
    cluster.node().seal_one();  // height 3, empty
    submit_one(client, 4);
    cluster.node().seal_one();  // height 4, one tx

    std::vector<uint64_t> numbers;
    std::vector<size_t> counts;
    const WatchResult result = watch_blocks(
        client, clock, 2,
        [&](const Block& b) {
            numbers.push_back(b.number);
            counts.push_back(b.tx_hashes.size());
        },
        [] { return true; });

    CHECK_FALSE(result.failed);
    CHECK(result.last_block == 4);
    CHECK(numbers == std::vector<uint64_t>{2, 3, 4});
    CHECK(counts == std::vector<size_t>{2, 0, 1});
    cluster.stop();
}

TEST_CASE("watch_blocks follows a live chain without gaps or repeats") {
    sim::ChainConfig config;
    config.clock = sim::ClockMode::virtual_time;
    VirtualClock clock;
    sim::Cluster cluster(config, clock);
    const JsonRpcClient client(cluster.endpoint_urls().front());

    std::vector<uint64_t> numbers;
    std::vector<size_t> counts;
    std::atomic<bool> stop_flag{false};
    WatchResult result;

    {
        ClockParticipant main_guard(clock);  // pins virtual time while we submit
        submit_one(client, 1);
        submit_one(client, 2);
        submit_one(client, 3);

        std::thread watcher([&] {
            result = watch_blocks(
                client, clock, 1,
                [&](const Block& b) {
                    numbers.push_back(b.number);
                    counts.push_back(b.tx_hashes.size());
                },
                [&] { return stop_flag.load(); });
        });

        clock.sleep_for(Clock::ns{3'500'000'000});
        stop_flag.store(true);
        clock.interrupt();
        watcher.join();
        cluster.stop();
    }

    CHECK_FALSE(result.failed);
    CHECK(result.last_block == 3);
    CHECK(numbers == std::vector<uint64_t>{1, 2, 3});
    CHECK(counts == std::vector<size_t>{3, 0, 0});
}

TEST_CASE("watch_blocks gives up after the retry budget") {
    VirtualClock clock;
    const JsonRpcClient client("http://127.0.0.1:1");  // nothing listens there

    size_t calls = 0;
    const WatchResult result = watch_blocks(
        client, clock, 0, [&](const Block&) { ++calls; }, [] { return false; });

    CHECK(result.failed);
    CHECK_FALSE(result.error.empty());
    CHECK(result.last_block == 0);
    CHECK(calls == 0);
    // Backoff doubles from 500 ms; 500+1000+2000+4000+8000 ms fit in the 30 s
    // budget and the next 16 s step would not.
    CHECK(clock.now() == Clock::ns{15'500'000'000});
}
