/*
   Copyright 2026 The Chainwatch Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include <chainwatch/metrics.hpp>

#include "support/oracles.hpp"

using namespace chainwatch;
using namespace chainwatch::metrics;

namespace {

BlockRecord block(std::uint64_t n, std::uint64_t used, std::uint64_t limit = 30'000'000, std::uint64_t txs = 0) {
    BlockRecord b;
    b.number = n;
    b.gas_used = used;
    b.gas_limit = limit;
    b.tx_count = txs;
    b.timestamp = 1'700'000'000 + 12 * n;
    return b;
}

TxRecord tx(std::string from, std::optional<std::string> to, std::uint64_t price_gwei, std::uint64_t value = 0) {
    TxRecord t;
    t.tx_hash = "0x" + std::string(64, '0');
    t.sender = std::move(from);
    t.recipient = std::move(to);
    t.gas_price_wei = Uint256{price_gwei} * 1'000'000'000;
    t.value_wei = value;
    return t;
}

}  // namespace

TEST_CASE("gas utilization", "[metrics]") {
    CHECK(gas_utilization(block(1, 15'000'000)) == 0.5);
    CHECK(gas_utilization(block(1, 0)) == 0.0);
    CHECK(gas_utilization(block(1, 30'000'000)) == 1.0);
    CHECK_THROWS_AS(gas_utilization(block(1, 0, 0)), InvalidBlock);
    CHECK_THROWS_AS(gas_utilization(block(1, 31'000'000)), InvalidBlock);
}

TEST_CASE("the high-efficiency filter is strict", "[metrics]") {
    const std::vector<BlockRecord> blocks{block(1, 27'000'000, 30'000'000, 4), block(2, 27'000'001, 30'000'000, 9),
                                          block(3, 30'000'000, 30'000'000, 2)};
    const auto hits = filter_high_efficiency(blocks);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].number == 2);
    CHECK(hits[0].tx_count == 9);
    CHECK(hits[1].utilization == 1.0);
    CHECK(filter_high_efficiency(blocks, 1.0).empty());
    CHECK(filter_high_efficiency({}, 0.9).empty());
    CHECK_THROWS_AS(filter_high_efficiency(blocks, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(filter_high_efficiency(blocks, 1.5), std::invalid_argument);
}

TEST_CASE("the filter agrees with brute force on random blocks", "[metrics]") {
    std::mt19937_64 rng{77};
    std::vector<BlockRecord> blocks;
    for (std::uint64_t n = 0; n < 2000; ++n) {
        const std::uint64_t limit = 1 + rng() % 40'000'000;
        blocks.push_back(block(n, rng() % (limit + 1), limit, rng() % 300));
    }
    for (double t : {0.25, 0.5, 0.9, 0.999}) CHECK(filter_high_efficiency(blocks, t) == testing::brute_force_filter(blocks, t));
}

TEST_CASE("inclusion delay", "[metrics]") {
    TxRecord t = tx("a", "b", 1);
    CHECK_THROWS_AS(inclusion_delay(t), NotYetIncluded);
    t.first_seen_block = 10;
    CHECK_THROWS_AS(inclusion_delay(t), NotYetIncluded);
    t.inclusion_block = 13;
    CHECK(inclusion_delay(t) == 3);
    t.inclusion_block = 9;
    CHECK_THROWS_AS(inclusion_delay(t), std::invalid_argument);

    t.inclusion_block = 10;
    t.gas_price_wei = 1'500'000'000;
    const std::vector<TxRecord> one{t};
    const auto series = delay_price_series(one);
    REQUIRE(series.size() == 1);
    CHECK(series[0].gas_price_gwei == 1.5);
    CHECK(series[0].delay_blocks == 0);
}

TEST_CASE("ETH transferred is exact beyond 64 bits", "[metrics]") {
    BlockRecord b = block(1, 0);
    for (int i = 0; i < 30; ++i) b.transactions.push_back(tx("a", "b", 1, 18'000'000'000'000'000'000ULL));
    const auto total = eth_transferred(b);
    CHECK(total.total_wei == BigUint{"540000000000000000000"});
    CHECK(total.total_eth == 540.0);
    CHECK(eth_transferred(block(2, 0)).total_wei == 0);
}

TEST_CASE("top addresses rank by count then address", "[metrics]") {
    std::vector<TxRecord> txs{tx("0xb", "0xr", 10), tx("0xa", "0xr", 20), tx("0xb", "0xs", 30), tx("0xa", std::nullopt, 40),
                              tx("0xc", "0xs", 50)};
    const auto top = top_addresses(txs, 2);
    REQUIRE(top.senders.size() == 2);
    CHECK(top.senders[0].address == "0xa");  // tie on 2, smaller address first
    CHECK(top.senders[0].avg_gas_price_gwei == 30.0);
    CHECK(top.senders[1].address == "0xb");
    CHECK(top.senders[1].avg_gas_price_gwei == 20.0);
    REQUIRE(top.receivers.size() == 2);
    CHECK(top.receivers[0].address == "0xr");
    CHECK(top.receivers[0].avg_gas_price_gwei == 15.0);
    CHECK(top.receivers[1].role == AddressRole::receiver);
    CHECK(top_addresses({}).senders.empty());
    CHECK_THROWS_AS(top_addresses(txs, 0), std::invalid_argument);
    CHECK(top_addresses(txs, 20).senders.size() == 3);
}

TEST_CASE("nearest-rank percentiles", "[metrics]") {
    const std::vector<double> ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(nearest_rank(ten, 50) == 5);
    CHECK(nearest_rank(ten, 95) == 10);
    CHECK(nearest_rank(ten, 10) == 1);
    CHECK(nearest_rank(ten, 11) == 2);
    CHECK(nearest_rank(ten, 100) == 10);
    const std::vector<double> one{7};
    CHECK(nearest_rank(one, 1) == 7);
    CHECK_THROWS_AS(nearest_rank({}, 50), EmptyWindow);
    CHECK_THROWS_AS(nearest_rank(ten, 0), std::invalid_argument);
}

TEST_CASE("latency statistics over a half-open window", "[metrics]") {
    std::vector<MetricPoint> pts;
    for (int i = 1; i <= 20; ++i) {
        pts.push_back(make_point("rpc.latency_ms", i * 10.0, i * 1000,
                                 {{"outcome", i % 5 == 0 ? "transport_error" : "success"}}));
    }
    pts.push_back(make_point("chain.head", 99, 5000));
    const auto all = latency_stats(pts);
    CHECK(all.samples == 20);
    CHECK(all.p50 == 100);
    CHECK(all.p95 == 190);
    CHECK(all.max == 200);
    CHECK(all.success_rate == 0.8);
    const auto w = latency_stats(pts, TimeWindow{1000, 5000});
    CHECK(w.samples == 4);
    CHECK(w.max == 40);
    CHECK_THROWS_AS(latency_stats(pts, TimeWindow{100'000, 200'000}), EmptyWindow);
}

TEST_CASE("block interval statistics and stalls", "[metrics]") {
    std::vector<BlockRecord> blocks{block(1, 0), block(2, 0), block(3, 0)};
    blocks[2].timestamp += 36;
    const auto s = block_interval_stats(blocks, blocks[2].timestamp + 10, 60);
    CHECK(s.mean_s == 30);
    CHECK(s.max_s == 48);
    CHECK_FALSE(s.stalled);
    CHECK(block_interval_stats(blocks, blocks[2].timestamp + 61, 60).stalled);
    CHECK_THROWS_AS(block_interval_stats(std::span(blocks).first(1), 0, 60), InsufficientData);
}

TEST_CASE("mempool series is time ordered", "[metrics]") {
    const std::vector<MempoolSnapshot> snaps{{5, 1, 300, 10}, {7, 0, 100, 9}, {6, 2, 200, 9}};
    const auto series = mempool_series(snaps);
    REQUIRE(series.size() == 3);
    CHECK(series[0].value == 7);
    CHECK(series[2].observed_at == 300);
    CHECK(series[0].name == "mempool.pending");
}
