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

#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include <chainwatch/mockchain.hpp>

using namespace chainwatch;
using namespace chainwatch::mock;
using nlohmann::json;

namespace {

const Uint256 kGwei{1'000'000'000ULL};

json rpc(MockChain& chain, const std::string& method, json params = json::array()) {
    return chain.handle_request(json{{"jsonrpc", "2.0"}, {"id", 1}, {"method", method}, {"params", params}});
}

}  // namespace

TEST_CASE("same seed, same chain", "[mockchain]") {
    auto build = [](std::uint64_t seed) {
        MockChain chain{ChainConfig{.seed = seed}};
        TrafficGenerator traffic{seed};
        std::vector<std::string> hashes;
        for (int i = 0; i < 20; ++i) {
            traffic.submit(chain, 15);
            hashes.push_back(chain.advance_block().hash);
        }
        return hashes;
    };
    CHECK(build(42) == build(42));
    CHECK(build(42) != build(43));
}

TEST_CASE("blocks include the highest gas prices first", "[mockchain]") {
    ChainConfig cfg;
    cfg.block_gas_limit = 21'000 * 3;
    MockChain chain{cfg};
    const auto acc = chain.accounts();
    std::vector<std::pair<std::string, std::uint64_t>> sent;
    for (std::uint64_t price : {5, 50, 20, 1, 50, 7}) {
        sent.emplace_back(chain.submit_tx(acc[0], acc[1], 1, kGwei * price, 21'000), price);
    }
    const auto b1 = chain.advance_block();
    REQUIRE(b1.transactions.size() == 3);
    CHECK(b1.transactions[0].tx_hash == sent[1].first);  // 50, arrived first
    CHECK(b1.transactions[1].tx_hash == sent[4].first);  // 50
    CHECK(b1.transactions[2].tx_hash == sent[2].first);  // 20
    CHECK(b1.gas_used == 63'000);
    CHECK(chain.pool_size() == 3);
    const auto b2 = chain.advance_block();
    CHECK(b2.transactions.size() == 3);
    CHECK(b2.parent_hash == b1.hash);
    CHECK(b2.timestamp - b1.timestamp == 12);
    for (const auto& e : chain.inclusion_log()) CHECK(e.inclusion_block >= e.submitted_at_block);
}

TEST_CASE("submission checks funds and the block gas limit", "[mockchain]") {
    ChainConfig cfg;
    cfg.initial_accounts = {{"0x" + std::string(40, '1'), Uint256{21'000} * kGwei + 10}};
    MockChain chain{cfg};
    const auto a = cfg.initial_accounts[0].first;
    const std::string b = "0x" + std::string(40, '2');
    CHECK_THROWS_AS(chain.submit_tx(a, b, 11, kGwei, 21'000), MockRpcError);
    CHECK_NOTHROW(chain.submit_tx(a, b, 10, kGwei, 21'000));
    // the pending transaction already commits the whole balance
    CHECK_THROWS_AS(chain.submit_tx(a, b, 0, kGwei, 21'000), MockRpcError);
    CHECK_THROWS_AS(chain.submit_tx(a, b, 0, 1, 30'000'001), MockRpcError);
}

TEST_CASE("value and fees are conserved", "[mockchain]") {
    MockChain chain{ChainConfig{.seed = 9}};
    const BigUint supply = chain.total_supply();
    TrafficGenerator traffic{9};
    for (int i = 0; i < 10; ++i) {
        traffic.submit(chain, 30);
        (void)chain.advance_block();
    }
    CHECK(chain.total_supply() == supply);
}

TEST_CASE("a fork replaces exactly the top blocks", "[mockchain]") {
    MockChain chain{ChainConfig{.seed = 3}};
    TrafficGenerator traffic{3};
    for (int i = 0; i < 10; ++i) {
        traffic.submit(chain, 5);
        (void)chain.advance_block();
    }
    std::vector<std::string> before;
    for (std::uint64_t n = 0; n <= 10; ++n) before.push_back(chain.block(n).hash);
    chain.inject_fault(Fork{2});
    CHECK(chain.head_number() == 10);
    for (std::uint64_t n = 0; n <= 8; ++n) CHECK(chain.block(n).hash == before[n]);
    CHECK(chain.block(9).hash != before[9]);
    CHECK(chain.block(10).hash != before[10]);
    CHECK(chain.block(9).parent_hash == before[8]);
    CHECK_THROWS_AS(chain.inject_fault(Fork{11}), std::invalid_argument);
}

TEST_CASE("slow blocks stretch one gap", "[mockchain]") {
    MockChain chain{ChainConfig{}};
    const auto b1 = chain.advance_block();
    chain.inject_fault(SlowBlock{5.0});
    const auto b2 = chain.advance_block();
    const auto b3 = chain.advance_block();
    CHECK(b2.timestamp - b1.timestamp == 60);
    CHECK(b3.timestamp - b2.timestamp == 12);
}

TEST_CASE("the amb profile refuses exactly the restricted methods", "[mockchain]") {
    MockChain chain{ChainConfig{}};
    auto message = [&](const std::string& m, json p = json::array()) { return rpc(chain, m, p)["error"]["message"]; };
    CHECK(message("eth_sendRawTransaction", json::array({"0x02"})) == "Typed transaction too short");
    CHECK(message("txpool_content") == "Method not available on AMB");
    CHECK(message("debug_traceTransaction", json::array({"0x" + std::string(64, '0')})) == "Restricted method");
    CHECK(message("eth_mining") == "Not supported by AMB");
    CHECK(rpc(chain, "no_such_method")["error"]["code"] == -32601);
    CHECK(rpc(chain, "eth_blockNumber")["result"] == "0x0");
    CHECK(rpc(chain, "txpool_status")["result"]["pending"] == "0x0");

    MockChain open{ChainConfig{.profile = Profile::permissive}};
    CHECK(rpc(open, "txpool_content").contains("result"));
    CHECK(rpc(open, "eth_mining").contains("result"));
}

TEST_CASE("the pending block lists the pool in priority order", "[mockchain]") {
    MockChain chain{ChainConfig{}};
    const auto acc = chain.accounts();
    const auto low = chain.submit_tx(acc[0], acc[1], 1, kGwei, 21'000);
    const auto high = chain.submit_tx(acc[2], acc[3], 1, kGwei * 9, 21'000);
    const auto pending = rpc(chain, "eth_getBlockByNumber", json::array({"pending", true}))["result"];
    REQUIRE(pending["transactions"].size() == 2);
    CHECK(pending["transactions"][0]["hash"] == high);
    CHECK(pending["transactions"][1]["hash"] == low);
    CHECK(rpc(chain, "eth_gasPrice")["result"] == encode_quantity(kGwei));
}

TEST_CASE("scripts drive the chain", "[mockchain]") {
    MockChain chain{ChainConfig{}};
    TrafficGenerator traffic{1};
    std::vector<std::string> faults;
    std::istringstream script{"# demo\nadvance 3\ntraffic 4\nadvance\nfault slow_block 2\nadvance 1\n"};
    run_script(script, chain, traffic, [&](const Fault& f) {
        faults.emplace_back("x");
        return chain.inject_fault(f);
    });
    CHECK(chain.head_number() == 5);
    CHECK(chain.block(4).transactions.size() == 4);
    CHECK(faults.size() == 1);
    std::istringstream bad{"advance 1\nexplode\n"};
    try {
        run_script(bad, chain, traffic, [&](const Fault& f) { return chain.inject_fault(f); });
        FAIL("unknown command accepted");
    } catch (const ScriptError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("the in-process transport honors outages", "[mockchain]") {
    auto chain = std::make_shared<MockChain>(ChainConfig{});
    InProcessTransport t{chain};
    Endpoint e;
    e.url = "http://mock";
    const std::string body = R"({"jsonrpc":"2.0","id":1,"method":"eth_blockNumber","params":[]})";
    CHECK(std::holds_alternative<HttpReply>(t.post(e, body)));
    chain->inject_fault(Outage{std::chrono::hours{1}});
    const auto r = t.post(e, body);
    REQUIRE(std::holds_alternative<TransportError>(r));
    CHECK(std::get<TransportError>(r).kind == TransportErrorKind::connection_refused);
    chain->inject_fault(Outage{std::chrono::milliseconds{0}});
    CHECK(std::holds_alternative<HttpReply>(t.post(e, body)));
}

TEST_CASE("the HTTP server serves JSON-RPC and refuses a taken port", "[mockchain]") {
    auto chain = std::make_shared<MockChain>(ChainConfig{});
    MockServer server{chain, ServeOptions{}};
    const RpcClient client;
    Endpoint e;
    e.url = server.url();
    e.max_retries = 0;
    chain->advance_block();
    const auto r = client.call(e, "eth_blockNumber");
    REQUIRE(r.is_success());
    CHECK(r.value() == "0x1");

    ServeOptions same;
    same.port = server.port();
    CHECK_THROWS_AS(MockServer(std::make_shared<MockChain>(ChainConfig{}), same), PortInUse);
}
