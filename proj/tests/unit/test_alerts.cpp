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

#include <filesystem>
#include <fstream>
#include <thread>

#include <unistd.h>

#include <httplib.h>

#include <catch2/catch_amalgamated.hpp>

#include <chainwatch/alerts.hpp>

#include "support/net.hpp"

using namespace chainwatch;
using namespace chainwatch::alerts;

namespace {

MetricPoint pt(std::string_view name, double v, TimestampMs at) { return make_point(name, v, at); }

class RecordingSink final : public AlertSink {
  public:
    [[nodiscard]] std::string name() const override { return "memory"; }
    void deliver(const AlertEvent& e) override { events.push_back(e); }
    std::vector<AlertEvent> events;
};

}  // namespace

TEST_CASE("default rules validate", "[alerts]") {
    const auto rules = default_rules();
    CHECK(rules.size() == 4);
    for (const auto& r : rules) CHECK_NOTHROW(validate(r));
    CHECK_THROWS_AS(validate(AlertRule{"x", "no.such.metric", Comparator::greater, 1, 0}), ConfigError);
    CHECK_THROWS_AS(validate(AlertRule{"", "rpc.success", Comparator::greater, 1, 0}), ConfigError);
    CHECK_THROWS_AS(validate(AlertRule{"x", "rpc.success", Comparator::greater, 1, -1}), ConfigError);
}

TEST_CASE("rules load from JSON", "[alerts]") {
    const auto rules = rules_from_json(nlohmann::json::parse(
        R"([{"id":"lat","metric":"rpc.latency_ms","comparator":">","threshold":250,"for_s":30},
            {"id":"quiet","metric":"mempool.pending","comparator":"missing_for","threshold":120}])"));
    REQUIRE(rules.size() == 2);
    CHECK(rules[0] == AlertRule{"lat", "rpc.latency_ms", Comparator::greater, 250, 30});
    CHECK(rules[1].comparator == Comparator::missing_for);
    CHECK_THROWS_AS(rules_from_json(nlohmann::json::parse(R"([{"id":"a","metric":"rpc.success","comparator":"~","threshold":1}])")),
                    ConfigError);
    CHECK_THROWS_AS(rules_from_json(nlohmann::json::parse(R"({"id":"a"})")), ConfigError);
    CHECK_THROWS_AS(load_rules("/nonexistent/rules.json"), ConfigError);
}

TEST_CASE("a latency episode fires once after the hold time and resolves once", "[alerts]") {
    AlertEvaluator ev{{AlertRule{"lat", "rpc.latency_ms", Comparator::greater, 1000, 60}}};
    CHECK(ev.observe(pt("rpc.latency_ms", 1500, 0)).empty());
    CHECK(ev.observe(pt("rpc.latency_ms", 1600, 30'000)).empty());
    const auto fired = ev.observe(pt("rpc.latency_ms", 1700, 60'000));
    REQUIRE(fired.size() == 1);
    CHECK(fired[0].state == AlertState::firing);
    CHECK(fired[0].fired_at == 60'000);
    CHECK(fired[0].triggering_value == 1700);
    CHECK(ev.observe(pt("rpc.latency_ms", 1800, 70'000)).empty());
    const auto resolved = ev.observe(pt("rpc.latency_ms", 200, 80'000));
    REQUIRE(resolved.size() == 1);
    CHECK(resolved[0].state == AlertState::resolved);
    CHECK(resolved[0].fired_at == 60'000);
    CHECK(resolved[0].resolved_at == 80'000);
    CHECK(ev.observe(pt("rpc.latency_ms", 100, 90'000)).empty());
}

TEST_CASE("a violation shorter than the hold time never fires", "[alerts]") {
    AlertEvaluator ev{{AlertRule{"lat", "rpc.latency_ms", Comparator::greater, 1000, 60}}};
    std::vector<AlertEvent> all;
    for (TimestampMs t : {0, 20'000, 40'000}) {
        auto e = ev.observe(pt("rpc.latency_ms", 5000, t));
        all.insert(all.end(), e.begin(), e.end());
    }
    auto e = ev.observe(pt("rpc.latency_ms", 10, 50'000));
    all.insert(all.end(), e.begin(), e.end());
    CHECK(all.empty());
}

TEST_CASE("missing_for fires from ticks and resolves on the next point", "[alerts]") {
    AlertEvaluator ev{{AlertRule{"quiet", "mempool.pending", Comparator::missing_for, 300, 0}}};
    CHECK(ev.observe(pt("mempool.pending", 5, 0)).empty());
    CHECK(ev.tick(300'000).empty());
    const auto fired = ev.tick(301'000);
    REQUIRE(fired.size() == 1);
    CHECK(fired[0].fired_at == 300'000);
    CHECK(ev.tick(400'000).empty());
    const auto resolved = ev.observe(pt("mempool.pending", 5, 401'000));
    REQUIRE(resolved.size() == 1);
    CHECK(resolved[0].state == AlertState::resolved);
    CHECK_THROWS_AS(ev.tick(1), std::invalid_argument);
}

TEST_CASE("offline evaluation equals live evaluation", "[alerts]") {
    const auto rules = default_rules();
    std::vector<MetricPoint> stream;
    for (int i = 0; i < 50; ++i) {
        stream.push_back(pt("rpc.success", (i / 10) % 2 == 0 ? 1.0 : 0.0, i * 30'000));
        stream.push_back(pt("block.interval_s", i == 17 ? 90.0 : 12.0, i * 30'000));
    }
    AlertEvaluator live{rules};
    std::vector<AlertEvent> seen;
    for (const auto& p : stream) {
        auto e = live.observe(p);
        seen.insert(seen.end(), e.begin(), e.end());
    }
    CHECK(evaluate(rules, stream) == seen);
    const auto fired = std::count_if(seen.begin(), seen.end(), [](const auto& e) { return e.state == AlertState::firing; });
    CHECK(fired == 4);  // two availability episodes, one long block, and the never-seen mempool
}

TEST_CASE("alert events round-trip as JSON", "[alerts]") {
    const AlertEvent e{"lat", AlertState::resolved, 10, 20, 1234.5};
    const auto j = to_json(e);
    CHECK(j["state"] == "resolved");
    CHECK(alert_event_from_json(j) == e);
    const AlertEvent f{"lat", AlertState::firing, 10, std::nullopt, 1.0};
    CHECK(to_json(f)["resolved_at"].is_null());
    CHECK(alert_event_from_json(to_json(f)) == f);
}

TEST_CASE("a failing webhook does not block the other sinks", "[alerts]") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/hook", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto path = std::filesystem::temp_directory_path() / ("chainwatch-alerts-" + std::to_string(::getpid()) + ".jsonl");
    std::filesystem::remove(path);
    auto memory = std::make_shared<RecordingSink>();
    const std::vector<std::shared_ptr<AlertSink>> sinks{
        std::make_shared<WebhookAlertSink>("http://127.0.0.1:" + std::to_string(port) + "/hook", 1000),
        std::make_shared<JsonlAlertSink>(path), memory};

    const AlertEvent e{"rpc_unavailable", AlertState::firing, 5, std::nullopt, 0};
    const auto receipt = notify(e, sinks);
    server.stop();
    th.join();

    CHECK(hits == 1);
    REQUIRE(receipt.deliveries.size() == 3);
    CHECK_FALSE(receipt.deliveries[0].ok);
    CHECK(receipt.deliveries[0].detail.find("500") != std::string::npos);
    CHECK(receipt.deliveries[1].ok);
    CHECK(receipt.deliveries[2].ok);
    CHECK_FALSE(receipt.all_ok());
    CHECK(memory->events.size() == 1);
    std::ifstream in{path};
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(alert_event_from_json(nlohmann::json::parse(line)) == e);
}

TEST_CASE("an unreachable webhook is a delivery failure", "[alerts]") {
    WebhookAlertSink hook{testing::closed_url() + "/", 500};
    CHECK_THROWS(hook.deliver(AlertEvent{"x", AlertState::firing, 0, std::nullopt, 0}));
    CHECK_THROWS_AS(WebhookAlertSink{"ftp://nope"}, std::invalid_argument);
}
