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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include <chainwatch/alerts.hpp>
#include <chainwatch/collector.hpp>
#include <chainwatch/metrics.hpp>
#include <chainwatch/mockchain.hpp>
#include <chainwatch/rpc_client.hpp>
#include <chainwatch/sink.hpp>

#include "support/emf_validator.hpp"
#include "support/oracles.hpp"

using namespace chainwatch;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

RetryPolicy no_wait() { return RetryPolicy{std::chrono::milliseconds{0}, 2.0, std::chrono::milliseconds{0}}; }

Endpoint in_process_endpoint() {
    Endpoint e;
    e.url = "http://in-process";
    e.max_retries = 0;
    return e;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("chainwatch-acceptance-" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// ---------------------------------------------------------------------------------------------

Verdict ac1_capability_matrix() {
    Verdict v;
    const auto t0 = Clock::now();
    auto chain = std::make_shared<mock::MockChain>(mock::ChainConfig{});
    mock::MockServer server{chain, mock::ServeOptions{}};
    Endpoint e;
    e.url = server.url();
    e.max_retries = 0;
    const RpcClient client;
    const auto probes = default_probe_set();
    const auto m = probe_capabilities(client, e, probes);

    v.require(m.entries.size() == 20, fmt::format("{} entries", m.entries.size()));
    for (const auto& method : supported_reference_methods()) {
        const auto* entry = m.find(method);
        v.require(entry != nullptr && entry->status == Capability::supported, method + " not supported");
    }
    for (const auto& [method, message] : restricted_reference_methods()) {
        const auto* entry = m.find(method);
        v.require(entry != nullptr && entry->status == Capability::restricted, method + " not restricted");
        v.require(entry != nullptr && entry->message == message,
                  method + " message '" + (entry ? entry->message : "") + "'");
    }
    const auto supported = m.count(Capability::supported);
    const auto restricted = m.count(Capability::restricted);
    v.require(supported == 16 && restricted == 4, fmt::format("{} supported, {} restricted", supported, restricted));
    const double elapsed = seconds_since(t0);
    v.require(elapsed < 5.0, fmt::format("took {:.2f} s", elapsed));
    if (v.pass) v.detail = fmt::format("supported=16 restricted=4 in {:.2f} s", elapsed);
    return v;
}

Verdict ac2_filter_oracle() {
    Verdict v;
    const auto t0 = Clock::now();
    mock::ChainConfig cfg;
    cfg.seed = 2024;
    cfg.block_gas_limit = 3'000'000;
    mock::MockChain chain{cfg};
    mock::TrafficGenerator::Ranges ranges;
    ranges.max_gas_units = 400'000;
    mock::TrafficGenerator traffic{2024, ranges};
    std::mt19937_64 rng{2024};
    std::vector<BlockRecord> blocks;
    for (int i = 0; i < 1000; ++i) {
        traffic.submit(chain, rng() % 22);
        blocks.push_back(chain.advance_block());
    }
    std::size_t hits = 0;
    for (double t : {0.5, 0.8, 0.9, 0.99}) {
        const auto got = metrics::filter_high_efficiency(blocks, t);
        const auto want = testing::brute_force_filter(blocks, t);
        v.require(got == want, fmt::format("mismatch at {}", t));
        hits += got.size();
        v.require(!want.empty() || t == 0.99, fmt::format("no blocks above {}", t));
    }
    const double elapsed = seconds_since(t0);
    v.require(elapsed < 10.0, fmt::format("took {:.2f} s", elapsed));
    if (v.pass) v.detail = fmt::format("1000 blocks, {} hits over 4 thresholds, {:.2f} s", hits, elapsed);
    return v;
}

Verdict ac3_fee_priority() {
    Verdict v;
    const auto t0 = Clock::now();
    constexpr std::size_t kPerBlock = 10;
    constexpr std::size_t kBlocks = 50;
    constexpr std::uint64_t kCapacityTxs = 7;  // per block: a sustained backlog against 10 arrivals
    mock::ChainConfig cfg;
    cfg.seed = 33;
    cfg.block_gas_limit = 21'000 * kCapacityTxs;
    mock::MockChain chain{cfg};
    mock::TrafficGenerator traffic{33};
    for (std::size_t b = 0; b < kBlocks; ++b) {
        traffic.submit(chain, kPerBlock);
        (void)chain.advance_block();
    }
    while (chain.pool_size() > 0) (void)chain.advance_block();

    const auto log = chain.inclusion_log();
    v.require(log.size() == kPerBlock * kBlocks, fmt::format("{} inclusions", log.size()));

    std::size_t violations = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        for (std::size_t j = 0; j < log.size(); ++j) {
            const auto& a = log[i];
            const auto& b = log[j];
            if (a.submitted_at_block != b.submitted_at_block || !(a.gas_price_wei > b.gas_price_wei)) continue;
            ++pairs;
            if (a.inclusion_block > b.inclusion_block) ++violations;
        }
    }
    std::vector<double> price;
    std::vector<double> delay;
    for (const auto& e : log) {
        price.push_back(ratio_to_double(BigUint{e.gas_price_wei}, BigUint{1}));
        delay.push_back(static_cast<double>(e.delay()));
    }
    const double rho = testing::spearman(price, delay);
    v.require(violations == 0, fmt::format("{} priority violations", violations));
    v.require(rho <= -0.8, fmt::format("spearman {:.4f}", rho));
    const double elapsed = seconds_since(t0);
    v.require(elapsed < 30.0, fmt::format("took {:.2f} s", elapsed));
    if (v.pass) {
        v.detail = fmt::format("{} same-block pairs, 0 violations, spearman={:.4f}, {:.2f} s", pairs, rho, elapsed);
    }
    return v;
}

Verdict ac4_eth_volume() {
    Verdict v;
    const auto t0 = Clock::now();
    auto chain = std::make_shared<mock::MockChain>(mock::ChainConfig{.seed = 44});
    const auto senders = chain->accounts();
    std::mt19937_64 rng{44};
    std::vector<std::string> sinks;
    for (int i = 0; i < 40; ++i) sinks.push_back(testing::random_hex(rng, 20));

    for (int b = 0; b < 200; ++b) {
        const auto n = rng() % 101;
        for (std::uint64_t i = 0; i < n; ++i) {
            const Uint256 value = (Uint256{rng()} << 4) | Uint256{rng() % 16};  // up to 2^68 wei
            chain->submit_tx(senders[rng() % senders.size()], sinks[rng() % sinks.size()], value,
                             Uint256{1'000'000'000}, 21'000);
        }
        (void)chain->advance_block();
    }

    // read the blocks back through the RPC decoding path
    const RpcClient client{std::make_shared<mock::InProcessTransport>(chain), no_wait()};
    BigUint grand_total{0};
    std::size_t txs = 0;
    for (std::uint64_t n = 1; n <= 200; ++n) {
        const auto r = client.call(in_process_endpoint(), "eth_getBlockByNumber", json::array({encode_quantity(n), true}));
        if (!r.is_success()) {
            v.require(false, fmt::format("block {} fetch failed", n));
            break;
        }
        const auto block = collector::block_from_rpc(r.value(), 0);
        std::vector<std::string> decimals;
        for (const auto& tx : block.transactions) decimals.push_back(to_decimal(tx.value_wei));
        const auto total = metrics::eth_transferred(block).total_wei;
        const auto oracle = testing::decimal_sum(decimals);
        if (total.str() != oracle) v.require(false, fmt::format("block {}: {} vs {}", n, total.str(), oracle));
        grand_total += total;
        txs += block.transactions.size();
    }
    BigUint credited{0};
    for (const auto& s : sinks) credited += BigUint{chain->balance(s)};
    v.require(credited == grand_total, fmt::format("sinks hold {} but blocks moved {}", credited.str(), grand_total.str()));
    const double elapsed = seconds_since(t0);
    v.require(elapsed < 10.0, fmt::format("took {:.2f} s", elapsed));
    if (v.pass) {
        v.detail = fmt::format("200 blocks, {} txs, {} wei conserved, {:.2f} s", txs, grand_total.str(), elapsed);
    }
    return v;
}

bool within_one_ulp(double a, double b) {
    return a == b || std::nextafter(a, b) == b;
}

Verdict ac5_top_addresses() {
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 rng{55};
    std::vector<std::string> pool;
    for (int i = 0; i < 400; ++i) pool.push_back(testing::random_hex(rng, 20));
    std::vector<double> weights;
    for (std::size_t i = 0; i < pool.size(); ++i) weights.push_back(1.0 / std::pow(static_cast<double>(i + 1), 0.9));
    std::discrete_distribution<std::size_t> pick{weights.begin(), weights.end()};

    std::vector<TxRecord> txs;
    for (int i = 0; i < 10'000; ++i) {
        TxRecord t;
        t.tx_hash = testing::random_hex(rng, 32);
        t.sender = pool[pick(rng)];
        if (rng() % 50 != 0) t.recipient = pool[pick(rng)];  // occasional contract creation
        t.gas_price_wei = Uint256{1'000'000'000} + Uint256{rng() % 300'000'000'000ULL};
        t.value_wei = Uint256{rng()};
        t.gas_limit = 21'000;
        txs.push_back(std::move(t));
    }
    // identical activity for a block of addresses so ties straddle the cut
    for (int k = 0; k < 6; ++k) {
        for (int i = 0; i < 60; ++i) {
            TxRecord t;
            t.tx_hash = testing::random_hex(rng, 32);
            t.sender = fmt::format("0x{:040x}", 0xabc0 + k);
            t.recipient = fmt::format("0x{:040x}", 0xdef0 + k);
            t.gas_price_wei = Uint256{7'000'000'001ULL + static_cast<std::uint64_t>(i)};
            txs.push_back(std::move(t));
        }
    }

    const auto got = metrics::top_addresses(txs, 20);
    const auto want = testing::brute_force_top(txs, 20);
    std::size_t ties = 0;
    auto compare = [&](const std::vector<metrics::AddressActivity>& g, const std::vector<metrics::AddressActivity>& w,
                       const char* role) {
        v.require(g.size() == w.size(), fmt::format("{} list sizes {} vs {}", role, g.size(), w.size()));
        for (std::size_t i = 0; i < std::min(g.size(), w.size()); ++i) {
            const bool same = g[i].address == w[i].address && g[i].tx_count == w[i].tx_count && g[i].role == w[i].role &&
                              g[i].total_value_wei == w[i].total_value_wei &&
                              within_one_ulp(g[i].avg_gas_price_gwei, w[i].avg_gas_price_gwei);
            v.require(same, fmt::format("{} rank {} differs", role, i + 1));
            if (i > 0 && w[i].tx_count == w[i - 1].tx_count) ++ties;
        }
    };
    compare(got.senders, want.senders, "sender");
    compare(got.receivers, want.receivers, "receiver");
    const double elapsed = seconds_since(t0);
    v.require(elapsed < 10.0, fmt::format("took {:.2f} s", elapsed));
    if (v.pass) v.detail = fmt::format("{} txs, 2x20 ranks, {} tied neighbours, {:.2f} s", txs.size(), ties, elapsed);
    return v;
}

// ---------------------------------------------------------------------------------------------
// AC6 runs the real executable: a realtime mock, one uninterrupted watcher and one that is killed.

struct Child {
    pid_t pid{-1};
    int stdout_fd{-1};
};

Child spawn(const std::vector<std::string>& args, const std::optional<fs::path>& stdout_file) {
    int pipefd[2] = {-1, -1};
    if (!stdout_file && ::pipe(pipefd) != 0) throw std::runtime_error("pipe failed");
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        int fd = -1;
        if (stdout_file) {
            fd = ::open(stdout_file->c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
        } else {
            ::close(pipefd[0]);
            fd = pipefd[1];
        }
        ::dup2(fd, STDOUT_FILENO);
        const int devnull = ::open("/dev/null", O_WRONLY);
        ::dup2(devnull, STDERR_FILENO);
        std::vector<char*> argv;
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        ::execv(argv[0], argv.data());
        ::_exit(127);
    }
    if (!stdout_file) ::close(pipefd[1]);
    return {pid, stdout_file ? -1 : pipefd[0]};
}

int wait_exit(pid_t pid) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in{p};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::optional<double> summary_field(const std::string& text, const std::string& key) {
    const auto at = text.rfind(key + "=");
    if (at == std::string::npos) return std::nullopt;
    return std::stod(text.substr(at + key.size() + 1));
}

std::vector<BlockRecord> committed_blocks(const fs::path& dir) {
    auto blocks = sink::canonical_view(sink::replay(dir / "records.jsonl")).blocks;
    for (auto& b : blocks) {
        b.observed_at = 0;
        for (auto& t : b.transactions) t.first_seen_block.reset();
    }
    return blocks;
}

std::vector<std::uint64_t> datapoint_indices(const fs::path& dir) {
    std::vector<std::uint64_t> out;
    std::ifstream in{dir / "datapoints.jsonl"};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(json::parse(line).at("datapoint").get<std::uint64_t>());
    }
    return out;
}

std::size_t gaps(const std::vector<BlockRecord>& blocks) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        if (blocks[i].number != blocks[i - 1].number + 1) ++n;
    }
    return n;
}

Verdict ac6_session_protocol() {
    Verdict v;
    const std::string bin = CHAINWATCH_BIN;
    const auto dir = work_dir() / "ac6";
    fs::create_directories(dir);

    const Child mock = spawn({bin, "mock", "--port", "0", "--seed", "6", "--realtime-ms", "150", "--traffic", "6"},
                             std::nullopt);
    std::string url;
    if (FILE* f = ::fdopen(mock.stdout_fd, "r")) {
        char line[512];
        if (std::fgets(line, sizeof line, f) != nullptr) {
            std::istringstream words{line};
            std::string w;
            while (words >> w) {
                if (w.rfind("http://", 0) == 0) url = w;
            }
        }
        std::fclose(f);
    }
    if (url.empty()) {
        ::kill(mock.pid, SIGKILL);
        wait_exit(mock.pid);
        v.require(false, "mock did not report a URL");
        return v;
    }

    auto watch_args = [&](const fs::path& out_dir) {
        return std::vector<std::string>{bin,         "watch",     "--endpoint",       url,   "--poll-interval",
                                        "0.1",       "--datapoint-interval", "0.1",   "--datapoints", "100",
                                        "--start-block", "0",     "--max-retries",    "1",   "--out-dir",
                                        out_dir.string()};
    };
    const auto a_dir = dir / "uninterrupted";
    const auto b_dir = dir / "restarted";
    const Child a = spawn(watch_args(a_dir), dir / "a.out");
    const Child b = spawn(watch_args(b_dir), dir / "b.out");

    std::this_thread::sleep_for(std::chrono::milliseconds{4300});
    ::kill(b.pid, SIGKILL);
    const int b_first = wait_exit(b.pid);
    const auto b_before = datapoint_indices(b_dir).size();
    const Child b2 = spawn(watch_args(b_dir), dir / "b.out");

    const int a_code = wait_exit(a.pid);
    const int b_code = wait_exit(b2.pid);
    ::kill(mock.pid, SIGTERM);
    wait_exit(mock.pid);

    const auto a_out = slurp(dir / "a.out");
    const auto b_out = slurp(dir / "b.out");
    v.require(a_code == 0, fmt::format("uninterrupted watcher exited {}", a_code));
    v.require(b_first == -SIGKILL, "second watcher was not killed");
    v.require(b_code == 0, fmt::format("restarted watcher exited {}", b_code));
    v.require(b_before > 0 && b_before < 100, fmt::format("kill landed after {} datapoints", b_before));
    v.require(b_out.find("resuming at block") != std::string::npos, "restart did not resume");

    const auto duration = summary_field(a_out, "duration_s");
    v.require(duration && std::abs(*duration - 10.0) <= 0.5,
              fmt::format("duration {:.3f} s", duration.value_or(-1)));

    std::vector<std::uint64_t> expected(100);
    std::iota(expected.begin(), expected.end(), 1);
    v.require(datapoint_indices(a_dir) == expected, "uninterrupted run did not commit datapoints 1..100 once each");
    v.require(datapoint_indices(b_dir) == expected, "restarted run did not commit datapoints 1..100 once each");

    const auto ablocks = committed_blocks(a_dir);
    const auto bblocks = committed_blocks(b_dir);
    v.require(!ablocks.empty() && ablocks.front().number == 1, "uninterrupted run does not start at block 1");
    v.require(!bblocks.empty() && bblocks.front().number == 1, "restarted run does not start at block 1");
    v.require(gaps(ablocks) == 0, fmt::format("{} gaps in the uninterrupted run", gaps(ablocks)));
    v.require(gaps(bblocks) == 0, fmt::format("{} gaps in the restarted run", gaps(bblocks)));
    const auto common = std::min(ablocks.size(), bblocks.size());
    v.require(common >= 30, fmt::format("only {} blocks in common", common));
    v.require(std::equal(ablocks.begin(), ablocks.begin() + static_cast<std::ptrdiff_t>(common), bblocks.begin()),
              "block streams differ");

    if (v.pass) {
        v.detail = fmt::format("duration_s={:.3f}, 100/100 datapoints both runs, killed after {}, {} equal blocks, 0 gaps",
                               *duration, b_before, common);
    }
    return v;
}

// ---------------------------------------------------------------------------------------------

struct AlertRun {
    std::vector<alerts::AlertEvent> events;
    std::size_t cycles{0};
};

AlertRun run_alert_scenario() {
    mock::ChainConfig cfg;
    cfg.seed = 77;
    auto chain = std::make_shared<mock::MockChain>(cfg);
    mock::TrafficGenerator traffic{77};
    const RpcClient client{std::make_shared<mock::InProcessTransport>(chain), no_wait()};
    collector::CollectorConfig ccfg;
    ccfg.poll_interval_s = 60;
    TimestampMs now = 1'700'000'000'000;
    collector::Collector col{client, in_process_endpoint(), ccfg, [&] { return now; }};
    collector::CollectorCheckpoint cp{0, chain->block(0).hash, 0, 0};

    auto rules = alerts::default_rules();
    for (auto& r : rules) {
        if (r.metric_name == metric_names::kBlockIntervalS) r.threshold = 2 * cfg.block_period_s;
    }
    alerts::AlertEvaluator evaluator{rules};
    AlertRun run;

    auto poll = [&] {
        now += 60'000;
        const auto r = col.run_poll_cycle(cp);
        cp = r.checkpoint;
        for (const auto& p : r.points) {
            auto e = evaluator.observe(p);
            run.events.insert(run.events.end(), e.begin(), e.end());
        }
        auto e = evaluator.tick(r.at);
        run.events.insert(run.events.end(), e.begin(), e.end());
        ++run.cycles;
    };
    auto produce = [&] {
        traffic.submit(*chain, 5);
        (void)chain->advance_block();
    };

    for (int i = 0; i < 5; ++i) {
        produce();
        poll();
    }
    chain->inject_fault(mock::Outage{std::chrono::hours{1}});
    for (int i = 0; i < 3; ++i) {
        produce();
        poll();
    }
    chain->inject_fault(mock::Outage{std::chrono::milliseconds{0}});
    for (int i = 0; i < 4; ++i) {
        produce();
        poll();
    }
    chain->inject_fault(mock::SlowBlock{5.0});
    for (int i = 0; i < 5; ++i) {
        produce();
        poll();
    }
    return run;
}

Verdict ac7_alert_lifecycle() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto first = run_alert_scenario();
    const auto second = run_alert_scenario();
    auto count = [&](const std::string& rule, alerts::AlertState state) {
        return std::count_if(first.events.begin(), first.events.end(),
                             [&](const auto& e) { return e.rule_id == rule && e.state == state; });
    };
    const auto avail_fired = count("rpc_unavailable", alerts::AlertState::firing);
    const auto avail_resolved = count("rpc_unavailable", alerts::AlertState::resolved);
    const auto slow_fired = count("block_interval_long", alerts::AlertState::firing);
    v.require(avail_fired == 1 && avail_resolved == 1,
              fmt::format("availability fired {} resolved {}", avail_fired, avail_resolved));
    v.require(slow_fired == 1, fmt::format("block interval fired {}", slow_fired));
    v.require(first.events.size() == static_cast<std::size_t>(avail_fired + avail_resolved + slow_fired +
                                                               count("block_interval_long", alerts::AlertState::resolved)),
              fmt::format("{} unexpected events", first.events.size()));
    v.require(first.events == second.events, "two runs with one seed disagree");
    const double elapsed = seconds_since(t0);
    v.require(elapsed < 20.0, fmt::format("took {:.2f} s", elapsed));
    if (v.pass) {
        v.detail = fmt::format("{} polls, availability 1 fired/1 resolved, block interval 1 fired, deterministic, {:.2f} s",
                               first.cycles, elapsed);
    }
    return v;
}

// ---------------------------------------------------------------------------------------------

std::vector<Record> seeded_pipeline(std::uint64_t seed) {
    // blocks hold 35 transfers against 40 arrivals, so blocks run full and a backlog stays visible as pending
    auto chain = std::make_shared<mock::MockChain>(mock::ChainConfig{.seed = seed, .block_gas_limit = 21'000 * 35});
    mock::TrafficGenerator traffic{seed};
    const RpcClient client{std::make_shared<mock::InProcessTransport>(chain), no_wait()};
    TimestampMs now = 1'700'000'000'000;
    collector::Collector col{client, in_process_endpoint(), {}, [&] { return now; }};
    collector::CollectorCheckpoint cp{0, chain->block(0).hash, 0, 0};
    std::vector<Record> out;
    for (int i = 0; i < 60; ++i) {
        traffic.submit(*chain, 40);
        (void)chain->advance_block();
        now += 12'000;
        auto r = col.run_poll_cycle(cp);
        cp = r.checkpoint;
        auto recs = r.records();
        out.insert(out.end(), recs.begin(), recs.end());
        out.insert(out.end(), r.points.begin(), r.points.end());
    }
    return out;
}

Verdict ac8_serialization() {
    Verdict v;
    const auto dir = work_dir() / "ac8";
    fs::create_directories(dir);

    const auto records = testing::random_records(88, 10'000);
    const auto path = dir / "mixed.jsonl";
    sink::write_records(records, path);
    v.require(sink::replay(path) == records, "10k mixed records did not round-trip");

    std::vector<MetricPoint> points;
    for (const auto& r : records) {
        if (const auto* p = std::get_if<MetricPoint>(&r)) points.push_back(*p);
    }
    const auto pipeline = seeded_pipeline(8);
    for (const auto& r : pipeline) {
        if (const auto* p = std::get_if<MetricPoint>(&r)) points.push_back(*p);
    }
    const auto emf = sink::export_emf(points, "Chainwatch");
    std::size_t bad_lines = 0;
    for (const auto& line : emf.lines) {
        if (!testing::validate_emf_line(line).empty()) ++bad_lines;
    }
    v.require(bad_lines == 0, fmt::format("{} of {} EMF lines invalid", bad_lines, emf.lines.size()));
    v.require(!emf.lines.empty(), "no EMF output");

    std::size_t csv_bytes = 0;
    for (const auto figure : {sink::Figure::fig1, sink::Figure::fig2, sink::Figure::fig3, sink::Figure::fig4}) {
        const auto name = std::string{sink::to_string(figure)};
        const auto first = dir / (name + "-a.csv");
        const auto second = dir / (name + "-b.csv");
        sink::emit_figure_csv(seeded_pipeline(8), figure, first);
        sink::emit_figure_csv(seeded_pipeline(8), figure, second);
        const auto a = slurp(first);
        v.require(a == slurp(second), name + " differs between runs");
        v.require(std::count(a.begin(), a.end(), '\n') > 1, name + " has no rows");
        csv_bytes += a.size();
    }
    if (v.pass) {
        v.detail = fmt::format("10000 records exact, {} EMF lines valid ({} rejected), 4 CSVs identical ({} bytes)",
                               emf.lines.size(), emf.rejected.size(), csv_bytes);
    }
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"AC1", ac1_capability_matrix}, {"AC2", ac2_filter_oracle},    {"AC3", ac3_fee_priority},
        {"AC4", ac4_eth_volume},        {"AC5", ac5_top_addresses},    {"AC6", ac6_session_protocol},
        {"AC7", ac7_alert_lifecycle},   {"AC8", ac8_serialization},
    };
    int failures = 0;
    for (const auto& [id, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string{"exception: "} + e.what();
        }
        std::cout << id << (v.pass ? " PASS " : " FAIL ") << v.detail << std::endl;
        if (!v.pass) ++failures;
    }
    fs::remove_all(work_dir());
    return failures == 0 ? 0 : 1;
}
