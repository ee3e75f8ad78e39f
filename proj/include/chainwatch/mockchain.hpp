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

#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include <chainwatch/records.hpp>
#include <chainwatch/rpc_client.hpp>

namespace httplib {
class Server;
}

namespace chainwatch::mock {

enum class Profile { amb, permissive };

std::string_view to_string(Profile p);
std::optional<Profile> profile_from_string(std::string_view s);

struct ChainConfig {
    std::uint64_t seed{1};
    std::uint64_t block_gas_limit{30'000'000};
    double block_period_s{12.0};
    Profile profile{Profile::amb};
    std::vector<std::pair<std::string, Uint256>> initial_accounts;  // generated from the seed when empty
    std::uint64_t genesis_timestamp{1'700'000'000};

    void validate() const;
};

//! JSON-RPC error raised by chain operations; mirrors the node's error object.
class MockRpcError : public std::runtime_error {
  public:
    MockRpcError(std::int64_t code, const std::string& message) : std::runtime_error(message), code_{code} {}
    [[nodiscard]] std::int64_t code() const { return code_; }

  private:
    std::int64_t code_;
};

struct Outage {
    std::chrono::milliseconds duration{0};
};
struct AddedLatency {
    std::chrono::milliseconds added{0};
};
struct SlowBlock {
    double factor{1.0};
};
struct Fork {
    std::uint64_t depth{0};
};
using Fault = std::variant<Outage, AddedLatency, SlowBlock, Fork>;

//! Parses {"kind":"outage","duration_ms":..} / latency(added_ms) / slow_block(factor) / fork(depth).
Fault fault_from_json(const nlohmann::json& j);

struct PendingTx {
    std::string hash;
    std::string sender;
    std::optional<std::string> recipient;
    Uint256 value_wei{0};
    Uint256 gas_price_wei{0};
    std::uint64_t gas_units{0};
    std::uint64_t arrival_sequence{0};
    std::uint64_t submitted_at_block{0};
    std::uint64_t nonce{0};
};

//! Pool order: gas price descending, then arrival ascending.
struct PoolOrder {
    bool operator()(const PendingTx& a, const PendingTx& b) const {
        if (a.gas_price_wei != b.gas_price_wei) return a.gas_price_wei > b.gas_price_wei;
        return a.arrival_sequence < b.arrival_sequence;
    }
};

struct InclusionLogEntry {
    std::string tx_hash;
    Uint256 gas_price_wei{0};
    std::uint64_t submitted_at_block{0};
    std::uint64_t inclusion_block{0};

    [[nodiscard]] std::uint64_t delay() const { return inclusion_block - submitted_at_block; }
    bool operator==(const InclusionLogEntry&) const = default;
};

//! Deterministic in-memory chain with a strict gas-price-priority fee market.
//! All public members are thread-safe; state changes are serialized by one mutex.
class MockChain {
  public:
    explicit MockChain(ChainConfig config);

    [[nodiscard]] const ChainConfig& config() const { return config_; }

    //! Throws MockRpcError when the sender cannot cover value + gas_price * gas_units on top of
    //! what its already-pending transactions commit, or when gas_units exceeds the block gas limit.
    std::string submit_tx(const std::string& sender, const std::optional<std::string>& recipient,
                          const Uint256& value_wei, const Uint256& gas_price_wei, std::uint64_t gas_units);

    //! Packs pending transactions first-fit in pool order and seals the next block.
    BlockRecord advance_block();

    //! Applies a fault; throws std::invalid_argument for a fork at or beyond the chain height.
    std::string inject_fault(const Fault& fault);

    //! Answers one JSON-RPC 2.0 request object.
    nlohmann::json handle_request(const nlohmann::json& request);

    [[nodiscard]] std::uint64_t head_number() const;
    [[nodiscard]] BlockRecord block(std::uint64_t number) const;
    [[nodiscard]] std::vector<InclusionLogEntry> inclusion_log() const;
    [[nodiscard]] std::vector<PendingTx> pool() const;
    [[nodiscard]] std::size_t pool_size() const;
    [[nodiscard]] Uint256 balance(const std::string& address) const;
    [[nodiscard]] std::vector<std::string> accounts() const;
    //! Sum of all balances plus all fees paid; constant across blocks.
    [[nodiscard]] BigUint total_supply() const;

    [[nodiscard]] bool outage_active() const;
    [[nodiscard]] std::chrono::steady_clock::time_point outage_until() const;
    [[nodiscard]] std::chrono::milliseconds added_latency() const;
    //! Multiplier for the gap before the next block (1.0 unless a slow block is pending).
    [[nodiscard]] double next_block_gap_factor() const;

  private:
    BlockRecord seal_block_locked();
    void rewind_block_locked();
    nlohmann::json dispatch_locked(const std::string& method, const nlohmann::json& params);
    std::optional<std::uint64_t> resolve_tag_locked(const nlohmann::json& tag) const;
    nlohmann::json tx_json_locked(const TxRecord& tx, std::optional<std::uint64_t> block, std::size_t index) const;
    nlohmann::json pending_tx_json(const PendingTx& tx) const;
    nlohmann::json block_json_locked(std::uint64_t number, bool full) const;
    nlohmann::json pending_block_json_locked(bool full) const;

    ChainConfig config_;
    mutable std::mutex mutex_;

    std::vector<BlockRecord> blocks_;  // index == number; genesis at 0
    std::set<PendingTx, PoolOrder> pool_;
    std::map<std::string, Uint256> balances_;
    std::map<std::string, BigUint> committed_;  // value + max fee of pending txs per sender
    std::map<std::string, std::uint64_t> nonces_;
    std::map<std::string, std::pair<std::uint64_t, std::size_t>> tx_location_;
    std::map<std::string, PendingTx> included_meta_;  // tx hash -> pending form, for fork rewind
    std::vector<InclusionLogEntry> inclusion_log_;
    BigUint fees_paid_{0};
    std::uint64_t arrival_counter_{0};
    std::uint64_t fork_generation_{0};
    double next_gap_factor_{1.0};
    std::vector<double> block_offsets_s_;  // seconds since genesis per block
    std::chrono::milliseconds added_latency_{0};
    std::chrono::steady_clock::time_point outage_until_{};
};

std::string sha256_hex(std::string_view data);

//! Seeded random transaction source over a chain's funded accounts.
class TrafficGenerator {
  public:
    struct Ranges {
        std::uint64_t min_gas_price_gwei{1};
        std::uint64_t max_gas_price_gwei{200};
        std::uint64_t min_gas_units{21'000};
        std::uint64_t max_gas_units{21'000};
        std::uint64_t max_value_gwei{1'000'000'000};  // 1 ETH
    };

    TrafficGenerator(std::uint64_t seed, Ranges ranges);
    explicit TrafficGenerator(std::uint64_t seed) : TrafficGenerator(seed, Ranges{}) {}

    std::vector<std::string> submit(MockChain& chain, std::size_t count);

  private:
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

    std::mt19937_64 rng_;
    Ranges ranges_;
};

//! Routes RPC calls straight into a MockChain, honoring outage and latency faults.
class InProcessTransport final : public Transport {
  public:
    explicit InProcessTransport(std::shared_ptr<MockChain> chain) : chain_{std::move(chain)} {}
    TransportReply post(const Endpoint& endpoint, const std::string& body) override;

  private:
    std::shared_ptr<MockChain> chain_;
};

struct ServeOptions {
    std::string host{"127.0.0.1"};
    int port{0};  // 0 = any free port
    //! Wall-clock block production; empty means blocks only advance on request.
    std::optional<std::chrono::milliseconds> realtime_block_interval;
    std::size_t traffic_per_block{0};
    TrafficGenerator::Ranges traffic_ranges{};
};

class PortInUse : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! HTTP JSON-RPC front end for a MockChain plus the loopback-only sideband
//! (GET /__inclusion_log, GET /__pool, GET /__head, POST /__advance, /__submit, /__fault).
class MockServer {
  public:
    MockServer(std::shared_ptr<MockChain> chain, ServeOptions options);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    [[nodiscard]] std::string url() const;
    [[nodiscard]] int port() const { return port_; }
    [[nodiscard]] MockChain& chain() { return *chain_; }

    std::string inject_fault(const Fault& fault);

  private:
    void start_listener();
    void stop_listener();
    void supervise();
    void produce();
    void install_routes(httplib::Server& server);

    std::shared_ptr<MockChain> chain_;
    ServeOptions options_;
    int port_{0};
    std::unique_ptr<TrafficGenerator> traffic_;

    std::mutex mutex_;
    std::condition_variable cv_;
    bool stopping_{false};
    std::unique_ptr<httplib::Server> server_;
    std::thread listen_thread_;
    std::thread supervisor_;
    std::thread producer_;
};

class ScriptError : public std::runtime_error {
  public:
    ScriptError(std::size_t line, const std::string& what)
        : std::runtime_error("script line " + std::to_string(line) + ": " + what), line_{line} {}
    [[nodiscard]] std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

//! Executes a demo script, one command per line ('#' starts a comment):
//!   advance [n]
//!   submit <sender> <recipient|-> <value_wei> <gas_price_wei> <gas_units>
//!   traffic <count>
//!   fault outage <ms> | fault latency <ms> | fault slow_block <factor> | fault fork <depth>
//!   sleep <ms>
//! Faults go through `apply_fault` so a server can refuse connections during outages.
void run_script(std::istream& in, MockChain& chain, TrafficGenerator& traffic,
                const std::function<std::string(const Fault&)>& apply_fault);

}  // namespace chainwatch::mock
