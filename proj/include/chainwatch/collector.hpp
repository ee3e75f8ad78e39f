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

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include <chainwatch/records.hpp>
#include <chainwatch/rpc_client.hpp>

namespace chainwatch::collector {

struct CollectorCheckpoint {
    std::uint64_t last_block_number{0};
    std::string last_block_hash;  // empty before the first committed block: no parent check
    std::uint64_t datapoints_emitted{0};
    TimestampMs updated_at{0};

    bool operator==(const CollectorCheckpoint&) const = default;
};

class CheckpointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const CollectorCheckpoint& cp);
//! Throws CheckpointError on missing fields or wrong types.
CollectorCheckpoint checkpoint_from_json(const nlohmann::json& j);

//! Write to a temp file, fsync, rename over `path`, fsync the directory.
void save_checkpoint(const CollectorCheckpoint& cp, const std::filesystem::path& path);

//! A missing file yields a fresh checkpoint at `start_block`; a corrupt one throws CheckpointError.
CollectorCheckpoint load_checkpoint(const std::filesystem::path& path, std::uint64_t start_block);

struct CollectorConfig {
    double poll_interval_s{10.0};
    double datapoint_interval_s{60.0};
    std::uint64_t start_block{0};
    unsigned reorg_depth{6};
    bool track_pending{true};
    std::uint64_t max_blocks_per_cycle{256};
};

class MalformedBlock : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

//! Decodes an eth_getBlockByNumber result fetched with full transactions.
BlockRecord block_from_rpc(const nlohmann::json& j, TimestampMs observed_at);
TxRecord tx_from_rpc(const nlohmann::json& j);

struct ReorgDecision {
    enum class Kind { none, rollback, too_deep, unresolved };
    Kind kind{Kind::none};
    std::uint64_t join{0};  // rollback target
    //! Locally known blocks the node no longer has, highest first.
    std::vector<SupersededMarker> superseded;
    std::string detail;
};

struct CycleResult {
    CollectorCheckpoint checkpoint;
    std::vector<BlockRecord> blocks;
    std::optional<MempoolSnapshot> mempool;
    std::vector<MetricPoint> points;
    std::vector<SupersededMarker> superseded;
    std::optional<ResetMarker> reset;
    bool available{false};  // head fetched and no transport failure during the cycle
    std::vector<std::string> errors;
    TimestampMs at{0};
    std::vector<Record> log;  // blocks and markers in the order they were produced

    //! `log` followed by the mempool snapshot.
    [[nodiscard]] std::vector<Record> records() const;
};

//! Turns RPC polls into a gap-free block stream. Single writer of its checkpoint.
class Collector {
  public:
    using Clock = std::function<TimestampMs()>;

    Collector(const RpcClient& client, Endpoint endpoint, CollectorConfig config, Clock clock = now_ms);

    //! Primes the walk-back window, e.g. from a replayed sink after a restart.
    void seed_history(std::span<const BlockRecord> committed);

    CycleResult run_poll_cycle(const CollectorCheckpoint& checkpoint);

    //! `new_block` must sit directly above the checkpoint. Re-fetches ancestors up to the configured depth.
    ReorgDecision detect_reorg(const BlockRecord& new_block, const CollectorCheckpoint& checkpoint);

    [[nodiscard]] const CollectorConfig& config() const { return config_; }
    [[nodiscard]] const Endpoint& endpoint() const { return endpoint_; }
    [[nodiscard]] TimestampMs now() const { return clock_(); }

    //! Current head of the node, or nullopt when unreachable.
    std::optional<std::uint64_t> fetch_head();

  private:
    struct Known {
        std::uint64_t number;
        std::string hash;
        std::uint64_t timestamp;
    };

    RpcResult call(std::string_view method, nlohmann::json params, TimestampMs at, CycleResult& cycle);
    std::optional<BlockRecord> fetch_block(std::uint64_t number, TimestampMs at, CycleResult& cycle);
    const Known* known(std::uint64_t number) const;
    void remember(const BlockRecord& block);
    void emit_block_metrics(const BlockRecord& block, TimestampMs at, CycleResult& cycle);
    void observe_pending(std::uint64_t head, TimestampMs at, CycleResult& cycle);
    ReorgDecision walk_back(const BlockRecord& new_block, const CollectorCheckpoint& checkpoint, TimestampMs at,
                            CycleResult& cycle);

    const RpcClient& client_;
    Endpoint endpoint_;
    CollectorConfig config_;
    Clock clock_;
    std::deque<Known> recent_;
    std::unordered_map<std::string, std::uint64_t> first_seen_;
    bool transport_failed_{false};
};

struct SessionConfig {
    double poll_interval_s{10.0};
    double datapoint_interval_s{60.0};
    std::uint64_t datapoint_target{1000};
};

//! The batch committed on the datapoint cadence: everything collected since the previous one.
struct Datapoint {
    std::uint64_t index{0};  // 1-based, continues across restarts
    TimestampMs emitted_at{0};
    CollectorCheckpoint checkpoint;
    std::vector<Record> records;
    std::vector<MetricPoint> points;
};

struct SessionHooks {
    std::function<void(const CycleResult&)> on_cycle;
    //! Must persist the batch; the session treats a throw as fatal.
    std::function<void(const Datapoint&)> on_datapoint;
};

struct SessionSummary {
    std::uint64_t cycles{0};
    std::uint64_t missed_deadlines{0};
    std::uint64_t failed_cycles{0};
    std::uint64_t datapoints{0};
    std::uint64_t blocks{0};
    std::uint64_t txs{0};
    double duration_s{0};
    bool interrupted{false};
};

//! Polls on a fixed cadence (deadline i = start + i * poll) and commits a datapoint at every
//! start + k * datapoint_interval until checkpoint.datapoints_emitted reaches the target.
//! A poll interval longer than the datapoint interval is clamped to it.
SessionSummary run_session(Collector& collector, CollectorCheckpoint& checkpoint, const SessionConfig& config,
                           const SessionHooks& hooks, const std::atomic<bool>* stop = nullptr);

}  // namespace chainwatch::collector
