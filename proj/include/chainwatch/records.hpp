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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <chainwatch/quantity.hpp>

namespace chainwatch {

//! UTC wall-clock milliseconds since the unix epoch.
using TimestampMs = std::int64_t;

TimestampMs now_ms();

//! True when `s` is "0x" followed by exactly 2*bytes hex digits.
bool is_hex_bytes(std::string_view s, std::size_t bytes);

struct TxRecord {
    std::string tx_hash;
    std::string sender;
    std::optional<std::string> recipient;  // absent for contract creation
    Uint256 value_wei{0};
    Uint256 gas_price_wei{0};
    std::uint64_t gas_limit{0};
    std::optional<std::uint64_t> first_seen_block;
    std::optional<std::uint64_t> inclusion_block;

    bool operator==(const TxRecord&) const = default;
};

struct BlockRecord {
    std::uint64_t number{0};
    std::string hash;
    std::string parent_hash;
    std::uint64_t timestamp{0};  // unix seconds
    std::uint64_t gas_used{0};
    std::uint64_t gas_limit{0};
    std::uint64_t tx_count{0};
    std::vector<TxRecord> transactions;
    TimestampMs observed_at{0};

    bool operator==(const BlockRecord&) const = default;
};

struct MempoolSnapshot {
    std::uint64_t pending{0};
    std::uint64_t queued{0};
    TimestampMs observed_at{0};
    std::uint64_t head_block{0};

    bool operator==(const MempoolSnapshot&) const = default;
};

enum class Unit { ratio, blocks, wei, eth, gwei, ms, count, seconds };

std::string_view to_string(Unit unit);
std::optional<Unit> unit_from_string(std::string_view s);

struct MetricPoint {
    std::string name;
    double value{0};
    Unit unit{Unit::count};
    std::map<std::string, std::string> dimensions;
    TimestampMs observed_at{0};

    bool operator==(const MetricPoint&) const = default;
};

//! Appended after a reorg rollback: the block line with this hash is no longer canonical.
struct SupersededMarker {
    std::uint64_t number{0};
    std::string hash;
    TimestampMs marked_at{0};

    bool operator==(const SupersededMarker&) const = default;
};

//! Appended when a reorg exceeds the walk-back bound and collection restarts at a fresh head.
//! Block numbers are contiguous within each segment between resets.
struct ResetMarker {
    std::uint64_t resumed_at{0};
    std::string reason;
    TimestampMs marked_at{0};

    bool operator==(const ResetMarker&) const = default;
};

using Record = std::variant<BlockRecord, TxRecord, MempoolSnapshot, MetricPoint, SupersededMarker, ResetMarker>;

namespace metric_names {
    inline constexpr std::string_view kRpcLatencyMs = "rpc.latency_ms";
    inline constexpr std::string_view kRpcSuccess = "rpc.success";
    inline constexpr std::string_view kChainHead = "chain.head";
    inline constexpr std::string_view kBlockGasUtilization = "block.gas_utilization";
    inline constexpr std::string_view kBlockTxCount = "block.tx_count";
    inline constexpr std::string_view kBlockEthTransferredWei = "block.eth_transferred_wei";
    inline constexpr std::string_view kBlockIntervalS = "block.interval_s";
    inline constexpr std::string_view kMempoolPending = "mempool.pending";
    inline constexpr std::string_view kMempoolQueued = "mempool.queued";
    inline constexpr std::string_view kTxInclusionDelayBlocks = "tx.inclusion_delay_blocks";
}  // namespace metric_names

//! The fixed metric registry: every emitted name and its unit.
const std::map<std::string, Unit, std::less<>>& metric_registry();

//! Builds a point whose unit comes from the registry. Throws std::invalid_argument for unknown names.
MetricPoint make_point(std::string_view name, double value, TimestampMs at,
                       std::map<std::string, std::string> dimensions = {});

}  // namespace chainwatch
