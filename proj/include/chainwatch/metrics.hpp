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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <chainwatch/records.hpp>

//! Derived performance metrics. Every function here is pure; wei and gas arithmetic stays in
//! integers and only the final ratio is converted to floating point.
namespace chainwatch::metrics {

class InvalidBlock : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class NotYetIncluded : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class EmptyWindow : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kHighEfficiencyThreshold = 0.90;
inline constexpr std::size_t kTopAddressCount = 20;

//! gas_used / gas_limit. Throws InvalidBlock for a zero limit or gas_used > gas_limit.
double gas_utilization(const BlockRecord& block);

struct HighEfficiencyBlock {
    std::uint64_t number{0};
    double utilization{0};
    std::uint64_t tx_count{0};

    bool operator==(const HighEfficiencyBlock&) const = default;
};

//! Blocks whose utilization is strictly above `threshold`, in input order.
std::vector<HighEfficiencyBlock> filter_high_efficiency(std::span<const BlockRecord> blocks,
                                                        double threshold = kHighEfficiencyThreshold);

//! inclusion_block - first_seen_block; throws NotYetIncluded when either is missing.
std::uint64_t inclusion_delay(const TxRecord& tx);

struct DelayPricePoint {
    double gas_price_gwei{0};
    std::uint64_t delay_blocks{0};

    bool operator==(const DelayPricePoint&) const = default;
};

std::vector<DelayPricePoint> delay_price_series(std::span<const TxRecord> txs);

struct EthTransferred {
    BigUint total_wei{0};
    double total_eth{0};  // display only
};

EthTransferred eth_transferred(const BlockRecord& block);

enum class AddressRole { sender, receiver };

std::string_view to_string(AddressRole role);

struct AddressActivity {
    std::string address;
    std::uint64_t tx_count{0};
    AddressRole role{AddressRole::sender};
    double avg_gas_price_gwei{0};
    BigUint total_value_wei{0};

    bool operator==(const AddressActivity&) const = default;
};

struct TopAddresses {
    std::vector<AddressActivity> senders;
    std::vector<AddressActivity> receivers;
};

//! Senders and receivers ranked separately by tx_count descending, ties by address ascending.
//! Averages are role-scoped: a receiver's average uses the gas prices of the transactions it received.
TopAddresses top_addresses(std::span<const TxRecord> txs, std::size_t n = kTopAddressCount);

//! Half-open [from, to) window on observed_at.
struct TimeWindow {
    TimestampMs from{0};
    TimestampMs to{0};
};

struct LatencyStats {
    double p50{0};
    double p95{0};
    double max{0};
    double success_rate{0};
    std::size_t samples{0};
};

//! Nearest-rank percentile (percent in 1..100) of an ascending-sorted, non-empty sample.
double nearest_rank(std::span<const double> sorted, unsigned percent);

//! Stats over the millisecond-unit points in the window. A point counts as successful unless its
//! "outcome" dimension says otherwise. Throws EmptyWindow when nothing falls in the window.
LatencyStats latency_stats(std::span<const MetricPoint> points, std::optional<TimeWindow> window = std::nullopt);

struct BlockIntervalStats {
    double mean_s{0};
    double max_s{0};
    bool stalled{false};
};

//! Intervals between consecutive block timestamps. stalled = now - last timestamp > threshold.
//! Throws InsufficientData for fewer than two blocks.
BlockIntervalStats block_interval_stats(std::span<const BlockRecord> blocks, std::uint64_t now_unix_s,
                                        double stall_threshold_s);

//! One mempool.pending point per snapshot, chronological.
std::vector<MetricPoint> mempool_series(std::span<const MempoolSnapshot> snapshots);

}  // namespace chainwatch::metrics
