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

#include <chainwatch/metrics.hpp>

#include <algorithm>
#include <map>

namespace chainwatch::metrics {

namespace {
    constexpr std::uint64_t kExactDoubleLimit = 1ULL << 53;
}

double gas_utilization(const BlockRecord& block) {
    if (block.gas_limit == 0) throw InvalidBlock("block " + std::to_string(block.number) + " has zero gas limit");
    if (block.gas_used > block.gas_limit) {
        throw InvalidBlock("block " + std::to_string(block.number) + " uses more gas than its limit");
    }
    if (block.gas_limit <= kExactDoubleLimit) {
        return static_cast<double>(block.gas_used) / static_cast<double>(block.gas_limit);
    }
    return ratio_to_double(BigUint{block.gas_used}, BigUint{block.gas_limit});
}

std::vector<HighEfficiencyBlock> filter_high_efficiency(std::span<const BlockRecord> blocks, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in (0, 1]");
    std::vector<HighEfficiencyBlock> out;
    for (const auto& b : blocks) {
        const double u = gas_utilization(b);
        if (u > threshold) out.push_back({b.number, u, b.tx_count});
    }
    return out;
}

std::uint64_t inclusion_delay(const TxRecord& tx) {
    if (!tx.first_seen_block || !tx.inclusion_block) throw NotYetIncluded("transaction " + tx.tx_hash + " is not yet included");
    if (*tx.inclusion_block < *tx.first_seen_block) {
        throw std::invalid_argument("transaction " + tx.tx_hash + " included before it was first seen");
    }
    return *tx.inclusion_block - *tx.first_seen_block;
}

std::vector<DelayPricePoint> delay_price_series(std::span<const TxRecord> txs) {
    std::vector<DelayPricePoint> out;
    out.reserve(txs.size());
    for (const auto& tx : txs) {
        out.push_back({ratio_to_double(BigUint{tx.gas_price_wei}, BigUint{kWeiPerGwei}), inclusion_delay(tx)});
    }
    return out;
}

EthTransferred eth_transferred(const BlockRecord& block) {
    EthTransferred out;
    for (const auto& tx : block.transactions) out.total_wei += BigUint{tx.value_wei};
    out.total_eth = ratio_to_double(out.total_wei, kWeiPerEth);
    return out;
}

std::string_view to_string(AddressRole role) { return role == AddressRole::sender ? "sender" : "receiver"; }

TopAddresses top_addresses(std::span<const TxRecord> txs, std::size_t n) {
    if (n == 0) throw std::invalid_argument("top_addresses needs n >= 1");

    struct Tally {
        std::uint64_t count{0};
        BigUint gas_price_sum{0};
        BigUint value_sum{0};
    };
    std::map<std::string, Tally> sent;
    std::map<std::string, Tally> received;
    for (const auto& tx : txs) {
        auto& s = sent[tx.sender];
        ++s.count;
        s.gas_price_sum += BigUint{tx.gas_price_wei};
        s.value_sum += BigUint{tx.value_wei};
        if (tx.recipient) {
            auto& r = received[*tx.recipient];
            ++r.count;
            r.gas_price_sum += BigUint{tx.gas_price_wei};
            r.value_sum += BigUint{tx.value_wei};
        }
    }

    auto rank = [n](const std::map<std::string, Tally>& tallies, AddressRole role) {
        std::vector<AddressActivity> all;
        all.reserve(tallies.size());
        for (const auto& [address, t] : tallies) {
            const BigUint denominator = BigUint{t.count} * BigUint{kWeiPerGwei};
            all.push_back({address, t.count, role, ratio_to_double(t.gas_price_sum, denominator), t.value_sum});
        }
        const auto keep = std::min(n, all.size());
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                          [](const AddressActivity& a, const AddressActivity& b) {
                              if (a.tx_count != b.tx_count) return a.tx_count > b.tx_count;
                              return a.address < b.address;
                          });
        all.resize(keep);
        return all;
    };
    return {rank(sent, AddressRole::sender), rank(received, AddressRole::receiver)};
}

double nearest_rank(std::span<const double> sorted, unsigned percent) {
    if (sorted.empty()) throw EmptyWindow("percentile of an empty sample");
    if (percent == 0 || percent > 100) throw std::invalid_argument("percent must lie in 1..100");
    // integer ceil(percent * N / 100) avoids floating-point rank drift
    const std::size_t rank = (percent * sorted.size() + 99) / 100;
    return sorted[rank - 1];
}

LatencyStats latency_stats(std::span<const MetricPoint> points, std::optional<TimeWindow> window) {
    std::vector<double> values;
    std::size_t successes = 0;
    for (const auto& p : points) {
        if (p.unit != Unit::ms) continue;
        if (window && (p.observed_at < window->from || p.observed_at >= window->to)) continue;
        values.push_back(p.value);
        const auto outcome = p.dimensions.find("outcome");
        if (outcome == p.dimensions.end() || outcome->second == "success") ++successes;
    }
    if (values.empty()) throw EmptyWindow("no latency samples in window");
    std::sort(values.begin(), values.end());
    LatencyStats out;
    out.samples = values.size();
    out.p50 = nearest_rank(values, 50);
    out.p95 = nearest_rank(values, 95);
    out.max = values.back();
    out.success_rate = static_cast<double>(successes) / static_cast<double>(values.size());
    return out;
}

BlockIntervalStats block_interval_stats(std::span<const BlockRecord> blocks, std::uint64_t now_unix_s,
                                        double stall_threshold_s) {
    if (blocks.size() < 2) throw InsufficientData("block interval stats need at least two blocks");
    BlockIntervalStats out;
    double sum = 0;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        if (blocks[i].timestamp < blocks[i - 1].timestamp) {
            throw std::invalid_argument("block timestamps must be non-decreasing");
        }
        const auto gap = static_cast<double>(blocks[i].timestamp - blocks[i - 1].timestamp);
        sum += gap;
        out.max_s = std::max(out.max_s, gap);
    }
    out.mean_s = sum / static_cast<double>(blocks.size() - 1);
    const auto last = blocks.back().timestamp;
    out.stalled = now_unix_s > last && static_cast<double>(now_unix_s - last) > stall_threshold_s;
    return out;
}

std::vector<MetricPoint> mempool_series(std::span<const MempoolSnapshot> snapshots) {
    std::vector<MempoolSnapshot> ordered{snapshots.begin(), snapshots.end()};
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.observed_at < b.observed_at; });
    std::vector<MetricPoint> out;
    out.reserve(ordered.size());
    for (const auto& s : ordered) {
        out.push_back(make_point(metric_names::kMempoolPending, static_cast<double>(s.pending), s.observed_at));
    }
    return out;
}

}  // namespace chainwatch::metrics
