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

#include <chainwatch/collector.hpp>

#include <limits>

#include <chainwatch/metrics.hpp>

namespace chainwatch::collector {

using nlohmann::json;

namespace {

    std::string hex_field(const json& j, const char* key, std::size_t bytes) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw MalformedBlock(std::string{"missing "} + key);
        auto s = it->get<std::string>();
        if (!is_hex_bytes(s, bytes)) throw MalformedBlock(std::string{key} + " is not " + std::to_string(bytes) + "-byte hex");
        return s;
    }

    Uint256 quantity_field(const json& j, const char* key) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw MalformedBlock(std::string{"missing "} + key);
        try {
            return decode_quantity(it->get<std::string>());
        } catch (const MalformedQuantity& e) {
            throw MalformedBlock(std::string{key} + ": " + e.what());
        }
    }

    std::uint64_t u64_field(const json& j, const char* key) {
        const Uint256 v = quantity_field(j, key);
        if (v > std::numeric_limits<std::uint64_t>::max()) throw MalformedBlock(std::string{key} + " exceeds 64 bits");
        return static_cast<std::uint64_t>(v);
    }

}  // namespace

TxRecord tx_from_rpc(const json& j) {
    if (!j.is_object()) throw MalformedBlock("transaction is not an object");
    TxRecord tx;
    tx.tx_hash = hex_field(j, "hash", 32);
    tx.sender = hex_field(j, "from", 20);
    if (const auto to = j.find("to"); to != j.end() && !to->is_null()) tx.recipient = hex_field(j, "to", 20);
    tx.value_wei = quantity_field(j, "value");
    // type-2 transactions served without an effective price fall back to their fee cap
    tx.gas_price_wei = j.contains("gasPrice") ? quantity_field(j, "gasPrice") : quantity_field(j, "maxFeePerGas");
    tx.gas_limit = u64_field(j, "gas");
    if (const auto bn = j.find("blockNumber"); bn != j.end() && !bn->is_null()) tx.inclusion_block = u64_field(j, "blockNumber");
    return tx;
}

BlockRecord block_from_rpc(const json& j, TimestampMs observed_at) {
    if (!j.is_object()) throw MalformedBlock("block is not an object");
    BlockRecord b;
    b.number = u64_field(j, "number");
    b.hash = hex_field(j, "hash", 32);
    b.parent_hash = hex_field(j, "parentHash", 32);
    b.timestamp = u64_field(j, "timestamp");
    b.gas_used = u64_field(j, "gasUsed");
    b.gas_limit = u64_field(j, "gasLimit");
    if (b.gas_used > b.gas_limit) throw MalformedBlock("gasUsed exceeds gasLimit");
    if (b.hash == b.parent_hash) throw MalformedBlock("block is its own parent");
    const auto txs = j.find("transactions");
    if (txs == j.end() || !txs->is_array()) throw MalformedBlock("missing transactions");
    for (const auto& t : *txs) {
        TxRecord tx = tx_from_rpc(t);
        tx.inclusion_block = b.number;
        b.transactions.push_back(std::move(tx));
    }
    b.tx_count = b.transactions.size();
    b.observed_at = observed_at;
    return b;
}

std::vector<Record> CycleResult::records() const {
    std::vector<Record> out = log;
    if (mempool) out.emplace_back(*mempool);
    return out;
}

Collector::Collector(const RpcClient& client, Endpoint endpoint, CollectorConfig config, Clock clock)
    : client_{client}, endpoint_{std::move(endpoint)}, config_{config}, clock_{std::move(clock)} {
    endpoint_.validate();
    if (!(config_.poll_interval_s > 0) || !(config_.datapoint_interval_s > 0)) {
        throw std::invalid_argument("poll and datapoint intervals must be positive");
    }
    if (config_.max_blocks_per_cycle == 0) throw std::invalid_argument("max_blocks_per_cycle must be positive");
}

void Collector::seed_history(std::span<const BlockRecord> committed) {
    for (const auto& b : committed) remember(b);
}

const Collector::Known* Collector::known(std::uint64_t number) const {
    for (const auto& k : recent_) {
        if (k.number == number) return &k;
    }
    return nullptr;
}

void Collector::remember(const BlockRecord& block) {
    while (!recent_.empty() && recent_.back().number >= block.number) recent_.pop_back();
    recent_.push_back({block.number, block.hash, block.timestamp});
    while (recent_.size() > config_.reorg_depth + 2) recent_.pop_front();
}

RpcResult Collector::call(std::string_view method, json params, TimestampMs at, CycleResult& cycle) {
    RpcResult r = client_.call(endpoint_, method, std::move(params));
    if (r.latency_ms) {
        cycle.points.push_back(make_point(metric_names::kRpcLatencyMs, *r.latency_ms, at,
                                          {{"method", std::string{method}}, {"outcome", std::string{r.outcome_name()}}}));
    }
    if (r.is_transport_error()) {
        transport_failed_ = true;
        cycle.errors.push_back(std::string{method} + ": " + std::string{to_string(r.transport_error().kind)} + " " +
                               r.transport_error().detail);
    } else if (r.is_rpc_error()) {
        cycle.errors.push_back(std::string{method} + ": rpc error " + std::to_string(r.rpc_error().code) + " " +
                               r.rpc_error().message);
    }
    return r;
}

std::optional<BlockRecord> Collector::fetch_block(std::uint64_t number, TimestampMs at, CycleResult& cycle) {
    const auto r = call("eth_getBlockByNumber", json::array({encode_quantity(number), true}), at, cycle);
    if (!r.is_success()) return std::nullopt;
    if (r.value().is_null()) {
        cycle.errors.push_back("eth_getBlockByNumber: node has no block " + std::to_string(number));
        return std::nullopt;
    }
    try {
        auto b = block_from_rpc(r.value(), at);
        if (b.number != number) throw MalformedBlock("asked for block " + std::to_string(number));
        return b;
    } catch (const MalformedBlock& e) {
        cycle.errors.push_back("block " + std::to_string(number) + ": " + e.what());
        return std::nullopt;
    }
}

std::optional<std::uint64_t> Collector::fetch_head() {
    const auto r = client_.call(endpoint_, "eth_blockNumber");
    if (!r.is_success() || !r.value().is_string()) return std::nullopt;
    try {
        return decode_quantity_u64(r.value().get<std::string>());
    } catch (const MalformedQuantity&) {
        return std::nullopt;
    }
}

ReorgDecision Collector::walk_back(const BlockRecord& new_block, const CollectorCheckpoint& cp, TimestampMs at,
                                   CycleResult& cycle) {
    ReorgDecision d;
    if (new_block.number != cp.last_block_number + 1) {
        throw std::invalid_argument("reorg check needs the block directly above the checkpoint");
    }
    if (cp.last_block_hash.empty() || new_block.parent_hash == cp.last_block_hash) return d;

    const std::uint64_t last = cp.last_block_number;
    for (std::uint64_t depth = 0; depth <= config_.reorg_depth && depth <= last; ++depth) {
        const std::uint64_t k = last - depth;
        const Known* mine = known(k);
        if (mine == nullptr) {
            d.kind = ReorgDecision::Kind::too_deep;
            d.detail = "no local history for block " + std::to_string(k);
            return d;
        }
        const auto r = call("eth_getBlockByNumber", json::array({encode_quantity(k), false}), at, cycle);
        if (!r.is_success() || !r.value().is_object() || !r.value().contains("hash")) {
            d.kind = ReorgDecision::Kind::unresolved;
            d.detail = "could not re-fetch block " + std::to_string(k);
            return d;
        }
        if (r.value()["hash"] == mine->hash) {
            d.kind = ReorgDecision::Kind::rollback;
            d.join = k;
            return d;
        }
        d.superseded.push_back({k, mine->hash, at});
    }
    d.kind = ReorgDecision::Kind::too_deep;
    d.detail = "reorg deeper than " + std::to_string(config_.reorg_depth) + " blocks";
    return d;
}

ReorgDecision Collector::detect_reorg(const BlockRecord& new_block, const CollectorCheckpoint& cp) {
    CycleResult scratch;
    return walk_back(new_block, cp, clock_(), scratch);
}

void Collector::emit_block_metrics(const BlockRecord& b, TimestampMs at, CycleResult& cycle) {
    using namespace metric_names;
    if (b.gas_limit > 0) cycle.points.push_back(make_point(kBlockGasUtilization, metrics::gas_utilization(b), at));
    cycle.points.push_back(make_point(kBlockTxCount, static_cast<double>(b.tx_count), at));
    cycle.points.push_back(make_point(
        kBlockEthTransferredWei, static_cast<double>(metrics::eth_transferred(b).total_wei), at));
    if (const Known* parent = b.number > 0 ? known(b.number - 1) : nullptr;
        parent != nullptr && b.timestamp >= parent->timestamp) {
        cycle.points.push_back(make_point(kBlockIntervalS, static_cast<double>(b.timestamp - parent->timestamp), at));
    }
    for (const auto& tx : b.transactions) {
        if (tx.first_seen_block && tx.inclusion_block) {
            cycle.points.push_back(
                make_point(kTxInclusionDelayBlocks, static_cast<double>(metrics::inclusion_delay(tx)), at));
        }
    }
}

void Collector::observe_pending(std::uint64_t head, TimestampMs at, CycleResult& cycle) {
    const auto r = call("eth_getBlockByNumber", json::array({"pending", true}), at, cycle);
    if (r.is_rpc_error()) {
        config_.track_pending = false;  // the node does not expose its pending block
        return;
    }
    if (!r.is_success() || !r.value().is_object()) return;
    const auto txs = r.value().find("transactions");
    if (txs == r.value().end() || !txs->is_array()) return;
    for (const auto& t : *txs) {
        const auto h = t.is_object() ? t.find("hash") : t.end();
        if (h != t.end() && h->is_string()) first_seen_.emplace(h->get<std::string>(), head);
    }
    constexpr std::size_t kMaxTracked = 100'000;
    if (first_seen_.size() > kMaxTracked) {
        std::erase_if(first_seen_, [head](const auto& kv) { return kv.second + 4096 < head; });
    }
}

CycleResult Collector::run_poll_cycle(const CollectorCheckpoint& checkpoint) {
    using namespace metric_names;
    CycleResult cycle;
    cycle.at = clock_();
    cycle.checkpoint = checkpoint;
    transport_failed_ = false;
    const TimestampMs at = cycle.at;

    auto finish = [&](bool head_ok) {
        cycle.available = head_ok && !transport_failed_;
        cycle.points.push_back(make_point(kRpcSuccess, cycle.available ? 1.0 : 0.0, at));
        return std::move(cycle);
    };

    const auto head_res = call("eth_blockNumber", json::array(), at, cycle);
    if (!head_res.is_success()) return finish(false);
    std::uint64_t head = 0;
    try {
        head = decode_quantity_u64(head_res.value().get<std::string>());
    } catch (const std::exception& e) {
        cycle.errors.push_back(std::string{"eth_blockNumber: "} + e.what());
        return finish(false);
    }
    cycle.points.push_back(make_point(kChainHead, static_cast<double>(head), at));

    auto& cp = cycle.checkpoint;
    std::uint64_t fetched = 0;
    while (cp.last_block_number < head && fetched < config_.max_blocks_per_cycle) {
        const std::uint64_t n = cp.last_block_number + 1;
        auto block = fetch_block(n, at, cycle);
        if (!block) break;  // commit the contiguous prefix only

        if (!cp.last_block_hash.empty() && block->parent_hash != cp.last_block_hash) {
            const ReorgDecision d = walk_back(*block, cp, at, cycle);
            if (d.kind == ReorgDecision::Kind::unresolved) {
                cycle.errors.push_back(d.detail);
                break;
            }
            for (const auto& s : d.superseded) {
                cycle.superseded.push_back(s);
                cycle.log.emplace_back(s);
            }
            if (d.kind == ReorgDecision::Kind::rollback) {
                cp.last_block_number = d.join;
                cp.last_block_hash = known(d.join)->hash;
                while (!recent_.empty() && recent_.back().number > d.join) recent_.pop_back();
            } else {
                ResetMarker reset{head, d.detail, at};
                cycle.reset = reset;
                cycle.log.emplace_back(reset);
                cycle.errors.push_back("reset: " + d.detail);
                recent_.clear();
                cp.last_block_number = head - 1;
                cp.last_block_hash.clear();
            }
            continue;
        }

        for (auto& tx : block->transactions) {
            if (const auto it = first_seen_.find(tx.tx_hash); it != first_seen_.end() && it->second <= n) {
                tx.first_seen_block = it->second;
            }
        }
        emit_block_metrics(*block, at, cycle);
        remember(*block);
        cp.last_block_number = n;
        cp.last_block_hash = block->hash;
        cycle.log.emplace_back(*block);
        cycle.blocks.push_back(std::move(*block));
        ++fetched;
    }

    const auto pool = call("txpool_status", json::array(), at, cycle);
    if (pool.is_success() && pool.value().is_object()) {
        try {
            MempoolSnapshot m{decode_quantity_u64(pool.value().at("pending").get<std::string>()),
                              decode_quantity_u64(pool.value().at("queued").get<std::string>()), at, head};
            cycle.points.push_back(make_point(kMempoolPending, static_cast<double>(m.pending), at));
            cycle.points.push_back(make_point(kMempoolQueued, static_cast<double>(m.queued), at));
            cycle.mempool = m;
        } catch (const std::exception& e) {
            cycle.errors.push_back(std::string{"txpool_status: "} + e.what());
        }
    }

    if (config_.track_pending) observe_pending(head, at, cycle);
    return finish(true);
}

}  // namespace chainwatch::collector
