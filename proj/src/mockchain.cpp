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

#include <chainwatch/mockchain.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

namespace chainwatch::mock {

using nlohmann::json;

namespace {

    const std::string kZeroHash = "0x0000000000000000000000000000000000000000000000000000000000000000";
    const std::string kZeroAddress = "0x0000000000000000000000000000000000000000";
    constexpr std::int64_t kInvalidParams = -32602;
    constexpr std::int64_t kMethodNotFound = -32601;
    constexpr std::int64_t kServerError = -32000;

    std::string lower(std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    }

    std::string derive_address(std::string_view material) { return sha256_hex(material).substr(0, 42); }

    Uint256 fee_of(const Uint256& gas_price, std::uint64_t gas_units) { return gas_price * Uint256{gas_units}; }

    const std::string& restricted_message(std::string_view method) {
        for (const auto& [name, message] : restricted_reference_methods()) {
            if (name == method) return message;
        }
        static const std::string none;
        return none;
    }

    json rpc_error(const json& id, std::int64_t code, const std::string& message) {
        return json{{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
    }

    const json& param(const json& params, std::size_t i) {
        if (!params.is_array() || params.size() <= i) throw MockRpcError(kInvalidParams, "missing value for required argument " + std::to_string(i));
        return params[i];
    }

    std::string address_param(const json& params, std::size_t i) {
        const json& v = param(params, i);
        if (!v.is_string() || !is_hex_bytes(v.get<std::string>(), 20)) throw MockRpcError(kInvalidParams, "invalid address argument");
        return lower(v.get<std::string>());
    }

    std::string hash_param(const json& params, std::size_t i) {
        const json& v = param(params, i);
        if (!v.is_string() || !is_hex_bytes(v.get<std::string>(), 32)) throw MockRpcError(kInvalidParams, "invalid hash argument");
        return lower(v.get<std::string>());
    }

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + 2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

std::string_view to_string(Profile p) { return p == Profile::amb ? "amb" : "permissive"; }

std::optional<Profile> profile_from_string(std::string_view s) {
    if (s == "amb") return Profile::amb;
    if (s == "permissive") return Profile::permissive;
    return std::nullopt;
}

void ChainConfig::validate() const {
    if (block_gas_limit == 0) throw std::invalid_argument("block_gas_limit must be positive");
    if (!(block_period_s > 0)) throw std::invalid_argument("block_period_s must be positive");
}

Fault fault_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "outage") return Outage{std::chrono::milliseconds{j.at("duration_ms").get<std::int64_t>()}};
    if (kind == "latency") return AddedLatency{std::chrono::milliseconds{j.at("added_ms").get<std::int64_t>()}};
    if (kind == "slow_block") return SlowBlock{j.at("factor").get<double>()};
    if (kind == "fork") return Fork{j.at("depth").get<std::uint64_t>()};
    throw std::invalid_argument("unknown fault kind: " + kind);
}

MockChain::MockChain(ChainConfig config) : config_{std::move(config)} {
    config_.validate();
    if (config_.initial_accounts.empty()) {
        const Uint256 endowment = Uint256{1'000'000} * Uint256{1'000'000'000'000'000'000ULL};
        for (int i = 0; i < 32; ++i) {
            config_.initial_accounts.emplace_back(
                derive_address("account|" + std::to_string(config_.seed) + "|" + std::to_string(i)), endowment);
        }
    }
    for (auto& [address, amount] : config_.initial_accounts) {
        address = lower(address);
        if (!is_hex_bytes(address, 20)) throw std::invalid_argument("invalid initial account address: " + address);
        balances_[address] += amount;
    }

    BlockRecord genesis;
    genesis.number = 0;
    genesis.parent_hash = kZeroHash;
    genesis.hash = sha256_hex("genesis|" + std::to_string(config_.seed));
    genesis.timestamp = config_.genesis_timestamp;
    genesis.gas_limit = config_.block_gas_limit;
    blocks_.push_back(std::move(genesis));
    block_offsets_s_.push_back(0.0);
}

std::string MockChain::submit_tx(const std::string& sender_in, const std::optional<std::string>& recipient_in,
                                 const Uint256& value_wei, const Uint256& gas_price_wei, std::uint64_t gas_units) {
    const std::string sender = lower(sender_in);
    std::optional<std::string> recipient;
    if (recipient_in) recipient = lower(*recipient_in);
    if (!is_hex_bytes(sender, 20)) throw MockRpcError(kInvalidParams, "invalid sender address");
    if (recipient && !is_hex_bytes(*recipient, 20)) throw MockRpcError(kInvalidParams, "invalid recipient address");
    if (gas_units == 0) throw MockRpcError(kServerError, "intrinsic gas too low");

    std::lock_guard lock{mutex_};
    if (gas_units > config_.block_gas_limit) throw MockRpcError(kServerError, "exceeds block gas limit");

    const BigUint cost = BigUint{value_wei} + BigUint{fee_of(gas_price_wei, gas_units)};
    const auto bal = balances_.find(sender);
    const BigUint available = bal == balances_.end() ? BigUint{0} : BigUint{bal->second};
    if (available < committed_[sender] + cost) {
        throw MockRpcError(kServerError, "insufficient funds for gas * price + value");
    }

    PendingTx tx;
    tx.arrival_sequence = arrival_counter_++;
    tx.hash = sha256_hex("tx|" + std::to_string(config_.seed) + "|" + std::to_string(tx.arrival_sequence));
    tx.sender = sender;
    tx.recipient = recipient;
    tx.value_wei = value_wei;
    tx.gas_price_wei = gas_price_wei;
    tx.gas_units = gas_units;
    tx.submitted_at_block = blocks_.size() - 1;
    tx.nonce = nonces_[sender]++;
    committed_[sender] += cost;
    std::string hash = tx.hash;
    pool_.insert(std::move(tx));
    return hash;
}

BlockRecord MockChain::advance_block() {
    std::lock_guard lock{mutex_};
    return seal_block_locked();
}

BlockRecord MockChain::seal_block_locked() {
    const BlockRecord& parent = blocks_.back();
    BlockRecord block;
    block.number = parent.number + 1;
    block.parent_hash = parent.hash;
    block.gas_limit = config_.block_gas_limit;

    const double offset = block_offsets_s_.back() + config_.block_period_s * next_gap_factor_;
    next_gap_factor_ = 1.0;
    block.timestamp = config_.genesis_timestamp + static_cast<std::uint64_t>(std::floor(offset));

    std::string hash_material = "block|" + std::to_string(config_.seed) + "|" + std::to_string(fork_generation_) +
                                "|" + std::to_string(block.number) + "|" + block.parent_hash;
    for (auto it = pool_.begin(); it != pool_.end();) {
        if (block.gas_used + it->gas_units > block.gas_limit) {
            ++it;  // first-fit: a too-big transaction does not block cheaper ones behind it
            continue;
        }
        const PendingTx& p = *it;
        const Uint256 fee = fee_of(p.gas_price_wei, p.gas_units);
        balances_[p.sender] -= p.value_wei + fee;
        committed_[p.sender] -= BigUint{p.value_wei} + BigUint{fee};
        const std::string credited = p.recipient ? *p.recipient : derive_address("create|" + p.sender + "|" + std::to_string(p.nonce));
        balances_[credited] += p.value_wei;
        fees_paid_ += BigUint{fee};
        block.gas_used += p.gas_units;

        TxRecord tx;
        tx.tx_hash = p.hash;
        tx.sender = p.sender;
        tx.recipient = p.recipient;
        tx.value_wei = p.value_wei;
        tx.gas_price_wei = p.gas_price_wei;
        tx.gas_limit = p.gas_units;
        tx.first_seen_block = p.submitted_at_block;
        tx.inclusion_block = block.number;
        tx_location_[p.hash] = {block.number, block.transactions.size()};
        inclusion_log_.push_back({p.hash, p.gas_price_wei, p.submitted_at_block, block.number});
        hash_material += "|" + p.hash;
        block.transactions.push_back(std::move(tx));
        included_meta_[p.hash] = p;
        it = pool_.erase(it);
    }
    block.tx_count = block.transactions.size();
    block.hash = sha256_hex(hash_material);
    blocks_.push_back(block);
    block_offsets_s_.push_back(offset);
    return block;
}

void MockChain::rewind_block_locked() {
    BlockRecord top = std::move(blocks_.back());
    blocks_.pop_back();
    block_offsets_s_.pop_back();
    for (auto it = top.transactions.rbegin(); it != top.transactions.rend(); ++it) {
        const PendingTx p = included_meta_.at(it->tx_hash);
        const Uint256 fee = fee_of(p.gas_price_wei, p.gas_units);
        balances_[p.sender] += p.value_wei + fee;
        committed_[p.sender] += BigUint{p.value_wei} + BigUint{fee};
        const std::string credited = p.recipient ? *p.recipient : derive_address("create|" + p.sender + "|" + std::to_string(p.nonce));
        balances_[credited] -= p.value_wei;
        fees_paid_ -= BigUint{fee};
        tx_location_.erase(p.hash);
        included_meta_.erase(p.hash);
        pool_.insert(p);
    }
    std::erase_if(inclusion_log_, [&](const auto& e) { return e.inclusion_block == top.number; });
}

std::string MockChain::inject_fault(const Fault& fault) {
    std::lock_guard lock{mutex_};
    return std::visit(
        [&](const auto& f) -> std::string {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Outage>) {
                outage_until_ = std::chrono::steady_clock::now() + f.duration;
                return "outage " + std::to_string(f.duration.count()) + "ms";
            } else if constexpr (std::is_same_v<F, AddedLatency>) {
                added_latency_ = f.added;
                return "latency +" + std::to_string(f.added.count()) + "ms";
            } else if constexpr (std::is_same_v<F, SlowBlock>) {
                if (!(f.factor > 0)) throw std::invalid_argument("slow_block factor must be positive");
                next_gap_factor_ = f.factor;
                return "slow_block x" + std::to_string(f.factor);
            } else {
                const std::uint64_t height = blocks_.size() - 1;
                if (f.depth == 0) return "fork 0 (no-op)";
                if (f.depth >= height) {
                    throw std::invalid_argument("fork depth " + std::to_string(f.depth) +
                                                " must be below chain height " + std::to_string(height));
                }
                for (std::uint64_t i = 0; i < f.depth; ++i) rewind_block_locked();
                ++fork_generation_;
                for (std::uint64_t i = 0; i < f.depth; ++i) seal_block_locked();
                return "fork depth " + std::to_string(f.depth);
            }
        },
        fault);
}

std::uint64_t MockChain::head_number() const {
    std::lock_guard lock{mutex_};
    return blocks_.size() - 1;
}

BlockRecord MockChain::block(std::uint64_t number) const {
    std::lock_guard lock{mutex_};
    if (number >= blocks_.size()) throw std::out_of_range("no block " + std::to_string(number));
    return blocks_[number];
}

std::vector<InclusionLogEntry> MockChain::inclusion_log() const {
    std::lock_guard lock{mutex_};
    return inclusion_log_;
}

std::vector<PendingTx> MockChain::pool() const {
    std::lock_guard lock{mutex_};
    return {pool_.begin(), pool_.end()};
}

std::size_t MockChain::pool_size() const {
    std::lock_guard lock{mutex_};
    return pool_.size();
}

Uint256 MockChain::balance(const std::string& address) const {
    std::lock_guard lock{mutex_};
    const auto it = balances_.find(lower(address));
    return it == balances_.end() ? Uint256{0} : it->second;
}

std::vector<std::string> MockChain::accounts() const {
    std::lock_guard lock{mutex_};
    std::vector<std::string> out;
    for (const auto& [address, amount] : config_.initial_accounts) out.push_back(address);
    return out;
}

BigUint MockChain::total_supply() const {
    std::lock_guard lock{mutex_};
    BigUint total = fees_paid_;
    for (const auto& [address, amount] : balances_) total += BigUint{amount};
    return total;
}

bool MockChain::outage_active() const {
    std::lock_guard lock{mutex_};
    return std::chrono::steady_clock::now() < outage_until_;
}

std::chrono::steady_clock::time_point MockChain::outage_until() const {
    std::lock_guard lock{mutex_};
    return outage_until_;
}

std::chrono::milliseconds MockChain::added_latency() const {
    std::lock_guard lock{mutex_};
    return added_latency_;
}

double MockChain::next_block_gap_factor() const {
    std::lock_guard lock{mutex_};
    return next_gap_factor_;
}

// --- JSON-RPC surface ---------------------------------------------------------------------------

json MockChain::handle_request(const json& request) {
    const json id = request.is_object() && request.contains("id") ? request["id"] : json{};
    if (!request.is_object() || !request.contains("method") || !request["method"].is_string()) {
        return rpc_error(id, -32600, "invalid request");
    }
    const std::string method = request["method"].get<std::string>();
    const json params = request.contains("params") ? request["params"] : json::array();
    if (!params.is_array()) return rpc_error(id, kInvalidParams, "params must be an array");

    std::lock_guard lock{mutex_};
    try {
        return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", dispatch_locked(method, params)}};
    } catch (const MockRpcError& e) {
        return rpc_error(id, e.code(), e.what());
    } catch (const std::exception& e) {
        return rpc_error(id, kInvalidParams, std::string{"invalid params: "} + e.what());
    }
}

std::optional<std::uint64_t> MockChain::resolve_tag_locked(const json& tag) const {
    const std::uint64_t head = blocks_.size() - 1;
    if (!tag.is_string()) throw MockRpcError(kInvalidParams, "invalid block tag");
    const std::string t = tag.get<std::string>();
    if (t == "latest" || t == "safe" || t == "finalized") return head;
    if (t == "earliest") return 0;
    if (t == "pending") return std::nullopt;
    return decode_quantity_u64(t);
}

json MockChain::tx_json_locked(const TxRecord& tx, std::optional<std::uint64_t> block, std::size_t index) const {
    const PendingTx& meta = included_meta_.at(tx.tx_hash);
    json j{
        {"hash", tx.tx_hash},
        {"from", tx.sender},
        {"to", tx.recipient ? json(*tx.recipient) : json(nullptr)},
        {"value", encode_quantity(tx.value_wei)},
        {"gasPrice", encode_quantity(tx.gas_price_wei)},
        {"gas", encode_quantity(tx.gas_limit)},
        {"nonce", encode_quantity(meta.nonce)},
        {"input", "0x"},
        {"type", "0x0"},
    };
    if (block) {
        j["blockNumber"] = encode_quantity(*block);
        j["blockHash"] = blocks_[*block].hash;
        j["transactionIndex"] = encode_quantity(index);
    }
    return j;
}

json MockChain::pending_tx_json(const PendingTx& tx) const {
    return json{
        {"hash", tx.hash},
        {"from", tx.sender},
        {"to", tx.recipient ? json(*tx.recipient) : json(nullptr)},
        {"value", encode_quantity(tx.value_wei)},
        {"gasPrice", encode_quantity(tx.gas_price_wei)},
        {"gas", encode_quantity(tx.gas_units)},
        {"nonce", encode_quantity(tx.nonce)},
        {"input", "0x"},
        {"type", "0x0"},
        {"blockNumber", nullptr},
        {"blockHash", nullptr},
        {"transactionIndex", nullptr},
    };
}

json MockChain::block_json_locked(std::uint64_t number, bool full) const {
    if (number >= blocks_.size()) return nullptr;
    const BlockRecord& b = blocks_[number];
    json txs = json::array();
    for (std::size_t i = 0; i < b.transactions.size(); ++i) {
        if (full) {
            txs.push_back(tx_json_locked(b.transactions[i], number, i));
        } else {
            txs.push_back(b.transactions[i].tx_hash);
        }
    }
    return json{
        {"number", encode_quantity(b.number)},
        {"hash", b.hash},
        {"parentHash", b.parent_hash},
        {"timestamp", encode_quantity(b.timestamp)},
        {"gasUsed", encode_quantity(b.gas_used)},
        {"gasLimit", encode_quantity(b.gas_limit)},
        {"miner", kZeroAddress},
        {"size", encode_quantity(540 + 110 * b.transactions.size())},
        {"transactions", std::move(txs)},
    };
}

json MockChain::pending_block_json_locked(bool full) const {
    const BlockRecord& head = blocks_.back();
    json txs = json::array();
    for (const auto& p : pool_) txs.push_back(full ? pending_tx_json(p) : json(p.hash));
    return json{
        {"number", encode_quantity(head.number + 1)},
        {"hash", nullptr},
        {"parentHash", head.hash},
        {"timestamp", encode_quantity(head.timestamp)},
        {"gasUsed", "0x0"},
        {"gasLimit", encode_quantity(config_.block_gas_limit)},
        {"miner", nullptr},
        {"transactions", std::move(txs)},
    };
}

json MockChain::dispatch_locked(const std::string& method, const json& params) {
    const bool amb = config_.profile == Profile::amb;
    const std::uint64_t head = blocks_.size() - 1;

    if (method == "web3_clientVersion") return "chainwatch-mock/1.0";
    if (method == "eth_blockNumber") return encode_quantity(head);
    if (method == "net_version") return "1";
    if (method == "net_listening") return true;
    if (method == "eth_syncing") return false;
    if (method == "eth_call") return "0x";
    if (method == "eth_getLogs") return json::array();
    if (method == "eth_estimateGas") return encode_quantity(21'000);
    if (method == "eth_getCode") {
        (void)address_param(params, 0);
        return "0x";
    }
    if (method == "eth_getBlockByNumber") {
        const auto number = resolve_tag_locked(param(params, 0));
        const bool full = params.size() > 1 && params[1].is_boolean() && params[1].get<bool>();
        return number ? block_json_locked(*number, full) : pending_block_json_locked(full);
    }
    if (method == "eth_getTransactionByHash") {
        const std::string hash = hash_param(params, 0);
        if (const auto loc = tx_location_.find(hash); loc != tx_location_.end()) {
            const auto [number, index] = loc->second;
            return tx_json_locked(blocks_[number].transactions[index], number, index);
        }
        for (const auto& p : pool_) {
            if (p.hash == hash) return pending_tx_json(p);
        }
        return nullptr;
    }
    if (method == "eth_getTransactionReceipt") {
        const std::string hash = hash_param(params, 0);
        const auto loc = tx_location_.find(hash);
        if (loc == tx_location_.end()) return nullptr;
        const auto [number, index] = loc->second;
        const TxRecord& tx = blocks_[number].transactions[index];
        return json{
            {"transactionHash", tx.tx_hash},
            {"transactionIndex", encode_quantity(index)},
            {"blockNumber", encode_quantity(number)},
            {"blockHash", blocks_[number].hash},
            {"from", tx.sender},
            {"to", tx.recipient ? json(*tx.recipient) : json(nullptr)},
            {"gasUsed", encode_quantity(tx.gas_limit)},
            {"effectiveGasPrice", encode_quantity(tx.gas_price_wei)},
            {"status", "0x1"},
            {"logs", json::array()},
        };
    }
    if (method == "eth_gasPrice") {
        // lowest price the next block would still include
        Uint256 price = kWeiPerGwei;
        std::uint64_t gas = 0;
        for (const auto& p : pool_) {
            if (gas + p.gas_units > config_.block_gas_limit) continue;
            gas += p.gas_units;
            price = p.gas_price_wei;
        }
        return encode_quantity(price);
    }
    if (method == "eth_getBalance") {
        const std::string address = address_param(params, 0);
        const auto it = balances_.find(address);
        return encode_quantity(it == balances_.end() ? Uint256{0} : it->second);
    }
    if (method == "eth_getTransactionCount") {
        const std::string address = address_param(params, 0);
        const bool pending = params.size() > 1 && params[1] == "pending";
        std::uint64_t count = 0;
        if (pending) {
            const auto it = nonces_.find(address);
            count = it == nonces_.end() ? 0 : it->second;
        } else {
            for (const auto& [hash, meta] : included_meta_) count += meta.sender == address ? 1 : 0;
        }
        return encode_quantity(count);
    }
    if (method == "txpool_status") {
        return json{{"pending", encode_quantity(pool_.size())}, {"queued", "0x0"}};
    }

    if (method == "eth_sendRawTransaction") {
        const json& payload = param(params, 0);
        if (!payload.is_string()) throw MockRpcError(kInvalidParams, "raw transaction must be a hex string");
        const std::string raw = payload.get<std::string>();
        if (amb) {
            if (raw.size() <= 4) throw MockRpcError(kServerError, restricted_message(method));
            throw MockRpcError(kServerError, "raw transaction decoding is not modelled; submit through /__submit");
        }
        return sha256_hex("raw|" + raw);  // accepted and discarded
    }
    if (method == "txpool_content") {
        if (amb) throw MockRpcError(kMethodNotFound, restricted_message(method));
        json pending = json::object();
        for (const auto& p : pool_) pending[p.sender][std::to_string(p.nonce)] = pending_tx_json(p);
        return json{{"pending", std::move(pending)}, {"queued", json::object()}};
    }
    if (method == "debug_traceTransaction") {
        if (amb) throw MockRpcError(kMethodNotFound, restricted_message(method));
        return json{{"gas", 21'000}, {"failed", false}, {"returnValue", ""}, {"structLogs", json::array()}};
    }
    if (method == "eth_mining") {
        if (amb) throw MockRpcError(kMethodNotFound, restricted_message(method));
        return false;
    }
    throw MockRpcError(kMethodNotFound, "the method " + method + " does not exist/is not available");
}

// --- traffic ------------------------------------------------------------------------------------

TrafficGenerator::TrafficGenerator(std::uint64_t seed, Ranges ranges)
    : rng_{seed ^ 0x9e3779b97f4a7c15ULL}, ranges_{ranges} {
    if (ranges_.min_gas_price_gwei > ranges_.max_gas_price_gwei || ranges_.min_gas_units > ranges_.max_gas_units) {
        throw std::invalid_argument("traffic ranges are inverted");
    }
}

std::uint64_t TrafficGenerator::uniform(std::uint64_t lo, std::uint64_t hi) {
    // modulo reduction keeps the sequence identical across standard libraries
    return lo + rng_() % (hi - lo + 1);
}

std::vector<std::string> TrafficGenerator::submit(MockChain& chain, std::size_t count) {
    const auto accounts = chain.accounts();
    std::vector<std::string> hashes;
    if (accounts.size() < 2) return hashes;
    for (std::size_t i = 0; i < count; ++i) {
        const auto from = uniform(0, accounts.size() - 1);
        auto to = uniform(0, accounts.size() - 2);
        if (to >= from) ++to;
        const Uint256 price = Uint256{uniform(ranges_.min_gas_price_gwei, ranges_.max_gas_price_gwei)} * kWeiPerGwei;
        const Uint256 value = Uint256{uniform(0, ranges_.max_value_gwei)} * kWeiPerGwei;
        const std::uint64_t gas = uniform(ranges_.min_gas_units, ranges_.max_gas_units);
        hashes.push_back(chain.submit_tx(accounts[from], accounts[to], value, price, gas));
    }
    return hashes;
}

// --- in-process transport -----------------------------------------------------------------------

TransportReply InProcessTransport::post(const Endpoint& endpoint, const std::string& body) {
    if (chain_->outage_active()) return TransportError{TransportErrorKind::connection_refused, "mock outage"};
    const auto latency = chain_->added_latency();
    if (latency.count() > endpoint.timeout_ms) {
        std::this_thread::sleep_for(std::chrono::milliseconds{endpoint.timeout_ms});
        return TransportError{TransportErrorKind::timeout, "mock latency exceeds timeout"};
    }
    if (latency.count() > 0) std::this_thread::sleep_for(latency);
    const json request = json::parse(body, nullptr, false);
    if (request.is_discarded()) return HttpReply{200, rpc_error(nullptr, -32700, "parse error").dump()};
    return HttpReply{200, chain_->handle_request(request).dump()};
}

// --- scripts ------------------------------------------------------------------------------------

void run_script(std::istream& in, MockChain& chain, TrafficGenerator& traffic,
                const std::function<std::string(const Fault&)>& apply_fault) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words{line};
        std::string command;
        if (!(words >> command)) continue;

        auto next = [&](const char* what) {
            std::string w;
            if (!(words >> w)) throw ScriptError(line_no, std::string{"missing "} + what);
            return w;
        };
        auto next_u64 = [&](const char* what) {
            const std::string w = next(what);
            try {
                std::size_t used = 0;
                const auto v = std::stoull(w, &used);
                if (used != w.size()) throw std::invalid_argument(w);
                return static_cast<std::uint64_t>(v);
            } catch (const std::exception&) {
                throw ScriptError(line_no, std::string{"invalid "} + what + ": " + w);
            }
        };

        try {
            if (command == "advance") {
                std::uint64_t n = 1;
                std::string w;
                if (words >> w) n = std::stoull(w);
                for (std::uint64_t i = 0; i < n; ++i) chain.advance_block();
            } else if (command == "submit") {
                const std::string sender = next("sender");
                const std::string recipient = next("recipient");
                const Uint256 value = parse_decimal_u256(next("value_wei"));
                const Uint256 price = parse_decimal_u256(next("gas_price_wei"));
                const std::uint64_t gas = next_u64("gas_units");
                chain.submit_tx(sender, recipient == "-" ? std::nullopt : std::optional{recipient}, value, price, gas);
            } else if (command == "traffic") {
                traffic.submit(chain, next_u64("count"));
            } else if (command == "sleep") {
                std::this_thread::sleep_for(std::chrono::milliseconds{next_u64("milliseconds")});
            } else if (command == "fault") {
                const std::string kind = next("fault kind");
                if (kind == "outage") {
                    apply_fault(Outage{std::chrono::milliseconds{next_u64("duration_ms")}});
                } else if (kind == "latency") {
                    apply_fault(AddedLatency{std::chrono::milliseconds{next_u64("added_ms")}});
                } else if (kind == "slow_block") {
                    apply_fault(SlowBlock{std::stod(next("factor"))});
                } else if (kind == "fork") {
                    apply_fault(Fork{next_u64("depth")});
                } else {
                    throw ScriptError(line_no, "unknown fault kind: " + kind);
                }
            } else {
                throw ScriptError(line_no, "unknown command: " + command);
            }
        } catch (const ScriptError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScriptError(line_no, e.what());
        }
    }
}

}  // namespace chainwatch::mock
