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

#include <chainwatch/sink.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace chainwatch::sink {

using nlohmann::json;

namespace {

    template <class... Ts>
    struct overloaded : Ts... {
        using Ts::operator()...;
    };

    json opt(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

    std::optional<std::uint64_t> opt_u64(const json& j, const char* key) {
        const auto& v = j.at(key);
        if (v.is_null()) return std::nullopt;
        return v.get<std::uint64_t>();
    }

    Uint256 wei_field(const json& j, const char* key) {
        const auto& v = j.at(key);
        if (!v.is_string()) throw std::invalid_argument(std::string{key} + " must be a decimal string");
        return parse_decimal_u256(v.get<std::string>());
    }

    TxRecord tx_from_json(const json& j) {
        TxRecord tx;
        tx.tx_hash = j.at("tx_hash").get<std::string>();
        tx.sender = j.at("sender").get<std::string>();
        if (!j.at("recipient").is_null()) tx.recipient = j["recipient"].get<std::string>();
        tx.value_wei = wei_field(j, "value_wei");
        tx.gas_price_wei = wei_field(j, "gas_price_wei");
        tx.gas_limit = j.at("gas_limit").get<std::uint64_t>();
        tx.first_seen_block = opt_u64(j, "first_seen_block");
        tx.inclusion_block = opt_u64(j, "inclusion_block");
        return tx;
    }

}  // namespace

json to_json(const TxRecord& tx) {
    return json{
        {"tx_hash", tx.tx_hash},
        {"sender", tx.sender},
        {"recipient", tx.recipient ? json(*tx.recipient) : json(nullptr)},
        {"value_wei", to_decimal(tx.value_wei)},
        {"gas_price_wei", to_decimal(tx.gas_price_wei)},
        {"gas_limit", tx.gas_limit},
        {"first_seen_block", opt(tx.first_seen_block)},
        {"inclusion_block", opt(tx.inclusion_block)},
    };
}

json to_json(const Record& record) {
    return std::visit(
        overloaded{
            [](const BlockRecord& b) {
                json txs = json::array();
                for (const auto& tx : b.transactions) txs.push_back(to_json(tx));
                return json{
                    {"kind", "block"},         {"number", b.number},       {"hash", b.hash},
                    {"parent_hash", b.parent_hash}, {"timestamp", b.timestamp}, {"gas_used", b.gas_used},
                    {"gas_limit", b.gas_limit}, {"tx_count", b.tx_count},   {"transactions", std::move(txs)},
                    {"observed_at", b.observed_at},
                };
            },
            [](const TxRecord& tx) {
                json j = to_json(tx);
                j["kind"] = "tx";
                return j;
            },
            [](const MempoolSnapshot& m) {
                return json{{"kind", "mempool"},
                            {"pending", m.pending},
                            {"queued", m.queued},
                            {"observed_at", m.observed_at},
                            {"head_block", m.head_block}};
            },
            [](const MetricPoint& p) {
                return json{{"kind", "metric"},          {"name", p.name},
                            {"value", p.value},          {"unit", to_string(p.unit)},
                            {"dimensions", p.dimensions}, {"observed_at", p.observed_at}};
            },
            [](const SupersededMarker& s) {
                return json{{"kind", "superseded"},
                            {"number", s.number},
                            {"hash", s.hash},
                            {"superseded", true},
                            {"marked_at", s.marked_at}};
            },
            [](const ResetMarker& r) {
                return json{
                    {"kind", "reset"}, {"resumed_at", r.resumed_at}, {"reason", r.reason}, {"marked_at", r.marked_at}};
            },
        },
        record);
}

Record record_from_json(const json& j) {
    try {
        if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "block") {
            BlockRecord b;
            b.number = j.at("number").get<std::uint64_t>();
            b.hash = j.at("hash").get<std::string>();
            b.parent_hash = j.at("parent_hash").get<std::string>();
            b.timestamp = j.at("timestamp").get<std::uint64_t>();
            b.gas_used = j.at("gas_used").get<std::uint64_t>();
            b.gas_limit = j.at("gas_limit").get<std::uint64_t>();
            b.tx_count = j.at("tx_count").get<std::uint64_t>();
            for (const auto& t : j.at("transactions")) b.transactions.push_back(tx_from_json(t));
            b.observed_at = j.at("observed_at").get<TimestampMs>();
            return b;
        }
        if (kind == "tx") return tx_from_json(j);
        if (kind == "mempool") {
            return MempoolSnapshot{j.at("pending").get<std::uint64_t>(), j.at("queued").get<std::uint64_t>(),
                                   j.at("observed_at").get<TimestampMs>(), j.at("head_block").get<std::uint64_t>()};
        }
        if (kind == "metric") {
            MetricPoint p;
            p.name = j.at("name").get<std::string>();
            if (!j.at("value").is_number()) throw std::invalid_argument("metric value is not a number");
            p.value = j["value"].get<double>();
            const auto unit = unit_from_string(j.at("unit").get<std::string>());
            if (!unit) throw std::invalid_argument("unknown unit " + j["unit"].get<std::string>());
            p.unit = *unit;
            p.dimensions = j.at("dimensions").get<std::map<std::string, std::string>>();
            p.observed_at = j.at("observed_at").get<TimestampMs>();
            return p;
        }
        if (kind == "superseded") {
            return SupersededMarker{j.at("number").get<std::uint64_t>(), j.at("hash").get<std::string>(),
                                    j.at("marked_at").get<TimestampMs>()};
        }
        if (kind == "reset") {
            return ResetMarker{j.at("resumed_at").get<std::uint64_t>(), j.at("reason").get<std::string>(),
                               j.at("marked_at").get<TimestampMs>()};
        }
        throw std::invalid_argument("unknown record kind " + kind);
    } catch (const json::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

FileLock::FileLock(const std::filesystem::path& target) {
    const auto lock_path = target.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw SinkError("cannot open " + lock_path + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw SinkError(target.string() + " is already being written by another process");
    }
}

FileLock::~FileLock() {
    if (fd_ >= 0) ::close(fd_);  // closing drops the flock
}

RecordWriter::RecordWriter(const std::filesystem::path& path)
    : path_{path}, lock_{path}, out_{path, std::ios::app | std::ios::binary} {
    if (!out_) throw SinkError("cannot open " + path.string() + " for append");
}

void RecordWriter::append(const Record& record) {
    out_ << to_json(record).dump() << '\n';
    ++written_;
}

std::size_t RecordWriter::append(std::span<const Record> records) {
    for (const auto& r : records) append(r);
    return records.size();
}

void RecordWriter::flush() {
    out_.flush();
    if (!out_) throw SinkError("write to " + path_.string() + " failed");
}

std::size_t write_records(std::span<const Record> records, const std::filesystem::path& path) {
    RecordWriter writer{path};
    writer.append(records);
    writer.flush();
    return records.size();
}

std::vector<Record> replay(const std::filesystem::path& path) {
    std::vector<Record> out;
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        if (!std::filesystem::exists(path)) return out;
        throw SinkError("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ReplayError(line_no, "not valid JSON");
        try {
            out.push_back(record_from_json(j));
        } catch (const std::exception& e) {
            throw ReplayError(line_no, e.what());
        }
    }
    return out;
}

std::size_t truncate_torn_tail(const std::filesystem::path& path) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec || size == 0) return 0;

    std::ifstream in{path, std::ios::binary};
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.back() == '\n') return 0;
    const auto last_nl = content.rfind('\n');
    const std::uintmax_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
    std::filesystem::resize_file(path, keep);
    return static_cast<std::size_t>(size - keep);
}

}  // namespace chainwatch::sink
