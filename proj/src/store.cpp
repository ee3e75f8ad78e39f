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

#include <chainwatch/store.hpp>

namespace chainwatch {

using nlohmann::json;

namespace {

    std::optional<json> last_line(const std::filesystem::path& path) {
        std::ifstream in{path, std::ios::binary};
        if (!in) return std::nullopt;
        std::string line;
        std::string last;
        while (std::getline(in, line)) {
            if (!line.empty()) last = line;
        }
        if (last.empty()) return std::nullopt;
        json j = json::parse(last, nullptr, false);
        if (j.is_discarded()) throw sink::SinkError("unreadable commit line in " + path.string());
        return j;
    }

    void flush_or_throw(std::ofstream& out, const std::filesystem::path& path) {
        out.flush();
        if (!out) throw sink::SinkError("write to " + path.string() + " failed");
    }

}  // namespace

SessionStore::Paths SessionStore::paths_for(const std::filesystem::path& dir,
                                            const std::optional<std::filesystem::path>& checkpoint) {
    return Paths{dir / "records.jsonl",    dir / "metrics.jsonl",    dir / "alerts.jsonl",
                 dir / "metrics.emf.jsonl", dir / "datapoints.jsonl", checkpoint.value_or(dir / "checkpoint.json")};
}

SessionStore::SessionStore(const std::filesystem::path& out_dir,
                           const std::optional<std::filesystem::path>& checkpoint, std::uint64_t start_block,
                           std::string emf_namespace)
    : paths_{paths_for(out_dir, checkpoint)}, emf_namespace_{std::move(emf_namespace)} {
    std::filesystem::create_directories(out_dir);
    dir_lock_ = std::make_unique<sink::FileLock>(out_dir / "watch");

    for (const auto* p : {&paths_.records, &paths_.metrics, &paths_.emf, &paths_.datapoints}) {
        sink::truncate_torn_tail(*p);
    }

    resumed_ = std::filesystem::exists(paths_.checkpoint);
    recovered_ = collector::load_checkpoint(paths_.checkpoint, start_block);

    // killed between the commit line and the checkpoint rename
    if (const auto last = last_line(paths_.datapoints)) {
        const auto index = last->at("datapoint").get<std::uint64_t>();
        if (index > recovered_.datapoints_emitted) {
            recovered_ = collector::CollectorCheckpoint{last->at("last_block_number").get<std::uint64_t>(),
                                                        last->at("last_block_hash").get<std::string>(), index,
                                                        last->at("emitted_at").get<TimestampMs>()};
            collector::save_checkpoint(recovered_, paths_.checkpoint);
            resumed_ = true;
        }
    }

    const auto existing = sink::replay(paths_.records);
    const auto view = sink::canonical_view(existing);
    for (const auto& b : view.blocks) {
        if (b.number > recovered_.last_block_number) {
            uncommitted_[b.number] = b.hash;
        } else {
            recent_.push_back(b);
        }
    }
    constexpr std::size_t kKeep = 16;
    if (recent_.size() > kKeep) recent_.erase(recent_.begin(), recent_.end() - kKeep);
    // a history that does not end at the checkpoint cannot anchor a reorg walk
    if (!recent_.empty() && recent_.back().hash != recovered_.last_block_hash) recent_.clear();

    records_ = std::make_unique<sink::RecordWriter>(paths_.records);
    metrics_ = std::make_unique<sink::RecordWriter>(paths_.metrics);
    emf_.open(paths_.emf, std::ios::app | std::ios::binary);
    datapoints_.open(paths_.datapoints, std::ios::app | std::ios::binary);
    if (!emf_ || !datapoints_) throw sink::SinkError("cannot open output files in " + out_dir.string());
}

void SessionStore::commit(const collector::Datapoint& dp) {
    for (const auto& r : dp.records) {
        if (const auto* b = std::get_if<BlockRecord>(&r)) {
            if (const auto it = uncommitted_.find(b->number); it != uncommitted_.end()) {
                const bool same = it->second == b->hash;
                if (!same) {
                    records_->append(SupersededMarker{it->first, it->second, dp.emitted_at});
                    ++counts_.record_lines;
                }
                uncommitted_.erase(it);
                if (same) continue;  // already on disk from the interrupted run
            }
            ++counts_.blocks;
            counts_.txs += b->transactions.size();
        }
        records_->append(r);
        ++counts_.record_lines;
    }
    records_->flush();

    for (const auto& p : dp.points) metrics_->append(p);
    counts_.metric_lines += dp.points.size();
    metrics_->flush();

    const auto emf = sink::export_emf(dp.points, emf_namespace_);
    for (const auto& line : emf.lines) emf_ << line << '\n';
    counts_.emf_lines += emf.lines.size();
    counts_.emf_rejected += emf.rejected.size();
    flush_or_throw(emf_, paths_.emf);

    datapoints_ << json{{"datapoint", dp.index},
                        {"emitted_at", dp.emitted_at},
                        {"last_block_number", dp.checkpoint.last_block_number},
                        {"last_block_hash", dp.checkpoint.last_block_hash},
                        {"points", dp.points.size()},
                        {"records", dp.records.size()}}
                       .dump()
                << '\n';
    flush_or_throw(datapoints_, paths_.datapoints);
    ++counts_.datapoints;

    collector::save_checkpoint(dp.checkpoint, paths_.checkpoint);
}

}  // namespace chainwatch
