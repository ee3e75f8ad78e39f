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

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <chainwatch/collector.hpp>
#include <chainwatch/sink.hpp>

namespace chainwatch {

//! Output directory of a watch session and its commit protocol. Per datapoint: records, metrics and
//! EMF lines are flushed, then a datapoints.jsonl line marks the batch committed, then the
//! checkpoint is replaced. Reopening a directory repairs whatever an interrupted run left behind.
class SessionStore {
  public:
    struct Paths {
        std::filesystem::path records;
        std::filesystem::path metrics;
        std::filesystem::path alerts;
        std::filesystem::path emf;
        std::filesystem::path datapoints;
        std::filesystem::path checkpoint;
    };

    static Paths paths_for(const std::filesystem::path& out_dir,
                           const std::optional<std::filesystem::path>& checkpoint = std::nullopt);

    SessionStore(const std::filesystem::path& out_dir, const std::optional<std::filesystem::path>& checkpoint,
                 std::uint64_t start_block, std::string emf_namespace = "Chainwatch");

    [[nodiscard]] const Paths& paths() const { return paths_; }
    [[nodiscard]] const collector::CollectorCheckpoint& recovered() const { return recovered_; }
    [[nodiscard]] bool resumed() const { return resumed_; }
    //! Canonical committed blocks at or below the checkpoint, newest last.
    [[nodiscard]] const std::vector<BlockRecord>& recent_blocks() const { return recent_; }

    void commit(const collector::Datapoint& dp);

    struct Counts {
        std::uint64_t blocks{0};
        std::uint64_t txs{0};
        std::uint64_t record_lines{0};
        std::uint64_t metric_lines{0};
        std::uint64_t emf_lines{0};
        std::uint64_t emf_rejected{0};
        std::uint64_t datapoints{0};
    };
    //! Lines written by this instance.
    [[nodiscard]] const Counts& counts() const { return counts_; }

  private:
    Paths paths_;
    std::string emf_namespace_;
    std::unique_ptr<sink::FileLock> dir_lock_;
    collector::CollectorCheckpoint recovered_;
    bool resumed_{false};
    std::vector<BlockRecord> recent_;
    std::map<std::uint64_t, std::string> uncommitted_;  // block lines past the checkpoint
    std::unique_ptr<sink::RecordWriter> records_;
    std::unique_ptr<sink::RecordWriter> metrics_;
    std::ofstream emf_;
    std::ofstream datapoints_;
    Counts counts_;
};

}  // namespace chainwatch
