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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <chainwatch/records.hpp>

//! Durable output: append-only JSONL record streams, Embedded Metric Format export and
//! plot-ready figure CSVs. Timestamps are integer UTC milliseconds; wei values are decimal strings.
namespace chainwatch::sink {

class SinkError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Record& record);
nlohmann::json to_json(const TxRecord& tx);
//! Throws std::invalid_argument when a field is missing or has the wrong type.
Record record_from_json(const nlohmann::json& j);

//! Exclusive advisory lock on "<target>.lock", released when the holder exits for any reason.
class FileLock {
  public:
    explicit FileLock(const std::filesystem::path& target);
    ~FileLock();
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

  private:
    int fd_{-1};
};

//! Single writer per path. Lines are only ever appended.
class RecordWriter {
  public:
    explicit RecordWriter(const std::filesystem::path& path);

    void append(const Record& record);
    std::size_t append(std::span<const Record> records);
    //! Throws SinkError if the stream failed (disk full, permissions).
    void flush();

    [[nodiscard]] std::size_t written() const { return written_; }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    FileLock lock_;
    std::ofstream out_;
    std::size_t written_{0};
};

std::size_t write_records(std::span<const Record> records, const std::filesystem::path& path);

class ReplayError : public std::runtime_error {
  public:
    ReplayError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_{line} {}
    [[nodiscard]] std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

//! Records in file order. A missing file replays as empty; a malformed line throws ReplayError.
std::vector<Record> replay(const std::filesystem::path& path);

//! Drops a partial final line left by an interrupted writer. Returns the number of bytes removed.
std::size_t truncate_torn_tail(const std::filesystem::path& path);

//! CloudWatch unit name for a metric unit.
std::string_view emf_unit(Unit unit);

struct EmfRejection {
    std::size_t index{0};
    std::string reason;
};

struct EmfExport {
    std::vector<std::string> lines;
    std::vector<EmfRejection> rejected;
};

//! One EMF object per (timestamp, dimension set); a repeated metric name starts a new object.
EmfExport export_emf(std::span<const MetricPoint> points, std::string_view metric_namespace);

//! Non-superseded blocks plus every transaction (embedded or standalone, deduplicated by hash).
struct CanonicalView {
    std::vector<BlockRecord> blocks;
    std::vector<TxRecord> txs;
    std::vector<MempoolSnapshot> mempool;
    std::vector<MetricPoint> points;
};

CanonicalView canonical_view(std::span<const Record> records);

enum class Figure { fig1, fig2, fig3, fig4 };

std::optional<Figure> figure_from_string(std::string_view s);
std::string_view to_string(Figure f);

struct FigureTable {
    std::string header;
    std::vector<std::string> rows;

    [[nodiscard]] std::string csv() const;
};

//! fig1 block,utilization,tx_count (utilization > 0.90)
//! fig2 gas_price_gwei,delay_blocks
//! fig3 block,total_eth
//! fig4 rank,address,role,tx_count,avg_gas_price_gwei (top 20 senders then top 20 receivers)
FigureTable figure_table(std::span<const Record> records, Figure figure);

//! Writes the CSV (LF endings, '.' decimals) and returns the number of data rows.
std::size_t emit_figure_csv(std::span<const Record> records, Figure figure, const std::filesystem::path& path);

}  // namespace chainwatch::sink
