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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace chainwatch::collector {

namespace {

    using SteadyClock = std::chrono::steady_clock;

    std::chrono::nanoseconds seconds_to_ns(double s) {
        return std::chrono::nanoseconds{static_cast<std::int64_t>(std::llround(s * 1e9))};
    }

    //! Returns false if `stop` was raised before the deadline.
    bool sleep_until(SteadyClock::time_point deadline, const std::atomic<bool>* stop) {
        constexpr auto kSlice = std::chrono::milliseconds{50};
        while (true) {
            if (stop != nullptr && stop->load()) return false;
            const auto now = SteadyClock::now();
            if (now >= deadline) return true;
            std::this_thread::sleep_until(std::min(deadline, now + kSlice));
        }
    }

}  // namespace

SessionSummary run_session(Collector& collector, CollectorCheckpoint& checkpoint, const SessionConfig& config,
                           const SessionHooks& hooks, const std::atomic<bool>* stop) {
    if (!(config.poll_interval_s > 0) || !(config.datapoint_interval_s > 0)) {
        throw std::invalid_argument("session intervals must be positive");
    }
    if (config.datapoint_target == 0) throw std::invalid_argument("datapoint target must be positive");

    const auto poll = seconds_to_ns(std::min(config.poll_interval_s, config.datapoint_interval_s));
    const auto dp = seconds_to_ns(config.datapoint_interval_s);
    if (poll.count() <= 0) throw std::invalid_argument("poll interval below clock resolution");

    SessionSummary summary;
    Datapoint pending;
    std::uint64_t pending_blocks = 0;
    std::uint64_t pending_txs = 0;
    std::uint64_t emitted_here = 0;

    const auto start = SteadyClock::now();
    std::int64_t i = 0;
    while (checkpoint.datapoints_emitted < config.datapoint_target) {
        ++i;
        if (!sleep_until(start + i * poll, stop)) {
            summary.interrupted = true;
            break;
        }

        CycleResult cycle = collector.run_poll_cycle(checkpoint);
        ++summary.cycles;
        if (!cycle.available) ++summary.failed_cycles;
        checkpoint.last_block_number = cycle.checkpoint.last_block_number;
        checkpoint.last_block_hash = cycle.checkpoint.last_block_hash;

        auto records = cycle.records();
        pending.records.insert(pending.records.end(), std::make_move_iterator(records.begin()),
                               std::make_move_iterator(records.end()));
        pending.points.insert(pending.points.end(), cycle.points.begin(), cycle.points.end());
        pending_blocks += cycle.blocks.size();
        for (const auto& b : cycle.blocks) pending_txs += b.transactions.size();
        if (hooks.on_cycle) hooks.on_cycle(cycle);

        const auto due = static_cast<std::uint64_t>((i * poll) / dp);
        while (emitted_here < due && checkpoint.datapoints_emitted < config.datapoint_target) {
            ++emitted_here;
            ++checkpoint.datapoints_emitted;
            checkpoint.updated_at = collector.now();
            pending.index = checkpoint.datapoints_emitted;
            pending.emitted_at = checkpoint.updated_at;
            pending.checkpoint = checkpoint;
            if (hooks.on_datapoint) hooks.on_datapoint(pending);
            ++summary.datapoints;
            summary.blocks += pending_blocks;
            summary.txs += pending_txs;
            pending = Datapoint{};
            pending_blocks = pending_txs = 0;
        }

        // an overrun skips every deadline it cannot meet within half an interval
        const auto now = SteadyClock::now();
        while (start + (i + 1) * poll + poll / 2 < now) {
            ++i;
            ++summary.missed_deadlines;
        }
    }

    summary.duration_s = std::chrono::duration<double>(SteadyClock::now() - start).count();
    return summary;
}

}  // namespace chainwatch::collector
