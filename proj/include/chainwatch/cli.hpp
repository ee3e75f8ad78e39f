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

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include <chainwatch/mockchain.hpp>
#include <chainwatch/rpc_client.hpp>
#include <chainwatch/sink.hpp>

//! Command implementations behind the `chainwatch` executable. Exit codes: 0 success,
//! 1 operational failure, 2 capability shortfall.
namespace chainwatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitShortfall = 2;

struct ProbeOptions {
    Endpoint endpoint;
    std::optional<std::filesystem::path> out;
};

struct WatchOptions {
    Endpoint endpoint;
    double poll_interval_s{10.0};
    double datapoint_interval_s{60.0};
    std::uint64_t datapoints{1000};
    std::filesystem::path out_dir{"chainwatch-out"};
    std::optional<std::filesystem::path> rules;
    std::optional<std::string> webhook;
    std::optional<std::uint64_t> start_block;  // default: the node's head at first start
    std::optional<std::filesystem::path> checkpoint;
    unsigned reorg_depth{6};
};

struct AnalyzeOptions {
    std::filesystem::path in;  // a watch output directory or a single JSONL file
    sink::Figure figure{sink::Figure::fig1};
    std::filesystem::path out;
};

struct MockOptions {
    mock::Profile profile{mock::Profile::amb};
    std::string host{"127.0.0.1"};
    int port{8545};
    std::uint64_t seed{1};
    std::optional<std::filesystem::path> script;
    double block_period_s{12.0};
    std::optional<int> realtime_ms;
    std::size_t traffic{0};
    std::uint64_t gas_limit{30'000'000};
};

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err);
int cmd_watch(const WatchOptions& options, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop = nullptr);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_mock(const MockOptions& options, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop = nullptr);

//! Parses "key = value" lines; '#' starts a comment. Keys are flag names without dashes.
std::map<std::string, std::string> parse_config(std::istream& in);

//! Full command line handling. Each option resolves as flag > CHAINWATCH_<NAME> > config file > default.
//! `env` overrides the process environment for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop = nullptr,
        const std::optional<std::map<std::string, std::string>>& env = std::nullopt);

}  // namespace chainwatch::cli
