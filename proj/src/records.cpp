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

#include <chainwatch/records.hpp>

#include <array>
#include <chrono>
#include <stdexcept>

namespace chainwatch {

TimestampMs now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

bool is_hex_bytes(std::string_view s, std::size_t bytes) {
    if (s.size() != 2 + 2 * bytes || s[0] != '0' || s[1] != 'x') return false;
    for (char c : s.substr(2)) {
        const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
        if (!hex) return false;
    }
    return true;
}

namespace {
    constexpr std::array<std::pair<Unit, std::string_view>, 8> kUnitNames{{
        {Unit::ratio, "ratio"},
        {Unit::blocks, "blocks"},
        {Unit::wei, "wei"},
        {Unit::eth, "eth"},
        {Unit::gwei, "gwei"},
        {Unit::ms, "ms"},
        {Unit::count, "count"},
        {Unit::seconds, "seconds"},
    }};
}  // namespace

std::string_view to_string(Unit unit) {
    for (const auto& [u, name] : kUnitNames) {
        if (u == unit) return name;
    }
    return "unknown";
}

std::optional<Unit> unit_from_string(std::string_view s) {
    for (const auto& [u, name] : kUnitNames) {
        if (name == s) return u;
    }
    return std::nullopt;
}

const std::map<std::string, Unit, std::less<>>& metric_registry() {
    using namespace metric_names;
    static const std::map<std::string, Unit, std::less<>> registry{
        {std::string{kRpcLatencyMs}, Unit::ms},
        {std::string{kRpcSuccess}, Unit::count},
        {std::string{kChainHead}, Unit::blocks},
        {std::string{kBlockGasUtilization}, Unit::ratio},
        {std::string{kBlockTxCount}, Unit::count},
        {std::string{kBlockEthTransferredWei}, Unit::wei},
        {std::string{kBlockIntervalS}, Unit::seconds},
        {std::string{kMempoolPending}, Unit::count},
        {std::string{kMempoolQueued}, Unit::count},
        {std::string{kTxInclusionDelayBlocks}, Unit::blocks},
    };
    return registry;
}

MetricPoint make_point(std::string_view name, double value, TimestampMs at,
                       std::map<std::string, std::string> dimensions) {
    const auto& registry = metric_registry();
    const auto it = registry.find(name);
    if (it == registry.end()) throw std::invalid_argument("metric not in registry: " + std::string{name});
    return MetricPoint{it->first, value, it->second, std::move(dimensions), at};
}

}  // namespace chainwatch
