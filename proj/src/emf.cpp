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

#include <cmath>
#include <set>

namespace chainwatch::sink {

using nlohmann::json;

std::string_view emf_unit(Unit unit) {
    switch (unit) {
        case Unit::ms: return "Milliseconds";
        case Unit::count: return "Count";
        case Unit::seconds: return "Seconds";
        // CloudWatch has no unit for ratios, block counts or currency amounts
        case Unit::ratio:
        case Unit::blocks:
        case Unit::wei:
        case Unit::eth:
        case Unit::gwei: return "None";
    }
    return "None";
}

namespace {

    struct Group {
        TimestampMs at{0};
        const std::map<std::string, std::string>* dimensions{nullptr};
        std::vector<const MetricPoint*> points;
        std::set<std::string> names;
    };

    std::string render(const Group& g, std::string_view ns) {
        json dim_keys = json::array();
        for (const auto& [k, _] : *g.dimensions) dim_keys.push_back(k);

        json metrics = json::array();
        json root = json::object();
        for (const auto* p : g.points) {
            metrics.push_back({{"Name", p->name}, {"Unit", emf_unit(p->unit)}});
            root[p->name] = p->value;
        }
        for (const auto& [k, v] : *g.dimensions) root[k] = v;

        root["_aws"] = {
            {"Timestamp", g.at},
            {"CloudWatchMetrics",
             json::array({{{"Namespace", ns}, {"Dimensions", json::array({dim_keys})}, {"Metrics", metrics}}})},
        };
        return root.dump();
    }

}  // namespace

EmfExport export_emf(std::span<const MetricPoint> points, std::string_view metric_namespace) {
    if (metric_namespace.empty()) throw std::invalid_argument("EMF namespace must not be empty");

    EmfExport out;
    std::vector<Group> groups;
    std::map<std::pair<TimestampMs, std::map<std::string, std::string>>, std::size_t> open;

    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.name.empty()) {
            out.rejected.push_back({i, "empty metric name"});
            continue;
        }
        if (p.name == "_aws") {
            out.rejected.push_back({i, "metric name collides with the _aws member"});
            continue;
        }
        if (!std::isfinite(p.value)) {
            out.rejected.push_back({i, "non-finite value for " + p.name});
            continue;
        }
        if (p.dimensions.contains(p.name) || p.dimensions.contains("_aws")) {
            out.rejected.push_back({i, "dimension name collides with a member of " + p.name});
            continue;
        }

        auto key = std::make_pair(p.observed_at, p.dimensions);
        auto it = open.find(key);
        if (it == open.end() || groups[it->second].names.contains(p.name)) {
            groups.push_back({p.observed_at, &p.dimensions, {}, {}});
            it = open.insert_or_assign(std::move(key), groups.size() - 1).first;
        }
        auto& g = groups[it->second];
        g.points.push_back(&p);
        g.names.insert(p.name);
    }

    out.lines.reserve(groups.size());
    for (const auto& g : groups) out.lines.push_back(render(g, metric_namespace));
    return out;
}

}  // namespace chainwatch::sink
