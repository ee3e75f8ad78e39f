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

#include "support/emf_validator.hpp"

#include <set>

#include <nlohmann/json.hpp>

namespace chainwatch::testing {

using nlohmann::json;

namespace {

    const std::set<std::string> kUnits{
        "Seconds",       "Microseconds",     "Milliseconds",     "Bytes",           "Kilobytes",
        "Megabytes",     "Gigabytes",        "Terabytes",        "Bits",            "Kilobits",
        "Megabits",      "Gigabits",         "Terabits",         "Percent",         "Count",
        "Bytes/Second",  "Kilobytes/Second", "Megabytes/Second", "Gigabytes/Second", "Terabytes/Second",
        "Bits/Second",   "Kilobits/Second",  "Megabits/Second",  "Gigabits/Second", "Terabits/Second",
        "Count/Second",  "None",
    };

}  // namespace

std::vector<std::string> validate_emf_line(std::string_view line) {
    std::vector<std::string> problems;
    const json root = json::parse(line, nullptr, false);
    if (root.is_discarded() || !root.is_object()) return {"not a JSON object"};

    const auto aws = root.find("_aws");
    if (aws == root.end() || !aws->is_object()) return {"missing _aws object"};

    const auto ts = aws->find("Timestamp");
    if (ts == aws->end() || !ts->is_number_integer() || ts->get<std::int64_t>() < 0) {
        problems.emplace_back("_aws.Timestamp must be a non-negative integer of epoch milliseconds");
    }

    const auto directives = aws->find("CloudWatchMetrics");
    if (directives == aws->end() || !directives->is_array() || directives->empty()) {
        problems.emplace_back("_aws.CloudWatchMetrics must be a non-empty array");
        return problems;
    }

    for (const auto& d : *directives) {
        if (!d.is_object()) {
            problems.emplace_back("metric directive is not an object");
            continue;
        }
        const auto ns = d.find("Namespace");
        if (ns == d.end() || !ns->is_string() || ns->get<std::string>().empty() || ns->get<std::string>().size() > 255) {
            problems.emplace_back("Namespace must be a non-empty string of at most 255 characters");
        }

        const auto dims = d.find("Dimensions");
        if (dims == d.end() || !dims->is_array()) {
            problems.emplace_back("Dimensions must be an array");
        } else {
            for (const auto& set : *dims) {
                if (!set.is_array() || set.size() > 30) {
                    problems.emplace_back("each dimension set must be an array of at most 30 keys");
                    continue;
                }
                for (const auto& key : set) {
                    if (!key.is_string()) {
                        problems.emplace_back("dimension key is not a string");
                        continue;
                    }
                    const auto member = root.find(key.get<std::string>());
                    if (member == root.end() || !member->is_string()) {
                        problems.emplace_back("dimension " + key.get<std::string>() + " has no top-level string value");
                    }
                }
            }
        }

        const auto metrics = d.find("Metrics");
        if (metrics == d.end() || !metrics->is_array() || metrics->size() > 100) {
            problems.emplace_back("Metrics must be an array of at most 100 definitions");
            continue;
        }
        for (const auto& m : *metrics) {
            const auto name = m.is_object() ? m.find("Name") : m.end();
            if (!m.is_object() || name == m.end() || !name->is_string() || name->get<std::string>().empty()) {
                problems.emplace_back("metric definition without a Name");
                continue;
            }
            if (const auto unit = m.find("Unit"); unit != m.end()) {
                if (!unit->is_string() || !kUnits.contains(unit->get<std::string>())) {
                    problems.emplace_back("metric " + name->get<std::string>() + " has an invalid Unit");
                }
            }
            const auto value = root.find(name->get<std::string>());
            bool numeric = value != root.end() && value->is_number();
            if (value != root.end() && value->is_array()) {
                numeric = !value->empty();
                for (const auto& v : *value) numeric = numeric && v.is_number();
            }
            if (!numeric) problems.emplace_back("metric " + name->get<std::string>() + " has no top-level numeric value");
        }
    }
    return problems;
}

}  // namespace chainwatch::testing
