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

#include <chainwatch/alerts.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>

namespace chainwatch::alerts {

using nlohmann::json;

std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::greater: return ">";
        case Comparator::less: return "<";
        case Comparator::equal: return "==";
        case Comparator::missing_for: return "missing_for";
    }
    return "?";
}

std::optional<Comparator> comparator_from_string(std::string_view s) {
    if (s == ">") return Comparator::greater;
    if (s == "<") return Comparator::less;
    if (s == "==") return Comparator::equal;
    if (s == "missing_for") return Comparator::missing_for;
    return std::nullopt;
}

void validate(const AlertRule& rule) {
    if (rule.id.empty()) throw ConfigError("alert rule has an empty id");
    if (!metric_registry().contains(rule.metric_name)) {
        throw ConfigError("alert rule " + rule.id + " names unknown metric " + rule.metric_name);
    }
    if (!(rule.for_duration_s >= 0)) throw ConfigError("alert rule " + rule.id + " has a negative for duration");
    if (!std::isfinite(rule.threshold)) throw ConfigError("alert rule " + rule.id + " has a non-finite threshold");
    if (rule.comparator == Comparator::missing_for && !(rule.threshold > 0)) {
        throw ConfigError("alert rule " + rule.id + ": missing_for needs a positive duration");
    }
}

std::vector<AlertRule> default_rules() {
    using namespace metric_names;
    return {
        {"rpc_latency_high", std::string{kRpcLatencyMs}, Comparator::greater, 1000.0, 60.0},
        {"rpc_unavailable", std::string{kRpcSuccess}, Comparator::less, 1.0, 120.0},
        {"block_interval_long", std::string{kBlockIntervalS}, Comparator::greater, 60.0, 0.0},
        {"mempool_silent", std::string{kMempoolPending}, Comparator::missing_for, 300.0, 0.0},
    };
}

std::vector<AlertRule> rules_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("alert rules must be a JSON array");
    std::vector<AlertRule> rules;
    for (const auto& item : j) {
        try {
            AlertRule r;
            r.id = item.at("id").get<std::string>();
            r.metric_name = item.at("metric").get<std::string>();
            const auto cmp = comparator_from_string(item.at("comparator").get<std::string>());
            if (!cmp) throw ConfigError("alert rule " + r.id + " has an unknown comparator");
            r.comparator = *cmp;
            r.threshold = item.at("threshold").get<double>();
            r.for_duration_s = item.value("for_s", 0.0);
            validate(r);
            rules.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw ConfigError(std::string{"malformed alert rule: "} + e.what());
        }
    }
    return rules;
}

std::vector<AlertRule> load_rules(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) throw ConfigError("cannot open alert rules file " + path.string());
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("alert rules file is not valid JSON: " + path.string());
    return rules_from_json(j);
}

json to_json(const AlertEvent& e) {
    return json{
        {"rule_id", e.rule_id},
        {"state", e.state == AlertState::firing ? "firing" : "resolved"},
        {"fired_at", e.fired_at},
        {"resolved_at", e.resolved_at ? json(*e.resolved_at) : json(nullptr)},
        {"triggering_value", e.triggering_value},
    };
}

AlertEvent alert_event_from_json(const json& j) {
    AlertEvent e;
    e.rule_id = j.at("rule_id").get<std::string>();
    const auto state = j.at("state").get<std::string>();
    if (state != "firing" && state != "resolved") throw std::invalid_argument("unknown alert state " + state);
    e.state = state == "firing" ? AlertState::firing : AlertState::resolved;
    e.fired_at = j.at("fired_at").get<TimestampMs>();
    if (!j.at("resolved_at").is_null()) e.resolved_at = j["resolved_at"].get<TimestampMs>();
    e.triggering_value = j.at("triggering_value").get<double>();
    return e;
}

AlertEvaluator::AlertEvaluator(std::vector<AlertRule> rules) : rules_{std::move(rules)}, states_(rules_.size()) {
    for (const auto& r : rules_) validate(r);
}

void AlertEvaluator::advance_clock(TimestampMs now, std::vector<AlertEvent>& out) {
    if (first_seen_ && now < clock_) {
        throw std::invalid_argument("metric stream went backwards in time");
    }
    if (!first_seen_) first_seen_ = now;
    clock_ = now;

    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& rule = rules_[i];
        auto& st = states_[i];
        if (rule.comparator != Comparator::missing_for || st.firing) continue;
        const TimestampMs base = st.last_seen.value_or(*first_seen_);
        const auto limit_ms = static_cast<TimestampMs>(std::llround(rule.threshold * 1000.0));
        if (now - base > limit_ms) {
            st.firing = true;
            st.fired_at = base + limit_ms;
            st.triggering_value = static_cast<double>(now - base) / 1000.0;
            out.push_back({rule.id, AlertState::firing, st.fired_at, std::nullopt, st.triggering_value});
        }
    }
}

std::vector<AlertEvent> AlertEvaluator::tick(TimestampMs now) {
    std::vector<AlertEvent> out;
    advance_clock(now, out);
    return out;
}

std::vector<AlertEvent> AlertEvaluator::observe(const MetricPoint& point) {
    std::vector<AlertEvent> out;
    const TimestampMs t = point.observed_at;
    advance_clock(t, out);

    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& rule = rules_[i];
        if (rule.metric_name != point.name) continue;
        auto& st = states_[i];

        bool violated = false;
        switch (rule.comparator) {
            case Comparator::greater: violated = point.value > rule.threshold; break;
            case Comparator::less: violated = point.value < rule.threshold; break;
            case Comparator::equal: violated = point.value == rule.threshold; break;
            case Comparator::missing_for: st.last_seen = t; break;
        }

        if (violated) {
            if (!st.violating) {
                st.violating = true;
                st.violation_start = t;
            }
            const auto held_ms = static_cast<double>(t - st.violation_start);
            if (!st.firing && held_ms >= rule.for_duration_s * 1000.0) {
                st.firing = true;
                st.fired_at = t;
                st.triggering_value = point.value;
                out.push_back({rule.id, AlertState::firing, t, std::nullopt, point.value});
            }
        } else {
            st.violating = false;
            if (st.firing) {
                st.firing = false;
                out.push_back({rule.id, AlertState::resolved, st.fired_at, t, st.triggering_value});
            }
        }
    }
    return out;
}

std::vector<AlertEvent> evaluate(const std::vector<AlertRule>& rules, std::span<const MetricPoint> stream) {
    AlertEvaluator evaluator{rules};
    std::vector<AlertEvent> events;
    for (const auto& p : stream) {
        auto e = evaluator.observe(p);
        events.insert(events.end(), e.begin(), e.end());
    }
    return events;
}

void StderrAlertSink::deliver(const AlertEvent& event) { std::cerr << "alert " << to_json(event).dump() << "\n"; }

JsonlAlertSink::JsonlAlertSink(std::filesystem::path path) : path_{std::move(path)}, out_{path_, std::ios::app} {
    if (!out_) throw std::runtime_error("cannot open alert file " + path_.string());
}

void JsonlAlertSink::deliver(const AlertEvent& event) {
    std::lock_guard lock{mutex_};
    out_ << to_json(event).dump() << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("write to " + path_.string() + " failed");
}

bool DeliveryReceipt::all_ok() const {
    return std::all_of(deliveries.begin(), deliveries.end(), [](const auto& d) { return d.ok; });
}

DeliveryReceipt notify(const AlertEvent& event, std::span<const std::shared_ptr<AlertSink>> sinks) {
    DeliveryReceipt receipt;
    for (const auto& sink : sinks) {
        SinkDelivery d{sink->name(), true, {}};
        try {
            sink->deliver(event);
        } catch (const std::exception& e) {
            d.ok = false;
            d.detail = e.what();
        }
        receipt.deliveries.push_back(std::move(d));
    }
    return receipt;
}

}  // namespace chainwatch::alerts
