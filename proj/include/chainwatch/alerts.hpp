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
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <chainwatch/records.hpp>

namespace chainwatch::alerts {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Comparator { greater, less, equal, missing_for };

std::string_view to_string(Comparator c);
std::optional<Comparator> comparator_from_string(std::string_view s);

struct AlertRule {
    std::string id;
    std::string metric_name;
    Comparator comparator{Comparator::greater};
    double threshold{0};       // value, or seconds for missing_for
    double for_duration_s{0};  // ignored by missing_for

    bool operator==(const AlertRule&) const = default;
};

//! Throws ConfigError for an empty id, a metric outside the registry, or a negative duration.
void validate(const AlertRule& rule);

//! The shipped rule set: latency, availability, block interval and mempool liveness.
std::vector<AlertRule> default_rules();

//! Parses [{"id","metric","comparator","threshold","for_s"}, ...]; every rule is validated.
std::vector<AlertRule> rules_from_json(const nlohmann::json& j);
std::vector<AlertRule> load_rules(const std::filesystem::path& path);

enum class AlertState { firing, resolved };

struct AlertEvent {
    std::string rule_id;
    AlertState state{AlertState::firing};
    TimestampMs fired_at{0};
    std::optional<TimestampMs> resolved_at;
    double triggering_value{0};

    bool operator==(const AlertEvent&) const = default;
};

nlohmann::json to_json(const AlertEvent& e);
AlertEvent alert_event_from_json(const nlohmann::json& j);

//! Per-rule episode state machine over a chronological metric stream. The same instance serves
//! offline replay (observe only) and live use (observe plus periodic tick).
class AlertEvaluator {
  public:
    explicit AlertEvaluator(std::vector<AlertRule> rules);

    //! Throws std::invalid_argument if `point` is older than the previous one.
    std::vector<AlertEvent> observe(const MetricPoint& point);

    //! Advances time without a point so missing_for rules can fire.
    std::vector<AlertEvent> tick(TimestampMs now);

    [[nodiscard]] const std::vector<AlertRule>& rules() const { return rules_; }

  private:
    struct RuleState {
        bool violating{false};
        TimestampMs violation_start{0};
        bool firing{false};
        TimestampMs fired_at{0};
        double triggering_value{0};
        std::optional<TimestampMs> last_seen;
    };

    void advance_clock(TimestampMs now, std::vector<AlertEvent>& out);

    std::vector<AlertRule> rules_;
    std::vector<RuleState> states_;
    std::optional<TimestampMs> first_seen_;
    TimestampMs clock_{0};
};

std::vector<AlertEvent> evaluate(const std::vector<AlertRule>& rules, std::span<const MetricPoint> stream);

class AlertSink {
  public:
    virtual ~AlertSink() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    //! Throws on delivery failure.
    virtual void deliver(const AlertEvent& event) = 0;
};

class StderrAlertSink final : public AlertSink {
  public:
    [[nodiscard]] std::string name() const override { return "stderr"; }
    void deliver(const AlertEvent& event) override;
};

//! Appends one JSON object per event.
class JsonlAlertSink final : public AlertSink {
  public:
    explicit JsonlAlertSink(std::filesystem::path path);
    [[nodiscard]] std::string name() const override { return "jsonl:" + path_.string(); }
    void deliver(const AlertEvent& event) override;

  private:
    std::filesystem::path path_;
    std::mutex mutex_;
    std::ofstream out_;
};

//! POSTs the event JSON; any non-2xx status or transport failure is a delivery failure.
class WebhookAlertSink final : public AlertSink {
  public:
    explicit WebhookAlertSink(std::string url, int timeout_ms = 2000);
    [[nodiscard]] std::string name() const override { return "webhook:" + url_; }
    void deliver(const AlertEvent& event) override;

  private:
    std::string url_;
    int timeout_ms_;
};

struct SinkDelivery {
    std::string sink;
    bool ok{false};
    std::string detail;
};

struct DeliveryReceipt {
    std::vector<SinkDelivery> deliveries;
    [[nodiscard]] bool all_ok() const;
};

//! Delivers to every sink; one failing sink never prevents delivery to the others.
DeliveryReceipt notify(const AlertEvent& event, std::span<const std::shared_ptr<AlertSink>> sinks);

}  // namespace chainwatch::alerts
