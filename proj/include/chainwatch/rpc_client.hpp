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
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include <chainwatch/records.hpp>

namespace chainwatch {

struct Endpoint {
    std::string url;
    std::optional<std::string> auth_header;  // "Name: value", sent verbatim
    int timeout_ms{5000};
    int max_retries{2};

    //! Throws std::invalid_argument unless the scheme is http/https, timeout_ms > 0 and max_retries >= 0.
    void validate() const;
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port{0};
    std::string path;  // always starts with '/'
};

//! Splits scheme://host[:port][/path]. Throws std::invalid_argument on anything else.
ParsedUrl parse_url(std::string_view url);

enum class TransportErrorKind { timeout, connection_refused, tls, malformed_response };

std::string_view to_string(TransportErrorKind kind);

struct RpcSuccess {
    nlohmann::json value;
};

struct RpcError {
    std::int64_t code{0};
    std::string message;
};

struct TransportError {
    TransportErrorKind kind{TransportErrorKind::connection_refused};
    std::string detail;
};

struct RpcResult {
    std::string method;
    std::variant<RpcSuccess, RpcError, TransportError> outcome;
    std::optional<double> latency_ms;
    TimestampMs observed_at{0};

    [[nodiscard]] bool is_success() const { return std::holds_alternative<RpcSuccess>(outcome); }
    [[nodiscard]] bool is_rpc_error() const { return std::holds_alternative<RpcError>(outcome); }
    [[nodiscard]] bool is_transport_error() const { return std::holds_alternative<TransportError>(outcome); }
    [[nodiscard]] const nlohmann::json& value() const { return std::get<RpcSuccess>(outcome).value; }
    [[nodiscard]] const RpcError& rpc_error() const { return std::get<RpcError>(outcome); }
    [[nodiscard]] const TransportError& transport_error() const { return std::get<TransportError>(outcome); }
    //! "success" | "rpc_error" | "transport_error"
    [[nodiscard]] std::string_view outcome_name() const;
};

struct HttpReply {
    int status{0};
    std::string body;
};

using TransportReply = std::variant<HttpReply, TransportError>;

//! Moves one request body to the endpoint and back. Implementations must be safe to call concurrently.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual TransportReply post(const Endpoint& endpoint, const std::string& body) = 0;
};

//! HTTP(S) transport backed by cpp-httplib.
std::shared_ptr<Transport> make_http_transport();

struct RetryPolicy {
    std::chrono::milliseconds initial_backoff{250};
    double multiplier{2.0};
    std::chrono::milliseconds max_backoff{4000};

    [[nodiscard]] std::chrono::milliseconds backoff_for(int attempt) const;
};

class RpcClient {
  public:
    explicit RpcClient(std::shared_ptr<Transport> transport = make_http_transport(), RetryPolicy retry = {});

    //! One JSON-RPC 2.0 call. Transport errors are retried up to endpoint.max_retries times with
    //! exponential backoff; a JSON-RPC error object is returned as-is and never retried.
    [[nodiscard]] RpcResult call(const Endpoint& endpoint, std::string_view method,
                                 nlohmann::json params = nlohmann::json::array()) const;

    [[nodiscard]] const RetryPolicy& retry_policy() const { return retry_; }

  private:
    std::shared_ptr<Transport> transport_;
    RetryPolicy retry_;
    mutable std::atomic<std::int64_t> next_id_{1};
};

//! Interprets a JSON-RPC response body. Exposed for tests.
std::variant<RpcSuccess, RpcError, TransportError> interpret_response(const HttpReply& reply);

enum class Capability { supported, restricted, transport_failed };

std::string_view to_string(Capability c);

struct ProbeSpec {
    std::string method;
    nlohmann::json params;
};

struct CapabilityEntry {
    std::string method;
    Capability status{Capability::transport_failed};
    std::string message;  // verbatim server message for restricted entries

    bool operator==(const CapabilityEntry&) const = default;
};

struct CapabilityMatrix {
    std::vector<CapabilityEntry> entries;  // probe order, one per method
    TimestampMs probed_at{0};

    [[nodiscard]] const CapabilityEntry* find(std::string_view method) const;
    [[nodiscard]] std::size_t count(Capability c) const;
    [[nodiscard]] nlohmann::json to_json() const;
};

//! Methods a managed mainnet endpoint answered successfully.
const std::vector<std::string>& supported_reference_methods();
//! Methods a managed mainnet endpoint refused, with the refusal message.
const std::vector<std::pair<std::string, std::string>>& restricted_reference_methods();

//! The union of the two reference lists, each with harmless parameters.
std::vector<ProbeSpec> default_probe_set();

CapabilityMatrix probe_capabilities(const RpcClient& client, const Endpoint& endpoint,
                                    std::span<const ProbeSpec> methods);

}  // namespace chainwatch
