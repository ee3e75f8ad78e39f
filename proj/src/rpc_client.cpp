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

#include <chainwatch/rpc_client.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace chainwatch {

using nlohmann::json;

namespace {
    const std::string kZeroAddress = "0x0000000000000000000000000000000000000000";
    const std::string kZeroHash = "0x0000000000000000000000000000000000000000000000000000000000000000";
}  // namespace

ParsedUrl parse_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) throw std::invalid_argument("url has no scheme: " + std::string{url});
    ParsedUrl out;
    out.scheme = std::string{url.substr(0, scheme_end)};
    std::transform(out.scheme.begin(), out.scheme.end(), out.scheme.begin(), ::tolower);
    if (out.scheme != "http" && out.scheme != "https") {
        throw std::invalid_argument("url scheme must be http or https: " + std::string{url});
    }
    auto rest = url.substr(scheme_end + 3);
    const auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    out.path = slash == std::string_view::npos ? "/" : std::string{rest.substr(slash)};
    if (authority.empty()) throw std::invalid_argument("url has no host: " + std::string{url});

    std::string_view host = authority;
    std::string_view port;
    if (authority.front() == '[') {
        const auto close = authority.find(']');
        if (close == std::string_view::npos) throw std::invalid_argument("bad IPv6 literal: " + std::string{url});
        host = authority.substr(1, close - 1);
        if (close + 1 < authority.size()) {
            if (authority[close + 1] != ':') throw std::invalid_argument("bad authority: " + std::string{url});
            port = authority.substr(close + 2);
        }
    } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        host = authority.substr(0, colon);
        port = authority.substr(colon + 1);
    }
    if (host.empty()) throw std::invalid_argument("url has no host: " + std::string{url});
    out.host = std::string{host};
    if (port.empty()) {
        out.port = out.scheme == "https" ? 443 : 80;
    } else {
        int p = 0;
        for (char c : port) {
            if (c < '0' || c > '9') throw std::invalid_argument("bad port in url: " + std::string{url});
            p = p * 10 + (c - '0');
            if (p > 65535) throw std::invalid_argument("port out of range: " + std::string{url});
        }
        if (p == 0) throw std::invalid_argument("port out of range: " + std::string{url});
        out.port = p;
    }
    return out;
}

void Endpoint::validate() const {
    (void)parse_url(url);
    if (timeout_ms <= 0) throw std::invalid_argument("endpoint timeout_ms must be positive");
    if (max_retries < 0) throw std::invalid_argument("endpoint max_retries must be non-negative");
}

std::string_view to_string(TransportErrorKind kind) {
    switch (kind) {
        case TransportErrorKind::timeout: return "timeout";
        case TransportErrorKind::connection_refused: return "connection_refused";
        case TransportErrorKind::tls: return "tls";
        case TransportErrorKind::malformed_response: return "malformed_response";
    }
    return "unknown";
}

std::string_view RpcResult::outcome_name() const {
    if (is_success()) return "success";
    if (is_rpc_error()) return "rpc_error";
    return "transport_error";
}

std::chrono::milliseconds RetryPolicy::backoff_for(int attempt) const {
    double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt);
    ms = std::min(ms, static_cast<double>(max_backoff.count()));
    return std::chrono::milliseconds{static_cast<std::int64_t>(ms)};
}

std::variant<RpcSuccess, RpcError, TransportError> interpret_response(const HttpReply& reply) {
    json body = json::parse(reply.body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded() || !body.is_object()) {
        return TransportError{TransportErrorKind::malformed_response,
                              "HTTP " + std::to_string(reply.status) + ": body is not a JSON-RPC object"};
    }
    if (const auto err = body.find("error"); err != body.end() && !err->is_null()) {
        if (!err->is_object() || !err->contains("code") || !(*err)["code"].is_number_integer()) {
            return TransportError{TransportErrorKind::malformed_response, "error member without integer code"};
        }
        RpcError out;
        out.code = (*err)["code"].get<std::int64_t>();
        if (const auto msg = err->find("message"); msg != err->end() && msg->is_string()) {
            out.message = msg->get<std::string>();
        }
        return out;
    }
    if (const auto res = body.find("result"); res != body.end()) {
        return RpcSuccess{*res};
    }
    return TransportError{TransportErrorKind::malformed_response,
                          "HTTP " + std::to_string(reply.status) + ": response has neither result nor error"};
}

RpcClient::RpcClient(std::shared_ptr<Transport> transport, RetryPolicy retry)
    : transport_{std::move(transport)}, retry_{retry} {
    if (!transport_) throw std::invalid_argument("RpcClient needs a transport");
}

RpcResult RpcClient::call(const Endpoint& endpoint, std::string_view method, json params) const {
    if (method.empty()) throw std::invalid_argument("rpc method must be non-empty");
    if (!params.is_array()) throw std::invalid_argument("rpc params must be a JSON array");

    const json request{
        {"jsonrpc", "2.0"},
        {"id", next_id_.fetch_add(1)},
        {"method", method},
        {"params", std::move(params)},
    };
    const std::string body = request.dump();

    RpcResult result;
    result.method = std::string{method};
    for (int attempt = 0;; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        const TransportReply reply = transport_->post(endpoint, body);
        const auto finished = std::chrono::steady_clock::now();
        result.latency_ms = std::chrono::duration<double, std::milli>(finished - started).count();
        result.observed_at = now_ms();

        if (const auto* http = std::get_if<HttpReply>(&reply)) {
            result.outcome = interpret_response(*http);
        } else {
            result.outcome = std::get<TransportError>(reply);
        }
        if (!result.is_transport_error() || attempt >= endpoint.max_retries) break;
        std::this_thread::sleep_for(retry_.backoff_for(attempt));
    }
    return result;
}

std::string_view to_string(Capability c) {
    switch (c) {
        case Capability::supported: return "Supported";
        case Capability::restricted: return "Restricted";
        case Capability::transport_failed: return "TransportFailed";
    }
    return "unknown";
}

const CapabilityEntry* CapabilityMatrix::find(std::string_view method) const {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.method == method; });
    return it == entries.end() ? nullptr : &*it;
}

std::size_t CapabilityMatrix::count(Capability c) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [c](const auto& e) { return e.status == c; }));
}

json CapabilityMatrix::to_json() const {
    json methods = json::array();
    for (const auto& e : entries) {
        json row{{"method", e.method}, {"status", to_string(e.status)}};
        if (e.status != Capability::supported) row["message"] = e.message;
        methods.push_back(std::move(row));
    }
    return json{
        {"probed_at", probed_at},
        {"supported", count(Capability::supported)},
        {"restricted", count(Capability::restricted)},
        {"transport_failed", count(Capability::transport_failed)},
        {"methods", std::move(methods)},
    };
}

const std::vector<std::string>& supported_reference_methods() {
    static const std::vector<std::string> methods{
        "web3_clientVersion", "eth_blockNumber",    "eth_getBlockByNumber", "eth_getTransactionByHash",
        "eth_getTransactionReceipt", "eth_call",    "eth_getLogs",          "eth_gasPrice",
        "eth_estimateGas",    "eth_getBalance",     "eth_getCode",          "net_version",
        "net_listening",      "eth_syncing",        "eth_getTransactionCount", "txpool_status",
    };
    return methods;
}

const std::vector<std::pair<std::string, std::string>>& restricted_reference_methods() {
    static const std::vector<std::pair<std::string, std::string>> methods{
        {"eth_sendRawTransaction", "Typed transaction too short"},
        {"txpool_content", "Method not available on AMB"},
        {"debug_traceTransaction", "Restricted method"},
        {"eth_mining", "Not supported by AMB"},
    };
    return methods;
}

std::vector<ProbeSpec> default_probe_set() {
    const json zero_call{{"from", kZeroAddress}, {"to", kZeroAddress}, {"value", "0x0"}, {"data", "0x"}};
    return {
        {"web3_clientVersion", json::array()},
        {"eth_blockNumber", json::array()},
        {"eth_getBlockByNumber", json::array({"latest", false})},
        {"eth_getTransactionByHash", json::array({kZeroHash})},
        {"eth_getTransactionReceipt", json::array({kZeroHash})},
        {"eth_call", json::array({zero_call, "latest"})},
        {"eth_getLogs", json::array({json{{"fromBlock", "latest"}, {"toBlock", "latest"}}})},
        {"eth_gasPrice", json::array()},
        {"eth_estimateGas", json::array({zero_call})},
        {"eth_getBalance", json::array({kZeroAddress, "latest"})},
        {"eth_getCode", json::array({kZeroAddress, "latest"})},
        {"net_version", json::array()},
        {"net_listening", json::array()},
        {"eth_syncing", json::array()},
        {"eth_getTransactionCount", json::array({kZeroAddress, "latest"})},
        {"txpool_status", json::array()},
        // a one-byte typed envelope can never decode into a transaction, so nothing is ever submitted
        {"eth_sendRawTransaction", json::array({"0x02"})},
        {"txpool_content", json::array()},
        {"debug_traceTransaction", json::array({kZeroHash})},
        {"eth_mining", json::array()},
    };
}

CapabilityMatrix probe_capabilities(const RpcClient& client, const Endpoint& endpoint,
                                    std::span<const ProbeSpec> methods) {
    CapabilityMatrix matrix;
    matrix.probed_at = now_ms();
    for (const auto& probe : methods) {
        if (matrix.find(probe.method) != nullptr) continue;
        const RpcResult r = client.call(endpoint, probe.method, probe.params);
        CapabilityEntry entry{probe.method, Capability::supported, {}};
        if (r.is_rpc_error()) {
            entry.status = Capability::restricted;
            entry.message = r.rpc_error().message;
        } else if (r.is_transport_error()) {
            entry.status = Capability::transport_failed;
            entry.message = std::string{to_string(r.transport_error().kind)} + ": " + r.transport_error().detail;
        }
        matrix.entries.push_back(std::move(entry));
    }
    return matrix;
}

}  // namespace chainwatch
