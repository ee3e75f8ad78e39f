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

#include <chrono>

#include <httplib.h>

#include <chainwatch/rpc_client.hpp>

namespace chainwatch {

namespace {

    std::pair<std::string, std::string> split_header(const std::string& line) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) return {"Authorization", line};
        std::string name = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        const auto first = value.find_first_not_of(" \t");
        value = first == std::string::npos ? std::string{} : value.substr(first);
        return {std::move(name), std::move(value)};
    }

    class HttpTransport final : public Transport {
      public:
        TransportReply post(const Endpoint& endpoint, const std::string& body) override {
            const ParsedUrl url = parse_url(endpoint.url);
            const std::string host_port = url.scheme + "://" + url.host + ":" + std::to_string(url.port);

            httplib::Client client{host_port};
            const auto timeout = std::chrono::milliseconds{endpoint.timeout_ms};
            client.set_connection_timeout(timeout);
            client.set_read_timeout(timeout);
            client.set_write_timeout(timeout);
            client.set_keep_alive(false);

            httplib::Headers headers;
            if (endpoint.auth_header) {
                auto [name, value] = split_header(*endpoint.auth_header);
                headers.emplace(std::move(name), std::move(value));
            }

            const auto started = std::chrono::steady_clock::now();
            auto res = client.Post(url.path, headers, body, "application/json");
            if (res) return HttpReply{res->status, res->body};

            const auto elapsed = std::chrono::steady_clock::now() - started;
            const auto err = res.error();
            const std::string detail = httplib::to_string(err);
            switch (err) {
                case httplib::Error::ConnectionTimeout:
                    return TransportError{TransportErrorKind::timeout, detail};
                case httplib::Error::Read:
                case httplib::Error::Write:
                    if (elapsed >= timeout) return TransportError{TransportErrorKind::timeout, detail};
                    return TransportError{TransportErrorKind::malformed_response, detail};
                case httplib::Error::SSLConnection:
                case httplib::Error::SSLLoadingCerts:
                case httplib::Error::SSLServerVerification:
                case httplib::Error::SSLPeerCouldBeClosed_:
                    return TransportError{TransportErrorKind::tls, detail};
                default:
                    return TransportError{TransportErrorKind::connection_refused, detail};
            }
        }
    };

}  // namespace

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttpTransport>(); }

}  // namespace chainwatch
