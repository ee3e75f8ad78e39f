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

#include <httplib.h>

#include <chainwatch/alerts.hpp>
#include <chainwatch/rpc_client.hpp>

namespace chainwatch::alerts {

WebhookAlertSink::WebhookAlertSink(std::string url, int timeout_ms) : url_{std::move(url)}, timeout_ms_{timeout_ms} {
    (void)parse_url(url_);
}

void WebhookAlertSink::deliver(const AlertEvent& event) {
    const ParsedUrl url = parse_url(url_);
    httplib::Client client{url.scheme + "://" + url.host + ":" + std::to_string(url.port)};
    const std::chrono::milliseconds timeout{timeout_ms_};
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(url.path, to_json(event).dump(), "application/json");
    if (!res) throw std::runtime_error("webhook unreachable: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw std::runtime_error("webhook answered HTTP " + std::to_string(res->status));
    }
}

}  // namespace chainwatch::alerts
