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

#include <iostream>

#include <httplib.h>

#include <chainwatch/mockchain.hpp>

namespace chainwatch::mock {

using nlohmann::json;

namespace {

    bool is_loopback(const std::string& addr) {
        return addr == "127.0.0.1" || addr == "::1" || addr == "::ffff:127.0.0.1";
    }

    void reply_json(httplib::Response& res, const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

}  // namespace

MockServer::MockServer(std::shared_ptr<MockChain> chain, ServeOptions options)
    : chain_{std::move(chain)}, options_{std::move(options)}, port_{options_.port} {
    if (!chain_) throw std::invalid_argument("MockServer needs a chain");
    if (options_.traffic_per_block > 0) {
        traffic_ = std::make_unique<TrafficGenerator>(chain_->config().seed, options_.traffic_ranges);
    }
    start_listener();
    supervisor_ = std::thread([this] { supervise(); });
    if (options_.realtime_block_interval) {
        if (traffic_) traffic_->submit(*chain_, options_.traffic_per_block);
        producer_ = std::thread([this] { produce(); });
    }
}

MockServer::~MockServer() {
    {
        std::lock_guard lock{mutex_};
        stopping_ = true;
    }
    cv_.notify_all();
    if (producer_.joinable()) producer_.join();
    if (supervisor_.joinable()) supervisor_.join();
    stop_listener();
}

std::string MockServer::url() const { return "http://" + options_.host + ":" + std::to_string(port_); }

std::string MockServer::inject_fault(const Fault& fault) {
    std::string ack = chain_->inject_fault(fault);
    {
        std::lock_guard lock{mutex_};  // orders the notify after the supervisor's check-then-wait
    }
    cv_.notify_all();
    return ack;
}

void MockServer::start_listener() {
    auto server = std::make_unique<httplib::Server>();
    install_routes(*server);
    // httplib's default also sets SO_REUSEPORT, which would let a second server share a taken port
    server->set_socket_options([](socket_t sock) {
        const int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    if (port_ == 0) {
        port_ = server->bind_to_any_port(options_.host);
        if (port_ < 0) throw PortInUse("could not bind any port on " + options_.host);
    } else if (!server->bind_to_port(options_.host, port_)) {
        throw PortInUse("port " + std::to_string(port_) + " is not available on " + options_.host);
    }
    server_ = std::move(server);
    listen_thread_ = std::thread([s = server_.get()] { s->listen_after_bind(); });
}

void MockServer::stop_listener() {
    if (!server_) return;
    server_->stop();
    if (listen_thread_.joinable()) listen_thread_.join();
    server_.reset();
}

void MockServer::supervise() {
    std::unique_lock lock{mutex_};
    while (!stopping_) {
        if (chain_->outage_active()) {
            if (server_) {
                lock.unlock();
                stop_listener();
                lock.lock();
            }
            cv_.wait_until(lock, chain_->outage_until(), [this] { return stopping_; });
            continue;
        }
        if (!server_) {
            lock.unlock();
            try {
                start_listener();
            } catch (const PortInUse& e) {
                std::cerr << "mock: restart after outage failed, retrying: " << e.what() << "\n";
                std::this_thread::sleep_for(std::chrono::milliseconds{50});
            }
            lock.lock();
            continue;
        }
        cv_.wait(lock);
    }
}

void MockServer::produce() {
    const auto interval = *options_.realtime_block_interval;
    auto deadline = std::chrono::steady_clock::now();
    std::unique_lock lock{mutex_};
    while (!stopping_) {
        const double factor = chain_->next_block_gap_factor();
        deadline += std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval * factor);
        if (cv_.wait_until(lock, deadline, [this] { return stopping_; })) break;
        lock.unlock();
        chain_->advance_block();
        if (traffic_) traffic_->submit(*chain_, options_.traffic_per_block);
        lock.lock();
    }
}

void MockServer::install_routes(httplib::Server& server) {
    auto sideband = [](const httplib::Request& req, httplib::Response& res) {
        if (is_loopback(req.remote_addr)) return true;
        reply_json(res, json{{"error", "sideband is loopback-only"}}, 403);
        return false;
    };

    server.Get("/__inclusion_log", [this, sideband](const httplib::Request& req, httplib::Response& res) {
        if (!sideband(req, res)) return;
        json out = json::array();
        for (const auto& e : chain_->inclusion_log()) {
            out.push_back({{"tx_hash", e.tx_hash},
                           {"gas_price_wei", to_decimal(e.gas_price_wei)},
                           {"submitted_at_block", e.submitted_at_block},
                           {"inclusion_block", e.inclusion_block}});
        }
        reply_json(res, out);
    });

    server.Get("/__pool", [this, sideband](const httplib::Request& req, httplib::Response& res) {
        if (!sideband(req, res)) return;
        json out = json::array();
        for (const auto& p : chain_->pool()) {
            out.push_back({{"tx_hash", p.hash},
                           {"sender", p.sender},
                           {"recipient", p.recipient ? json(*p.recipient) : json(nullptr)},
                           {"value_wei", to_decimal(p.value_wei)},
                           {"gas_price_wei", to_decimal(p.gas_price_wei)},
                           {"gas_units", p.gas_units},
                           {"arrival_sequence", p.arrival_sequence},
                           {"submitted_at_block", p.submitted_at_block}});
        }
        reply_json(res, out);
    });

    server.Get("/__head", [this, sideband](const httplib::Request& req, httplib::Response& res) {
        if (!sideband(req, res)) return;
        const auto head = chain_->block(chain_->head_number());
        reply_json(res, json{{"number", head.number}, {"hash", head.hash}});
    });

    server.Post("/__advance", [this, sideband](const httplib::Request& req, httplib::Response& res) {
        if (!sideband(req, res)) return;
        const json body = json::parse(req.body.empty() ? "{}" : req.body, nullptr, false);
        const std::uint64_t count = body.is_object() ? body.value("count", std::uint64_t{1}) : 1;
        for (std::uint64_t i = 0; i < count; ++i) chain_->advance_block();
        reply_json(res, json{{"head", chain_->head_number()}});
    });

    server.Post("/__submit", [this, sideband](const httplib::Request& req, httplib::Response& res) {
        if (!sideband(req, res)) return;
        try {
            const json body = json::parse(req.body);
            std::optional<std::string> recipient;
            if (body.contains("recipient") && !body["recipient"].is_null()) recipient = body["recipient"].get<std::string>();
            const auto hash = chain_->submit_tx(body.at("sender").get<std::string>(), recipient,
                                                parse_decimal_u256(body.at("value_wei").get<std::string>()),
                                                parse_decimal_u256(body.at("gas_price_wei").get<std::string>()),
                                                body.at("gas_units").get<std::uint64_t>());
            reply_json(res, json{{"tx_hash", hash}});
        } catch (const std::exception& e) {
            reply_json(res, json{{"error", e.what()}}, 400);
        }
    });

    server.Post("/__fault", [this, sideband](const httplib::Request& req, httplib::Response& res) {
        if (!sideband(req, res)) return;
        try {
            reply_json(res, json{{"ack", inject_fault(fault_from_json(json::parse(req.body)))}});
        } catch (const std::exception& e) {
            reply_json(res, json{{"error", e.what()}}, 400);
        }
    });

    server.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto latency = chain_->added_latency(); latency.count() > 0) std::this_thread::sleep_for(latency);
        const json request = json::parse(req.body, nullptr, false);
        if (request.is_discarded()) {
            reply_json(res, json{{"jsonrpc", "2.0"}, {"id", nullptr}, {"error", {{"code", -32700}, {"message", "parse error"}}}});
            return;
        }
        reply_json(res, chain_->handle_request(request));
    });
}

}  // namespace chainwatch::mock
