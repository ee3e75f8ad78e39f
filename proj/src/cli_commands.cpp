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

#include <chainwatch/cli.hpp>

#include <chrono>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include <chainwatch/alerts.hpp>
#include <chainwatch/collector.hpp>
#include <chainwatch/metrics.hpp>
#include <chainwatch/store.hpp>

namespace chainwatch::cli {

using nlohmann::json;

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err) {
    options.endpoint.validate();
    const RpcClient client;

    // one reachability check first so a dead endpoint fails fast instead of once per method
    const auto hello = client.call(options.endpoint, "web3_clientVersion");
    if (hello.is_transport_error()) {
        err << "endpoint unreachable: " << to_string(hello.transport_error().kind) << " "
            << hello.transport_error().detail << "\n";
        return kExitFailure;
    }

    const auto probes = default_probe_set();
    const CapabilityMatrix matrix = probe_capabilities(client, options.endpoint, probes);

    std::size_t width = 6;
    for (const auto& e : matrix.entries) width = std::max(width, e.method.size());
    out << fmt::format("{:<{}}  {}\n", "method", width, "status");
    for (const auto& e : matrix.entries) {
        std::string status{to_string(e.status)};
        if (!e.message.empty()) status += ": " + e.message;
        out << fmt::format("{:<{}}  {}\n", e.method, width, status);
    }
    out << fmt::format("supported={} restricted={} transport_failed={}\n", matrix.count(Capability::supported),
                       matrix.count(Capability::restricted), matrix.count(Capability::transport_failed));

    if (options.out) {
        std::ofstream f{*options.out, std::ios::binary | std::ios::trunc};
        f << matrix.to_json().dump(2) << "\n";
        if (!f) {
            err << "cannot write " << options.out->string() << "\n";
            return kExitFailure;
        }
    }

    if (matrix.count(Capability::transport_failed) > 0) return kExitFailure;
    for (const auto& m : supported_reference_methods()) {
        const auto* e = matrix.find(m);
        if (e == nullptr || e->status != Capability::supported) return kExitShortfall;
    }
    return kExitOk;
}

int cmd_watch(const WatchOptions& o, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
    o.endpoint.validate();
    if (o.datapoints == 0) throw std::invalid_argument("--datapoints must be positive");

    const RpcClient client;
    collector::CollectorConfig ccfg;
    ccfg.poll_interval_s = o.poll_interval_s;
    ccfg.datapoint_interval_s = o.datapoint_interval_s;
    ccfg.reorg_depth = o.reorg_depth;
    collector::Collector collector{client, o.endpoint, ccfg};

    const auto paths = SessionStore::paths_for(o.out_dir, o.checkpoint);
    std::uint64_t start_block = 0;
    if (o.start_block) {
        start_block = *o.start_block;
    } else if (!std::filesystem::exists(paths.checkpoint)) {
        const auto head = collector.fetch_head();
        if (!head) {
            err << "cannot read the chain head from " << o.endpoint.url << "\n";
            return kExitFailure;
        }
        start_block = *head;
    }

    SessionStore store{o.out_dir, o.checkpoint, start_block};
    collector::CollectorCheckpoint cp = store.recovered();
    collector.seed_history(store.recent_blocks());
    if (store.resumed()) {
        out << fmt::format("resuming at block {} after {} datapoints\n", cp.last_block_number, cp.datapoints_emitted);
    }

    const auto rules = o.rules ? alerts::load_rules(*o.rules) : alerts::default_rules();
    alerts::AlertEvaluator evaluator{rules};
    std::vector<std::shared_ptr<alerts::AlertSink>> sinks{std::make_shared<alerts::StderrAlertSink>(),
                                                          std::make_shared<alerts::JsonlAlertSink>(paths.alerts)};
    if (o.webhook) sinks.push_back(std::make_shared<alerts::WebhookAlertSink>(*o.webhook));

    std::uint64_t alerts_fired = 0;
    auto dispatch = [&](const std::vector<alerts::AlertEvent>& events) {
        for (const auto& e : events) {
            if (e.state == alerts::AlertState::firing) ++alerts_fired;
            const auto receipt = alerts::notify(e, sinks);
            for (const auto& d : receipt.deliveries) {
                if (!d.ok) err << "alert delivery to " << d.sink << " failed: " << d.detail << "\n";
            }
        }
    };

    collector::SessionHooks hooks;
    hooks.on_cycle = [&](const collector::CycleResult& cycle) {
        for (const auto& p : cycle.points) dispatch(evaluator.observe(p));
        dispatch(evaluator.tick(cycle.at));
    };
    hooks.on_datapoint = [&](const collector::Datapoint& dp) { store.commit(dp); };

    const collector::SessionConfig scfg{o.poll_interval_s, o.datapoint_interval_s, o.datapoints};
    collector::SessionSummary s;
    try {
        s = collector::run_session(collector, cp, scfg, hooks, stop);
    } catch (const sink::SinkError& e) {
        err << "sink failure: " << e.what() << "\n";
        return kExitFailure;
    } catch (const collector::CheckpointError& e) {
        err << "checkpoint failure: " << e.what() << "\n";
        return kExitFailure;
    }

    const auto& c = store.counts();
    out << fmt::format(
        "datapoints={} cycles={} missed_deadlines={} failed_cycles={} blocks={} txs={} alerts_fired={} "
        "duration_s={:.3f}{}\n",
        s.datapoints, s.cycles, s.missed_deadlines, s.failed_cycles, c.blocks, c.txs, alerts_fired, s.duration_s,
        s.interrupted ? " interrupted" : "");
    if (c.emf_rejected > 0) err << c.emf_rejected << " metric points could not be exported as EMF\n";
    return kExitOk;
}

namespace {

    std::vector<Record> load_input(const std::filesystem::path& in) {
        if (!std::filesystem::exists(in)) throw std::invalid_argument("input " + in.string() + " does not exist");
        if (!std::filesystem::is_directory(in)) return sink::replay(in);
        const auto paths = SessionStore::paths_for(in);
        auto records = sink::replay(paths.records);
        auto points = sink::replay(paths.metrics);
        records.insert(records.end(), std::make_move_iterator(points.begin()), std::make_move_iterator(points.end()));
        return records;
    }

}  // namespace

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<Record> records;
    try {
        records = load_input(o.in);
    } catch (const std::exception& e) {
        err << "cannot read input: " << e.what() << "\n";
        return kExitFailure;
    }

    const auto rows = sink::emit_figure_csv(records, o.figure, o.out);
    out << fmt::format("wrote {} rows to {}\n", rows, o.out.string());
    if (records.empty()) {
        err << "warning: input holds no records; wrote a header-only file\n";
        return kExitOk;
    }

    const auto view = sink::canonical_view(records);
    out << fmt::format("blocks={} txs={} mempool_snapshots={} metric_points={}\n", view.blocks.size(),
                       view.txs.size(), view.mempool.size(), view.points.size());
    switch (o.figure) {
        case sink::Figure::fig1:
            out << fmt::format("high_efficiency_blocks={}\n", rows);
            break;
        case sink::Figure::fig2: {
            std::uint64_t max_delay = 0;
            double sum = 0;
            for (const auto& tx : view.txs) {
                if (!tx.first_seen_block || !tx.inclusion_block) continue;
                const auto d = metrics::inclusion_delay(tx);
                max_delay = std::max(max_delay, d);
                sum += static_cast<double>(d);
            }
            if (rows > 0) out << fmt::format("mean_delay_blocks={:.3f} max_delay_blocks={}\n", sum / static_cast<double>(rows), max_delay);
            break;
        }
        case sink::Figure::fig3: {
            BigUint total = 0;
            for (const auto& b : view.blocks) total += metrics::eth_transferred(b).total_wei;
            out << fmt::format("total_eth={}\n", format_eth(total));
            break;
        }
        case sink::Figure::fig4: break;
    }
    try {
        const auto lat = metrics::latency_stats(view.points);
        out << fmt::format("rpc_latency_ms p50={:.3f} p95={:.3f} max={:.3f} success_rate={:.4f}\n", lat.p50, lat.p95,
                           lat.max, lat.success_rate);
    } catch (const metrics::EmptyWindow&) {
    }
    return kExitOk;
}

int cmd_mock(const MockOptions& o, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
    mock::ChainConfig cfg;
    cfg.seed = o.seed;
    cfg.profile = o.profile;
    cfg.block_period_s = o.block_period_s;
    cfg.block_gas_limit = o.gas_limit;
    cfg.validate();
    auto chain = std::make_shared<mock::MockChain>(cfg);

    mock::ServeOptions serve;
    serve.host = o.host;
    serve.port = o.port;
    if (o.realtime_ms) {
        if (*o.realtime_ms <= 0) throw std::invalid_argument("--realtime-ms must be positive");
        serve.realtime_block_interval = std::chrono::milliseconds{*o.realtime_ms};
    }
    serve.traffic_per_block = o.traffic;

    std::unique_ptr<mock::MockServer> server;
    try {
        server = std::make_unique<mock::MockServer>(chain, serve);
    } catch (const mock::PortInUse& e) {
        err << e.what() << "\n";
        return kExitFailure;
    }
    out << "listening on " << server->url() << " profile=" << to_string(o.profile) << " seed=" << o.seed << std::endl;

    if (o.script) {
        std::ifstream script{*o.script};
        if (!script) {
            err << "cannot open script " << o.script->string() << "\n";
            return kExitFailure;
        }
        mock::TrafficGenerator traffic{o.seed};
        try {
            mock::run_script(script, *chain, traffic, [&](const mock::Fault& f) { return server->inject_fault(f); });
        } catch (const mock::ScriptError& e) {
            err << e.what() << "\n";
            return kExitFailure;
        }
        out << "script done head=" << chain->head_number() << std::endl;
    }

    while (stop == nullptr || !stop->load()) std::this_thread::sleep_for(std::chrono::milliseconds{50});
    return kExitOk;
}

}  // namespace chainwatch::cli
