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

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

#include <CLI11.hpp>

namespace chainwatch::cli {

std::map<std::string, std::string> parse_config(std::istream& in) {
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

namespace {

    std::string env_name(const std::string& option) {
        std::string out = "CHAINWATCH_";
        for (char c : option) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return out;
    }

    void add_endpoint_options(CLI::App* app, Endpoint& e) {
        app->add_option("--endpoint", e.url, "JSON-RPC URL (http or https)");
        app->add_option("--auth-header", e.auth_header, "extra header sent with every call, as 'Name: value'");
        app->add_option("--timeout-ms", e.timeout_ms, "per-request timeout")->check(CLI::PositiveNumber);
        app->add_option("--max-retries", e.max_retries, "retries after a transport failure")
            ->check(CLI::NonNegativeNumber);
    }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop,
        const std::optional<std::map<std::string, std::string>>& env) {
    CLI::App app{"Ethereum JSON-RPC endpoint monitor"};
    app.name("chainwatch");
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; keys are flag names without dashes");

    ProbeOptions probe;
    std::string probe_out;
    auto* probe_cmd = app.add_subcommand("probe", "classify the endpoint's JSON-RPC method support");
    add_endpoint_options(probe_cmd, probe.endpoint);
    probe_cmd->add_option("--out", probe_out, "write the capability matrix as JSON");

    WatchOptions watch;
    std::string watch_rules, watch_webhook, watch_checkpoint;
    std::uint64_t watch_start = 0;
    auto* watch_cmd = app.add_subcommand("watch", "run a polling session");
    add_endpoint_options(watch_cmd, watch.endpoint);
    watch_cmd->add_option("--poll-interval", watch.poll_interval_s, "seconds between polls")
        ->check(CLI::PositiveNumber);
    watch_cmd->add_option("--datapoint-interval", watch.datapoint_interval_s, "seconds between datapoints")
        ->check(CLI::PositiveNumber);
    watch_cmd->add_option("--datapoints", watch.datapoints, "datapoints to collect")->check(CLI::PositiveNumber);
    watch_cmd->add_option("--out-dir", watch.out_dir, "output directory");
    watch_cmd->add_option("--rules", watch_rules, "alert rules JSON file");
    watch_cmd->add_option("--webhook", watch_webhook, "POST alert events to this URL");
    auto* start_opt = watch_cmd->add_option("--start-block", watch_start, "collect blocks above this one");
    watch_cmd->add_option("--checkpoint", watch_checkpoint, "checkpoint file (default <out-dir>/checkpoint.json)");
    watch_cmd->add_option("--reorg-depth", watch.reorg_depth, "deepest reorg rolled back automatically");

    AnalyzeOptions analyze;
    std::string figure_name;
    auto* analyze_cmd = app.add_subcommand("analyze", "turn recorded data into a figure CSV");
    analyze_cmd->add_option("--in", analyze.in, "watch output directory or JSONL file");
    analyze_cmd->add_option("--figure", figure_name, "fig1 | fig2 | fig3 | fig4")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
    analyze_cmd->add_option("--out", analyze.out, "CSV output path");

    MockOptions mockopt;
    std::string profile_name = "amb", script_path;
    int realtime_ms = 0;
    auto* mock_cmd = app.add_subcommand("mock", "serve a deterministic mock chain");
    mock_cmd->add_option("--profile", profile_name, "amb | permissive")->check(CLI::IsMember({"amb", "permissive"}));
    mock_cmd->add_option("--host", mockopt.host, "bind address");
    mock_cmd->add_option("--port", mockopt.port, "TCP port, 0 for any")->check(CLI::Range(0, 65535));
    mock_cmd->add_option("--seed", mockopt.seed, "chain and traffic seed");
    mock_cmd->add_option("--script", script_path, "command script to run after startup");
    mock_cmd->add_option("--block-period", mockopt.block_period_s, "simulated seconds per block")
        ->check(CLI::PositiveNumber);
    auto* realtime_opt = mock_cmd->add_option("--realtime-ms", realtime_ms, "produce a block every N ms")
                             ->check(CLI::PositiveNumber);
    mock_cmd->add_option("--traffic", mockopt.traffic, "random transactions submitted per produced block");
    mock_cmd->add_option("--gas-limit", mockopt.gas_limit, "block gas limit")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFailure;
    }

    auto getenv_ = [&](const std::string& name) -> std::optional<std::string> {
        if (env) {
            const auto it = env->find(name);
            return it == env->end() ? std::nullopt : std::optional<std::string>{it->second};
        }
        const char* v = std::getenv(name.c_str());
        return v != nullptr ? std::optional<std::string>{v} : std::nullopt;
    };

    // precedence below the command line: environment, then config file
    try {
        if (config_path.empty()) config_path = getenv_("CHAINWATCH_CONFIG").value_or("");
        std::map<std::string, std::string> config;
        if (!config_path.empty()) {
            std::ifstream f{config_path};
            if (!f) throw std::invalid_argument("cannot open config file " + config_path);
            config = parse_config(f);
        }
        std::set<std::string> known;
        for (auto* sub : app.get_subcommands({})) {
            for (auto* opt : sub->get_options()) known.insert(opt->get_single_name());
        }
        for (const auto& [key, _] : config) {
            if (!known.contains(key)) err << "warning: unknown config key " << key << "\n";
        }
        for (auto* sub : app.get_subcommands()) {
            for (auto* opt : sub->get_options()) {
                const auto& name = opt->get_single_name();
                if (name == "help" || opt->count() > 0) continue;
                std::optional<std::string> value = getenv_(env_name(name));
                if (!value) {
                    if (const auto it = config.find(name); it != config.end()) value = it->second;
                }
                if (!value) continue;
                opt->add_result(*value);
                opt->run_callback();
            }
        }
    } catch (const CLI::Error& e) {
        err << "invalid setting: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitFailure;
    }

    try {
        if (probe_cmd->parsed()) {
            if (probe.endpoint.url.empty()) throw std::invalid_argument("--endpoint is required");
            if (!probe_out.empty()) probe.out = probe_out;
            return cmd_probe(probe, out, err);
        }
        if (watch_cmd->parsed()) {
            if (watch.endpoint.url.empty()) throw std::invalid_argument("--endpoint is required");
            if (!watch_rules.empty()) watch.rules = watch_rules;
            if (!watch_webhook.empty()) watch.webhook = watch_webhook;
            if (!watch_checkpoint.empty()) watch.checkpoint = watch_checkpoint;
            if (start_opt->count() > 0) watch.start_block = watch_start;
            return cmd_watch(watch, out, err, stop);
        }
        if (analyze_cmd->parsed()) {
            if (analyze.in.empty() || analyze.out.empty() || figure_name.empty()) {
                throw std::invalid_argument("--in, --figure and --out are required");
            }
            analyze.figure = *sink::figure_from_string(figure_name);
            return cmd_analyze(analyze, out, err);
        }
        if (mock_cmd->parsed()) {
            mockopt.profile = *mock::profile_from_string(profile_name);
            if (!script_path.empty()) mockopt.script = script_path;
            if (realtime_opt->count() > 0) mockopt.realtime_ms = realtime_ms;
            return cmd_mock(mockopt, out, err, stop);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace chainwatch::cli
