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

#include <chainwatch/sink.hpp>

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include <chainwatch/metrics.hpp>

namespace chainwatch::sink {

CanonicalView canonical_view(std::span<const Record> records) {
    std::set<std::string> superseded;
    for (const auto& r : records) {
        if (const auto* s = std::get_if<SupersededMarker>(&r)) superseded.insert(s->hash);
    }

    CanonicalView view;
    std::unordered_set<std::string> seen_blocks;
    for (const auto& r : records) {
        if (const auto* b = std::get_if<BlockRecord>(&r)) {
            if (superseded.contains(b->hash) || !seen_blocks.insert(b->hash).second) continue;
            view.blocks.push_back(*b);
        } else if (const auto* m = std::get_if<MempoolSnapshot>(&r)) {
            view.mempool.push_back(*m);
        } else if (const auto* p = std::get_if<MetricPoint>(&r)) {
            view.points.push_back(*p);
        }
    }
    std::stable_sort(view.blocks.begin(), view.blocks.end(),
                     [](const BlockRecord& a, const BlockRecord& b) { return a.number < b.number; });

    std::unordered_set<std::string> seen_txs;
    for (const auto& b : view.blocks) {
        for (const auto& tx : b.transactions) {
            if (seen_txs.insert(tx.tx_hash).second) view.txs.push_back(tx);
        }
    }
    for (const auto& r : records) {
        if (const auto* tx = std::get_if<TxRecord>(&r)) {
            if (seen_txs.insert(tx->tx_hash).second) view.txs.push_back(*tx);
        }
    }
    return view;
}

std::optional<Figure> figure_from_string(std::string_view s) {
    if (s == "fig1") return Figure::fig1;
    if (s == "fig2") return Figure::fig2;
    if (s == "fig3") return Figure::fig3;
    if (s == "fig4") return Figure::fig4;
    return std::nullopt;
}

std::string_view to_string(Figure f) {
    switch (f) {
        case Figure::fig1: return "fig1";
        case Figure::fig2: return "fig2";
        case Figure::fig3: return "fig3";
        case Figure::fig4: return "fig4";
    }
    return "?";
}

std::string FigureTable::csv() const {
    std::string out = header + "\n";
    for (const auto& r : rows) {
        out += r;
        out += '\n';
    }
    return out;
}

FigureTable figure_table(std::span<const Record> records, Figure figure) {
    const CanonicalView view = canonical_view(records);
    FigureTable t;
    switch (figure) {
        case Figure::fig1: {
            t.header = "block,utilization,tx_count";
            std::unordered_map<std::uint64_t, const BlockRecord*> by_number;
            for (const auto& b : view.blocks) by_number[b.number] = &b;
            for (const auto& hb : metrics::filter_high_efficiency(view.blocks)) {
                const auto* b = by_number.at(hb.number);
                t.rows.push_back(fmt::format("{},{},{}", b->number,
                                             format_ratio(BigUint{b->gas_used}, BigUint{b->gas_limit}, 6),
                                             b->tx_count));
            }
            break;
        }
        case Figure::fig2: {
            t.header = "gas_price_gwei,delay_blocks";
            for (const auto& tx : view.txs) {
                if (!tx.first_seen_block || !tx.inclusion_block) continue;
                t.rows.push_back(
                    fmt::format("{},{}", format_gwei(BigUint{tx.gas_price_wei}), metrics::inclusion_delay(tx)));
            }
            break;
        }
        case Figure::fig3: {
            t.header = "block,total_eth";
            for (const auto& b : view.blocks) {
                t.rows.push_back(fmt::format("{},{}", b.number, format_eth(metrics::eth_transferred(b).total_wei)));
            }
            break;
        }
        case Figure::fig4: {
            t.header = "rank,address,role,tx_count,avg_gas_price_gwei";
            if (view.txs.empty()) break;
            const auto top = metrics::top_addresses(view.txs);
            for (const auto* list : {&top.senders, &top.receivers}) {
                std::size_t rank = 0;
                for (const auto& a : *list) {
                    t.rows.push_back(fmt::format("{},{},{},{},{:.9f}", ++rank, a.address, metrics::to_string(a.role),
                                                 a.tx_count, a.avg_gas_price_gwei));
                }
            }
            break;
        }
    }
    return t;
}

std::size_t emit_figure_csv(std::span<const Record> records, Figure figure, const std::filesystem::path& path) {
    const FigureTable t = figure_table(records, figure);
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) throw SinkError("cannot open " + path.string() + " for writing");
    out << t.csv();
    out.flush();
    if (!out) throw SinkError("write to " + path.string() + " failed");
    return t.rows.size();
}

}  // namespace chainwatch::sink
