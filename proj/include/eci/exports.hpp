#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eci/engine.hpp"
#include "eci/metrics.hpp"

namespace eci {

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::post: return "post";
        case EventKind::push: return "push";
        case EventKind::round: return "round";
        case EventKind::add_file: return "add_file";
        case EventKind::new_item: return "new_item";
        case EventKind::join: return "join";
    }
    return "?";
}

// One event per line: event_kind,file_id,item_id|-,agent_id|-,round|-,matched|-
// Field order is fixed; `-` marks a field the event kind does not carry.
inline std::string format_event(const Event& e) {
    auto id_or_dash = [](std::uint64_t v) {
        return v == Event::no_id ? std::string("-") : std::to_string(v);
    };
    std::string out = event_kind_name(e.kind);
    out += ',';
    out += std::to_string(e.file);
    out += ',';
    out += id_or_dash(e.item);
    out += ',';
    out += id_or_dash(e.agent);
    out += ',';
    out += e.round == Event::no_round ? std::string("-") : std::to_string(e.round);
    out += ',';
    out += e.matched < 0 ? std::string("-") : std::to_string(static_cast<int>(e.matched));
    return out;
}

inline void write_event_log(std::ostream& os, std::span<const Event> events) {
    for (const Event& e : events) os << format_event(e) << '\n';
}

// Edge list rows: src_item_id<TAB>dst_item_id<TAB>weight, weight with 6 decimals.
inline void write_edges_tsv(std::ostream& os, const KnsGraph& graph) {
    char buf[64];
    for (const auto& [key, w] : graph.edges()) {
        std::snprintf(buf, sizeof buf, "%" PRIu64 "\t%" PRIu64 "\t%.6f", key.first.value,
                      key.second.value, w);
        os << buf << '\n';
    }
}

// Graphviz text: nodes labeled item:<id>(k=<files>,n=<agents>).
inline void write_dot(std::ostream& os, const KnsGraph& graph, std::span<const Item> items) {
    os << "digraph kns {\n";
    for (ItemId id : graph.nodes()) {
        const Item& v = items[id.value];
        os << "  n" << id.value << " [label=\"item:" << id.value << "(k=" << v.file_count()
           << ",n=" << v.agent_count() << ")\"];\n";
    }
    char buf[32];
    for (const auto& [key, w] : graph.edges()) {
        std::snprintf(buf, sizeof buf, "%.6f", w);
        os << "  n" << key.first.value << " -> n" << key.second.value << " [label=\"" << buf
           << "\"];\n";
    }
    os << "}\n";
}

// Flat metrics document. Per-item arrays are indexed by item id.
struct RunMetrics {
    double system_snr = 0.0;
    double random_baseline_snr = 0.0;
    double system_msre = 0.0;
    std::size_t n_items = 0;
    std::size_t n_edges = 0;
    std::size_t n_pushes = 0;
    std::vector<double> item_msre;
    std::vector<std::size_t> item_file_counts;
    std::vector<std::size_t> item_agent_counts;
};

inline RunMetrics collect_metrics(const SimulationState& state, double baseline_closed_form) {
    RunMetrics m;
    const SnrReport snr = system_snr(state.agents);
    m.system_snr = snr.system_snr;
    m.n_pushes = snr.total_pushes;
    m.random_baseline_snr = baseline_closed_form;
    m.n_items = state.items.size();
    m.n_edges = state.graph.edge_count();
    if (!state.items.empty()) {
        const MsreReport msre = system_msre(state.items, state.files);
        m.system_msre = msre.system_msre;
        for (const ItemMsre& im : msre.per_item) {
            m.item_msre.push_back(im.msre);
            m.item_agent_counts.push_back(state.items[im.item.value].agent_count());
            m.item_file_counts.push_back(im.file_count);
        }
    }
    return m;
}

inline void write_metrics_json(std::ostream& os, const RunMetrics& m) {
    nlohmann::ordered_json j;
    j["system_snr"] = m.system_snr;
    j["random_baseline_snr"] = m.random_baseline_snr;
    j["system_msre"] = m.system_msre;
    j["n_items"] = m.n_items;
    j["n_edges"] = m.n_edges;
    j["n_pushes"] = m.n_pushes;
    j["item_msre"] = m.item_msre;
    j["item_file_counts"] = m.item_file_counts;
    j["item_agent_counts"] = m.item_agent_counts;
    os << j.dump(2) << '\n';
}

inline void write_metrics_tsv(std::ostream& os, const RunMetrics& m) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    auto join = [&](const auto& xs, auto fmt) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ',';
            out += fmt(xs[i]);
        }
        return out;
    };
    os << "system_snr\t" << num(m.system_snr) << '\n';
    os << "random_baseline_snr\t" << num(m.random_baseline_snr) << '\n';
    os << "system_msre\t" << num(m.system_msre) << '\n';
    os << "n_items\t" << m.n_items << '\n';
    os << "n_edges\t" << m.n_edges << '\n';
    os << "n_pushes\t" << m.n_pushes << '\n';
    os << "item_msre\t" << join(m.item_msre, num) << '\n';
    os << "item_file_counts\t"
       << join(m.item_file_counts, [](std::size_t v) { return std::to_string(v); }) << '\n';
    os << "item_agent_counts\t"
       << join(m.item_agent_counts, [](std::size_t v) { return std::to_string(v); }) << '\n';
}

inline void write_summary(std::ostream& os, const RunMetrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "items: %zu\nedges: %zu\npushes: %zu\nsystem snr: %.6f\nrandom baseline snr: "
                  "%.6f\nuplift: %.2fx\nsystem msre: %.6f\n",
                  m.n_items, m.n_edges, m.n_pushes, m.system_snr, m.random_baseline_snr,
                  m.random_baseline_snr > 0.0 ? m.system_snr / m.random_baseline_snr : 0.0,
                  m.system_msre);
    os << buf;
}

inline void write_text_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    fn(os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace eci
