#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eci/core.hpp"

namespace eci {

// Directed weights between two items, derived from file-set overlap:
//   xy = |files(x) ∩ files(y)| / |files(y)|
//   yx = |files(x) ∩ files(y)| / |files(x)|
// Each is the fraction of the target's files covered by the overlap, so a
// larger collection that subsumes a smaller one points "down" at it with
// the higher weight.
struct EdgeWeights {
    double xy = 0.0;
    double yx = 0.0;
};

namespace detail {

inline std::size_t file_intersection(const Item& a, const Item& b) {
    std::size_t count = 0;
    auto i = a.files.begin();
    auto j = b.files.begin();
    while (i != a.files.end() && j != b.files.end()) {
        if (i->value < j->value) {
            ++i;
        } else if (j->value < i->value) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace detail

inline EdgeWeights edge_weights(const Item& x, const Item& y) {
    if (x.files.empty() || y.files.empty()) {
        throw std::invalid_argument("edge_weights: item with empty file set");
    }
    const auto inter = static_cast<double>(detail::file_intersection(x, y));
    return {inter / static_cast<double>(y.files.size()),
            inter / static_cast<double>(x.files.size())};
}

enum class HierarchyOrder { x_above_y, y_above_x, incomparable };

// Dynamic directed weighted graph over items. Only weights >= t_e are
// stored; queries that need unthresholded values recompute from the items.
class KnsGraph {
public:
    explicit KnsGraph(double t_e = 0.1) : t_e_(t_e) {
        if (t_e < 0.0 || t_e > 1.0) throw std::invalid_argument("KnsGraph: t_e must be in [0,1]");
    }

    double threshold() const { return t_e_; }
    const std::set<ItemId>& nodes() const { return nodes_; }
    const std::map<std::pair<ItemId, ItemId>, double>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool has_node(ItemId id) const { return nodes_.count(id) > 0; }

    void add_node(ItemId id) { nodes_.insert(id); }

    std::optional<double> stored_weight(ItemId x, ItemId y) const {
        auto it = edges_.find({x, y});
        if (it == edges_.end()) return std::nullopt;
        return it->second;
    }

    // Recomputes every pair touching `changed` and re-applies the threshold.
    // Returns the number of stored-edge changes (insert, remove, or update).
    std::size_t refresh_edges(ItemId changed, std::span<const Item> items) {
        require_node(changed);
        std::size_t updates = 0;
        const Item& c = item_at(changed, items);
        for (ItemId other : nodes_) {
            if (other == changed) continue;  // self edges carry no information
            const EdgeWeights w = edge_weights(c, item_at(other, items));
            updates += store(changed, other, w.xy);
            updates += store(other, changed, w.yx);
        }
        return updates;
    }

    // Unthresholded mean of the two directed weights.
    double similarity(ItemId x, ItemId y, std::span<const Item> items) const {
        require_node(x);
        require_node(y);
        if (x == y) return 1.0;
        const EdgeWeights w = edge_weights(item_at(x, items), item_at(y, items));
        return 0.5 * (w.xy + w.yx);
    }

    // x sits above y when its edge toward y outweighs the reverse edge.
    // Ties and zero overlap carry no order.
    HierarchyOrder hierarchy_order(ItemId x, ItemId y, std::span<const Item> items) const {
        require_node(x);
        require_node(y);
        const EdgeWeights w = edge_weights(item_at(x, items), item_at(y, items));
        if (w.xy > w.yx) return HierarchyOrder::x_above_y;
        if (w.yx > w.xy) return HierarchyOrder::y_above_x;
        return HierarchyOrder::incomparable;
    }

    // Stored out-neighbors of x (ascending id).
    std::vector<ItemId> out_neighbors(ItemId x) const {
        std::vector<ItemId> out;
        for (auto it = edges_.lower_bound({x, ItemId{0}});
             it != edges_.end() && it->first.first == x; ++it) {
            out.push_back(it->first.second);
        }
        return out;
    }

private:
    void require_node(ItemId id) const {
        if (!has_node(id)) {
            throw std::invalid_argument("KnsGraph: unknown item " + std::to_string(id.value));
        }
    }

    static const Item& item_at(ItemId id, std::span<const Item> items) {
        if (id.value >= items.size()) throw std::invalid_argument("KnsGraph: item out of range");
        return items[static_cast<std::size_t>(id.value)];
    }

    std::size_t store(ItemId from, ItemId to, double weight) {
        const std::pair<ItemId, ItemId> key{from, to};
        auto it = edges_.find(key);
        if (weight >= t_e_) {
            if (it == edges_.end()) {
                edges_.emplace(key, weight);
                return 1;
            }
            if (it->second != weight) {
                it->second = weight;
                return 1;
            }
            return 0;
        }
        if (it != edges_.end()) {
            edges_.erase(it);
            return 1;
        }
        return 0;
    }

    double t_e_;
    std::set<ItemId> nodes_;
    std::map<std::pair<ItemId, ItemId>, double> edges_;
};

// One agglomeration step: clusters `left` and `right` merged at the given
// similarity. Cluster indices follow the usual convention: 0..l-1 are
// leaves, l+i is the cluster produced by merge i.
struct DendrogramMerge {
    std::size_t left = 0;
    std::size_t right = 0;
    double similarity = 0.0;
};

// Pairwise similarity, pairwise dominance, and the average-linkage
// dendrogram over the graph's nodes.
struct HierarchyReport {
    std::vector<ItemId> leaves;  // ascending item id
    std::vector<std::vector<double>> similarity;
    std::vector<std::vector<HierarchyOrder>> dominance;
    std::vector<DendrogramMerge> merges;

    bool empty() const { return leaves.empty(); }
};

// Average-linkage agglomeration over pairwise similarity. Merges the most
// similar pair first; ties break toward the smallest (item id, item id)
// pair so the order is deterministic.
inline HierarchyReport mine_hierarchy(const KnsGraph& graph, std::span<const Item> items) {
    HierarchyReport report;
    report.leaves.assign(graph.nodes().begin(), graph.nodes().end());
    const std::size_t l = report.leaves.size();
    if (l == 0) return report;

    report.similarity.assign(l, std::vector<double>(l, 1.0));
    report.dominance.assign(l, std::vector<HierarchyOrder>(l, HierarchyOrder::incomparable));
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = i + 1; j < l; ++j) {
            const double s = graph.similarity(report.leaves[i], report.leaves[j], items);
            report.similarity[i][j] = report.similarity[j][i] = s;
            const HierarchyOrder ord = graph.hierarchy_order(report.leaves[i], report.leaves[j], items);
            report.dominance[i][j] = ord;
            report.dominance[j][i] = ord == HierarchyOrder::x_above_y   ? HierarchyOrder::y_above_x
                                     : ord == HierarchyOrder::y_above_x ? HierarchyOrder::x_above_y
                                                                        : HierarchyOrder::incomparable;
        }
    }

    // Active clusters: cluster index, member leaf count, smallest leaf item
    // id (the tie-break key), and current similarity to every other cluster.
    struct Cluster {
        std::size_t index;
        std::size_t size;
        ItemId rep;
    };
    std::vector<Cluster> active;
    std::map<std::pair<std::size_t, std::size_t>, double> sim;  // keyed by cluster index pair
    for (std::size_t i = 0; i < l; ++i) active.push_back({i, 1, report.leaves[i]});
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = i + 1; j < l; ++j) sim[{i, j}] = report.similarity[i][j];
    }
    auto sim_of = [&](std::size_t a, std::size_t b) {
        return sim.at({std::min(a, b), std::max(a, b)});
    };

    std::size_t next_index = l;
    while (active.size() > 1) {
        std::size_t best_a = 0, best_b = 1;
        double best_s = -1.0;
        std::pair<std::uint64_t, std::uint64_t> best_key{0, 0};
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double s = sim_of(active[a].index, active[b].index);
                std::pair<std::uint64_t, std::uint64_t> key{
                    std::min(active[a].rep.value, active[b].rep.value),
                    std::max(active[a].rep.value, active[b].rep.value)};
                if (s > best_s || (s == best_s && key < best_key)) {
                    best_s = s;
                    best_key = key;
                    best_a = a;
                    best_b = b;
                }
            }
        }

        const Cluster ca = active[best_a];
        const Cluster cb = active[best_b];
        Cluster merged{next_index++, ca.size + cb.size,
                       ca.rep.value < cb.rep.value ? ca.rep : cb.rep};
        report.merges.push_back({ca.index, cb.index, best_s});

        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
        for (const Cluster& other : active) {
            const double s = (static_cast<double>(ca.size) * sim_of(ca.index, other.index) +
                              static_cast<double>(cb.size) * sim_of(cb.index, other.index)) /
                             static_cast<double>(merged.size);
            sim[{std::min(merged.index, other.index), std::max(merged.index, other.index)}] = s;
        }
        active.push_back(merged);
    }
    return report;
}

}  // namespace eci
