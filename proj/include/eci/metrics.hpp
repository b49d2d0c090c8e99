#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "eci/core.hpp"
#include "eci/rng.hpp"

namespace eci {

// Per-agent push quality. `snr` is the fraction of pushes that matched;
// `odds` is matched/unmatched with +inf when nothing failed to match.
struct AgentSnr {
    AgentId agent;
    std::size_t pushed = 0;
    std::size_t matched = 0;
    double snr = 0.0;
    double odds = 0.0;
};

inline AgentSnr agent_snr(const Agent& a) {
    AgentSnr r;
    r.agent = a.agent_id;
    r.pushed = a.pushed_log.size();
    for (const PushRecord& p : a.pushed_log) {
        if (p.matched) ++r.matched;
    }
    if (r.pushed > 0) {
        r.snr = static_cast<double>(r.matched) / static_cast<double>(r.pushed);
        const std::size_t unmatched = r.pushed - r.matched;
        r.odds = unmatched == 0 ? std::numeric_limits<double>::infinity()
                                : static_cast<double>(r.matched) / static_cast<double>(unmatched);
    }
    return r;
}

struct SnrReport {
    std::vector<AgentSnr> per_agent;  // every agent, in id order
    std::size_t agents_with_pushes = 0;
    std::size_t total_pushes = 0;
    double system_snr = 0.0;  // mean snr over agents with >= 1 push
};

inline SnrReport system_snr(std::span<const Agent> agents) {
    SnrReport rep;
    double sum = 0.0;
    for (const Agent& a : agents) {
        AgentSnr s = agent_snr(a);
        rep.total_pushes += s.pushed;
        if (s.pushed > 0) {
            ++rep.agents_with_pushes;
            sum += s.snr;
        }
        rep.per_agent.push_back(s);
    }
    if (rep.agents_with_pushes == 0) {
        throw std::runtime_error("system_snr: no agent has been pushed anything");
    }
    rep.system_snr = sum / static_cast<double>(rep.agents_with_pushes);
    return rep;
}

// Mean squared distance of an item's file vectors to their centroid.
// With unit-strength coordinates every dot product is an integer, so the
// whole thing reduces to an exact integer ratio:
//   msre = (k * sum_i n_i - sum_j c_j^2) / k^2
// where n_i = |f_i| (active count) and c_j = how many of the k files have
// coordinate j active.
struct MsreValue {
    std::uint64_t numerator = 0;  // k * sum(n_i) - sum(c_j^2)
    std::uint64_t k_squared = 1;
    double value = 0.0;
};

inline MsreValue item_msre(std::span<const UnitVector> files) {
    if (files.empty()) throw std::invalid_argument("item_msre: empty file set");
    const std::uint64_t k = files.size();
    std::uint64_t sum_norms = 0;
    std::vector<std::uint64_t> coord_count(files.front().dim(), 0);
    for (const UnitVector& f : files) {
        if (f.dim() != files.front().dim()) {
            throw std::invalid_argument("item_msre: dimension mismatch");
        }
        sum_norms += f.active_count();
        for (std::uint32_t j : f.active()) ++coord_count[j];
    }
    std::uint64_t sum_sq = 0;
    for (std::uint64_t c : coord_count) sum_sq += c * c;
    MsreValue r;
    r.numerator = k * sum_norms - sum_sq;  // never negative: sum_sq <= k * sum_norms
    r.k_squared = k * k;
    r.value = static_cast<double>(r.numerator) / static_cast<double>(r.k_squared);
    return r;
}

inline MsreValue item_msre(const Item& item, std::span<const KnowledgeFile> all_files) {
    std::vector<UnitVector> vs;
    vs.reserve(item.files.size());
    for (FileId f : item.files) vs.push_back(all_files[f.value].units);
    return item_msre(vs);
}

struct ItemMsre {
    ItemId item;
    std::size_t file_count = 0;
    double msre = 0.0;
};

struct MsreReport {
    std::vector<ItemMsre> per_item;
    std::size_t items_counted = 0;
    double system_msre = 0.0;  // mean over all items (every item has >= 1 file)
};

inline MsreReport system_msre(std::span<const Item> items, std::span<const KnowledgeFile> files) {
    if (items.empty()) throw std::runtime_error("system_msre: no items exist");
    MsreReport rep;
    double sum = 0.0;
    for (const Item& v : items) {
        const MsreValue m = item_msre(v, files);
        rep.per_item.push_back({v.item_id, v.files.size(), m.value});
        sum += m.value;
        ++rep.items_counted;
    }
    if (rep.items_counted > 0) rep.system_msre = sum / static_cast<double>(rep.items_counted);
    return rep;
}

// Mean of per-block MSREs for a partition given as block index per file.
inline double partition_msre(std::span<const UnitVector> files, std::span<const std::size_t> block_of) {
    if (files.size() != block_of.size()) {
        throw std::invalid_argument("partition_msre: size mismatch");
    }
    const std::size_t n_blocks = block_of.empty()
        ? 0
        : 1 + *std::max_element(block_of.begin(), block_of.end());
    double sum = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        std::vector<UnitVector> block;
        for (std::size_t i = 0; i < files.size(); ++i) {
            if (block_of[i] == b) block.push_back(files[i]);
        }
        if (block.empty()) throw std::invalid_argument("partition_msre: empty block");
        sum += item_msre(block).value;
    }
    return n_blocks == 0 ? 0.0 : sum / static_cast<double>(n_blocks);
}

struct PartitionResult {
    std::vector<std::size_t> block_of;  // block index per file, canonical form
    std::size_t n_blocks = 0;
    double msre = 0.0;
    std::uint64_t partitions_scanned = 0;
};

// Exhaustive minimum-mean-MSRE partition of a small file set. Enumerates
// set partitions as restricted growth strings in lexicographic order and
// keeps the strictly best one, so ties resolve to the lexicographically
// smallest encoding. Intended as a ground-truth oracle; cost is the Bell
// number of n, so n is capped at 10 (B(10) = 115975).
inline PartitionResult oracle_min_msre(std::span<const UnitVector> files,
                                       std::size_t max_blocks = SIZE_MAX) {
    const std::size_t n = files.size();
    if (n == 0) throw std::invalid_argument("oracle_min_msre: empty file set");
    if (n > 10) throw std::invalid_argument("oracle_min_msre: too many files for exhaustive search");
    if (max_blocks < 1) throw std::invalid_argument("oracle_min_msre: max_blocks must be >= 1");

    std::vector<std::size_t> rgs(n, 0);
    PartitionResult best;
    best.msre = std::numeric_limits<double>::infinity();

    auto consider = [&]() {
        ++best.partitions_scanned;
        const std::size_t blocks = 1 + *std::max_element(rgs.begin(), rgs.end());
        if (blocks > max_blocks) return;
        const double m = partition_msre(files, rgs);
        if (m < best.msre) {
            best.msre = m;
            best.block_of = rgs;
            best.n_blocks = blocks;
        }
    };

    // Lexicographic successor of a restricted growth string: rightmost
    // position that can grow (value <= max of prefix) bumps, suffix resets.
    consider();
    while (true) {
        std::size_t i = n;
        std::size_t prefix_max = 0;
        while (i-- > 1) {
            prefix_max = *std::max_element(rgs.begin(), rgs.begin() + static_cast<std::ptrdiff_t>(i));
            if (rgs[i] <= prefix_max) break;
            prefix_max = 0;
        }
        if (i == 0) break;
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        consider();
    }
    return best;
}

// Probability that a random file matches a random agent when every
// coordinate is an independent coin flip: both sides must share at least
// one active coordinate.
//   p(match) = 1 - (1 - p_f * p_a)^m
struct BaselineEstimate {
    double closed_form = 0.0;
    double monte_carlo = 0.0;
    double std_error = 0.0;  // binomial standard error of the MC estimate
    std::uint64_t trials = 0;
};

inline double baseline_match_probability(std::uint32_t m, double p_f, double p_a) {
    if (m == 0) throw std::invalid_argument("baseline: m must be >= 1");
    if (p_f < 0.0 || p_f > 1.0 || p_a < 0.0 || p_a > 1.0) {
        throw std::invalid_argument("baseline: probabilities must be in [0,1]");
    }
    return 1.0 - std::pow(1.0 - p_f * p_a, static_cast<double>(m));
}

// Closed form plus a Monte-Carlo check. Each trial draws one file/agent
// pair from its own substream, so the estimate is stable under changing
// the trial count.
inline BaselineEstimate random_baseline_snr(std::uint32_t m, double p_f, double p_a,
                                            std::uint64_t trials, std::uint64_t seed) {
    BaselineEstimate est;
    est.closed_form = baseline_match_probability(m, p_f, p_a);
    est.trials = trials;
    if (trials == 0) return est;

    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        SplitMix64 rng(derive_seed(seed, {stream::monte_carlo, t}));
        bool hit = false;
        for (std::uint32_t j = 0; j < m; ++j) {
            const bool in_file = rng.next_double() < p_f;
            const bool in_agent = rng.next_double() < p_a;
            if (in_file && in_agent) hit = true;  // keep consuming: fixed draws per trial
        }
        if (hit) ++hits;
    }
    est.monte_carlo = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.monte_carlo * (1.0 - est.monte_carlo) /
                              static_cast<double>(trials));
    return est;
}

}  // namespace eci
