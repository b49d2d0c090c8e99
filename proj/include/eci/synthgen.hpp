#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eci/core.hpp"
#include "eci/rng.hpp"

namespace eci {

enum class StructureKind { independent, clustered };

// Recipe for a reproducible synthetic population: every coordinate of every
// vector is an independent coin flip. Clustered mode partitions the
// coordinates into contiguous blocks and concentrates each vector's mass in
// a randomly chosen home block, renormalized so expected norms stay at
// m * p either way.
struct PopulationSpec {
    std::uint32_t m = 54;
    std::size_t n_agents = 1000;
    std::size_t n_files = 953;
    double p_agent = 1.543 / 54.0;  // per-coordinate activation probability
    double p_file = 3.178 / 54.0;
    StructureKind structure = StructureKind::independent;
    std::size_t k_clusters = 1;   // clustered mode only
    double intra_boost = 1.0;     // clustered mode only: home-block multiplier
    std::uint64_t seed = 1;

    void validate() const {
        if (m < 1) throw std::invalid_argument("population spec: m must be >= 1");
        if (n_agents < 1) throw std::invalid_argument("population spec: n_agents must be >= 1");
        if (n_files < 1) throw std::invalid_argument("population spec: n_files must be >= 1");
        for (double p : {p_agent, p_file}) {
            if (!(p > 0.0)) throw std::invalid_argument("population spec: densities must be > 0");
            if (p > 1.0) {
                throw std::invalid_argument("population spec: density > 1 (expected norm exceeds m)");
            }
        }
        if (structure == StructureKind::clustered) {
            if (k_clusters < 1 || k_clusters > m) {
                throw std::invalid_argument("population spec: k_clusters must be in [1, m]");
            }
            if (!(intra_boost > 0.0)) {
                throw std::invalid_argument("population spec: intra_boost must be > 0");
            }
        }
    }
};

struct Population {
    UnitUniverse universe{1};
    std::vector<Agent> agents;
    std::vector<KnowledgeFile> files;
    std::size_t zero_agents_kept = 0;  // all-zero vectors accepted after retry budget
    std::size_t zero_files_kept = 0;
};

namespace detail {

// Contiguous balanced blocks: the first (m % k) blocks get one extra slot.
inline std::pair<std::uint32_t, std::uint32_t> block_span(std::uint32_t m, std::size_t k,
                                                          std::size_t block) {
    const std::uint32_t base = m / static_cast<std::uint32_t>(k);
    const std::uint32_t rem = m % static_cast<std::uint32_t>(k);
    const auto b = static_cast<std::uint32_t>(block);
    const std::uint32_t lo = b * base + std::min(b, rem);
    const std::uint32_t hi = lo + base + (b < rem ? 1 : 0);
    return {lo, hi};
}

// Per-home densities for base density q: boosted inside the home block,
// scaled by mu so the expected norm given any home is exactly m*q.
struct HomeDensities {
    double p_in = 0.0;
    double p_out = 0.0;
};

inline HomeDensities home_densities(const PopulationSpec& spec, std::size_t home, double q) {
    if (spec.structure != StructureKind::clustered) return {q, q};
    const auto [lo, hi] = block_span(spec.m, spec.k_clusters, home);
    const double b_h = static_cast<double>(hi - lo);
    const double mu = static_cast<double>(spec.m) /
                      (b_h * (spec.intra_boost - 1.0) + static_cast<double>(spec.m));
    return {spec.intra_boost * mu * q, mu * q};
}

// P(all coordinates inactive) at base density q, averaged over home blocks.
inline double zero_probability(const PopulationSpec& spec, double q) {
    const std::size_t k = spec.structure == StructureKind::clustered ? spec.k_clusters : 1;
    double sum = 0.0;
    for (std::size_t h = 0; h < k; ++h) {
        const auto [lo, hi] = block_span(spec.m, k, h);
        const auto [p_in, p_out] = home_densities(spec, h, q);
        sum += std::pow(1.0 - p_in, static_cast<double>(hi - lo)) *
               std::pow(1.0 - p_out, static_cast<double>(spec.m - (hi - lo)));
    }
    return sum / static_cast<double>(k);
}

// Zero vectors get redrawn, which conditions the law on being non-zero and
// would inflate realized norms. Solve for the base density q whose
// conditional mean norm  m*q / (1 - P(zero; q))  equals the target m*p, so
// the population that actually comes out meets the density targets.
inline double solve_base_density(const PopulationSpec& spec, double p) {
    const double m = spec.m;
    const double target = m * p;
    // a non-zero vector has norm >= 1: targets at or below 1 can't be
    // compensated, so take the raw density (retry budget keeps zeros rare
    // only when densities are sane)
    if (target <= 1.0) return p;

    // densities must stay valid Bernoulli parameters in every home block
    double q_cap = 1.0;
    if (spec.structure == StructureKind::clustered) {
        for (std::size_t h = 0; h < spec.k_clusters; ++h) {
            const double p_in_unit = home_densities(spec, h, 1.0).p_in;
            q_cap = std::min(q_cap, 1.0 / p_in_unit);
        }
    }
    const double hi_bound = std::min(p, q_cap);
    const auto conditional_mean = [&](double q) {
        return m * q / (1.0 - zero_probability(spec, q));
    };
    if (conditional_mean(hi_bound) < target * (1.0 - 1e-12)) {
        throw std::invalid_argument(
            "population spec: target norm unreachable (home-block density would exceed 1)");
    }
    double lo = 0.0, hi = hi_bound;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        (conditional_mean(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

// One vector from its own substream, so populations are prefix-stable:
// generating n vectors and truncating equals generating fewer directly.
// `q` is the compensated base density from solve_base_density.
inline UnitVector draw_vector(const PopulationSpec& spec, double q, std::uint64_t kind_tag,
                              std::uint64_t index, std::size_t& zero_kept) {
    constexpr std::size_t max_retries = 100;
    std::vector<std::uint32_t> active;
    for (std::size_t attempt = 0;; ++attempt) {
        SplitMix64 rng(derive_seed(spec.seed, {stream::population, kind_tag, index, attempt}));
        active.clear();
        if (spec.structure == StructureKind::clustered) {
            const std::size_t home = rng.next_below(spec.k_clusters);
            const auto [lo, hi] = block_span(spec.m, spec.k_clusters, home);
            const auto [p_in, p_out] = home_densities(spec, home, q);
            for (std::uint32_t j = 0; j < spec.m; ++j) {
                const double pj = (j >= lo && j < hi) ? p_in : p_out;
                if (rng.next_double() < pj) active.push_back(j);
            }
        } else {
            for (std::uint32_t j = 0; j < spec.m; ++j) {
                if (rng.next_double() < q) active.push_back(j);
            }
        }
        if (!active.empty()) break;
        if (attempt >= max_retries) {  // keep the zero vector rather than loop forever
            ++zero_kept;
            break;
        }
    }
    return make_vector(UnitUniverse{spec.m}, active);
}

constexpr std::uint64_t kind_agent = 0;
constexpr std::uint64_t kind_file = 1;

}  // namespace detail

inline Population generate(const PopulationSpec& spec) {
    spec.validate();
    const double q_agent = detail::solve_base_density(spec, spec.p_agent);
    const double q_file = detail::solve_base_density(spec, spec.p_file);
    Population pop;
    pop.universe = UnitUniverse{spec.m};
    pop.agents.reserve(spec.n_agents);
    for (std::size_t i = 0; i < spec.n_agents; ++i) {
        Agent a;
        a.agent_id = AgentId{i};
        a.interests =
            detail::draw_vector(spec, q_agent, detail::kind_agent, i, pop.zero_agents_kept);
        pop.agents.push_back(std::move(a));
    }
    pop.files.reserve(spec.n_files);
    for (std::size_t i = 0; i < spec.n_files; ++i) {
        KnowledgeFile f;
        f.file_id = FileId{i};
        f.units = detail::draw_vector(spec, q_file, detail::kind_file, i, pop.zero_files_kept);
        f.arrival_index = i;
        pop.files.push_back(std::move(f));
    }
    return pop;
}

// --- population export/import -------------------------------------------
// Newline-delimited rows: kind,id,idx,idx,... (indices ascending; a vector
// with no active coordinates ends after the id).

struct PopulationRecord {
    bool is_agent = true;
    std::uint64_t id = 0;
    std::vector<std::uint32_t> active;
};

inline std::string format_population_record(const PopulationRecord& r) {
    std::string out = r.is_agent ? "agent," : "file,";
    out += std::to_string(r.id);
    for (std::uint32_t j : r.active) {
        out += ',';
        out += std::to_string(j);
    }
    return out;
}

inline void write_population(std::ostream& os, const Population& pop) {
    for (const Agent& a : pop.agents) {
        os << format_population_record({true, a.agent_id.value, a.interests.active()}) << '\n';
    }
    for (const KnowledgeFile& f : pop.files) {
        os << format_population_record({false, f.file_id.value, f.units.active()}) << '\n';
    }
}

inline void write_population_file(const std::string& path, const Population& pop) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_population: cannot open " + path);
    write_population(os, pop);
}

inline PopulationRecord parse_population_record(const std::string& line, std::size_t line_no) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("population line " + std::to_string(line_no) + ": " + why);
    };
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        // trim surrounding spaces so hand-edited rows still parse
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        fields.push_back(b == std::string::npos ? std::string{} : cur.substr(b, e - b + 1));
    }
    if (fields.size() < 2) fail("expected `kind,id,...`");
    PopulationRecord r;
    if (fields[0] == "agent") r.is_agent = true;
    else if (fields[0] == "file") r.is_agent = false;
    else fail("kind must be `agent` or `file`, got `" + fields[0] + "`");
    try {
        r.id = std::stoull(fields[1]);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            if (fields[i].empty()) continue;
            r.active.push_back(static_cast<std::uint32_t>(std::stoul(fields[i])));
        }
    } catch (const std::exception&) {
        fail("non-numeric id or index");
    }
    return r;
}

inline std::vector<PopulationRecord> read_population(std::istream& is) {
    std::vector<PopulationRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out.push_back(parse_population_record(line, line_no));
    }
    return out;
}

inline std::vector<PopulationRecord> read_population_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_population: cannot open " + path);
    return read_population(is);
}

// Rebuilds typed vectors from records. m must cover every index seen.
inline Population materialize_population(const std::vector<PopulationRecord>& records,
                                         std::uint32_t m) {
    Population pop;
    pop.universe = UnitUniverse{m};
    for (const PopulationRecord& r : records) {
        if (r.is_agent) {
            Agent a;
            a.agent_id = AgentId{r.id};
            a.interests = make_vector(pop.universe, r.active);
            pop.agents.push_back(std::move(a));
        } else {
            KnowledgeFile f;
            f.file_id = FileId{r.id};
            f.units = make_vector(pop.universe, r.active);
            f.arrival_index = r.id;
            pop.files.push_back(std::move(f));
        }
    }
    return pop;
}

}  // namespace eci
