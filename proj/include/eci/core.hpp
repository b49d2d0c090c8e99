#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "eci/ids.hpp"

namespace eci {

// The universe of knowledge units. All vectors in a run live in this
// dimension; operations refuse to mix universes.
struct UnitUniverse {
    std::uint32_t m = 0;
};

inline UnitUniverse new_universe(std::uint32_t m) {
    if (m == 0) throw std::invalid_argument("new_universe: m must be >= 1");
    return UnitUniverse{m};
}

// Sparse 0-1 vector over a universe: the sorted, duplicate-free set of
// active unit indices. Two vectors built from the same index set compare
// equal regardless of insertion order.
class UnitVector {
public:
    UnitVector() = default;

    UnitVector(const UnitUniverse& universe, std::vector<std::uint32_t> active)
        : dim_(universe.m), active_(std::move(active)) {
        std::sort(active_.begin(), active_.end());
        active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
        if (!active_.empty() && active_.back() >= dim_) {
            throw std::invalid_argument("UnitVector: active index " + std::to_string(active_.back()) +
                                        " out of range for m=" + std::to_string(dim_));
        }
    }

    std::uint32_t dim() const { return dim_; }
    const std::vector<std::uint32_t>& active() const { return active_; }
    std::size_t active_count() const { return active_.size(); }
    bool is_zero() const { return active_.empty(); }

    bool contains(std::uint32_t index) const {
        return std::binary_search(active_.begin(), active_.end(), index);
    }

    // Inner product of two 0-1 vectors: the number of shared active units.
    std::uint32_t dot(const UnitVector& other) const {
        if (dim_ != other.dim_) throw std::invalid_argument("UnitVector::dot: dimension mismatch");
        std::uint32_t count = 0;
        auto a = active_.begin();
        auto b = other.active_.begin();
        while (a != active_.end() && b != other.active_.end()) {
            if (*a < *b) {
                ++a;
            } else if (*b < *a) {
                ++b;
            } else {
                ++count;
                ++a;
                ++b;
            }
        }
        return count;
    }

    std::vector<std::uint8_t> to_dense() const {
        std::vector<std::uint8_t> bits(dim_, 0);
        for (std::uint32_t i : active_) bits[i] = 1;
        return bits;
    }

    static UnitVector from_dense(const UnitUniverse& universe, const std::vector<std::uint8_t>& bits) {
        if (bits.size() != universe.m) throw std::invalid_argument("from_dense: length mismatch");
        std::vector<std::uint32_t> active;
        for (std::uint32_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) active.push_back(i);
        }
        return UnitVector(universe, std::move(active));
    }

    friend bool operator==(const UnitVector&, const UnitVector&) = default;

private:
    std::uint32_t dim_ = 0;
    std::vector<std::uint32_t> active_;
};

inline UnitVector make_vector(const UnitUniverse& universe, std::vector<std::uint32_t> active) {
    return UnitVector(universe, std::move(active));
}

// A posted knowledge file: its unit vector plus identity and provenance.
struct KnowledgeFile {
    FileId file_id;
    UnitVector units;
    std::optional<AgentId> poster;  // absent when posted by the system
    std::uint64_t arrival_index = 0;
};

struct PushRecord {
    FileId file;
    bool matched;
};

// An agent: interest vector, the log of files pushed to it (match outcome
// frozen at push time), and the items it belongs to.
struct Agent {
    AgentId agent_id;
    UnitVector interests;
    std::vector<PushRecord> pushed_log;
    std::set<ItemId> memberships;
};

// A node of the knowledge graph: the files collected into it, the agents
// belonging to it, and the file whose spread founded it.
//
// `files` is kept in arrival order, which is ascending file id; several
// routines rely on that for linear-time intersections.
struct Item {
    ItemId item_id;
    std::vector<FileId> files;
    std::set<AgentId> agents;
    FileId founding_file;

    std::size_t file_count() const { return files.size(); }
    std::size_t agent_count() const { return agents.size(); }

    bool has_file(FileId f) const {
        return std::binary_search(files.begin(), files.end(), f);
    }
};

// Behavioral contract for deciding whether an agent is interested in a file.
// Must be deterministic for a fixed (agent, file) pair within a run.
struct AgentResponder {
    virtual ~AgentResponder() = default;
    virtual bool matches(const Agent& agent, const KnowledgeFile& file) const = 0;
};

}  // namespace eci
