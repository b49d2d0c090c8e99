#pragma once

#include "eci/core.hpp"

namespace eci {

// Outcome of a match check. `degree` is the raw count of shared units;
// matched holds exactly when degree >= 1.
struct MatchResult {
    bool matched = false;
    std::uint32_t degree = 0;
};

// An agent matches a file iff their vectors share at least one unit.
inline MatchResult match_agent_file(const Agent& agent, const KnowledgeFile& file) {
    const std::uint32_t degree = file.units.dot(agent.interests);
    return {degree >= 1, degree};
}

// Same inner-product form between two files; files and agents share one
// vector space, so the predicate carries over unchanged.
inline MatchResult match_file_file(const KnowledgeFile& a, const KnowledgeFile& b) {
    const std::uint32_t degree = a.units.dot(b.units);
    return {degree >= 1, degree};
}

// Default responder for synthetic agents: interest is vector overlap.
struct SyntheticResponder final : AgentResponder {
    bool matches(const Agent& agent, const KnowledgeFile& file) const override {
        return match_agent_file(agent, file).matched;
    }
};

}  // namespace eci
