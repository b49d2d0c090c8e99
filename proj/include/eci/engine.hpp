#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "eci/core.hpp"
#include "eci/kns_graph.hpp"
#include "eci/matching.hpp"
#include "eci/rng.hpp"

namespace eci {

// Tunables for one simulation run. Defaults are chosen so a ~1000-agent,
// ~1000-file run completes in seconds; every value can be overridden.
struct EngineConfig {
    std::size_t n_init = 20;      // agents reached by the initial spread
    std::size_t t_new = 3;        // matched agents needed to found an item
    double t_vote = 0.5;          // per-round voting-ratio threshold
    double rho = 0.3;             // fraction of the remaining pool pushed per round
    std::size_t max_rounds = 5;   // round cap per (file, item)
    std::uint32_t t_add = 1;      // min file-file degree vs. the founding file
    std::size_t k_act = 1;        // matched members needed to activate an item
    std::size_t t_join = 1;       // matched member files needed for an agent to join
    bool edge_propagation = false;  // expand activation along stored graph edges
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (n_init < 1) throw std::invalid_argument("engine config: n_init must be >= 1");
        if (t_new < 1) throw std::invalid_argument("engine config: t_new must be >= 1");
        if (t_vote < 0.0 || t_vote > 1.0) throw std::invalid_argument("engine config: t_vote must be in [0,1]");
        if (!(rho > 0.0) || rho > 1.0) throw std::invalid_argument("engine config: rho must be in (0,1]");
        if (max_rounds < 1) throw std::invalid_argument("engine config: max_rounds must be >= 1");
        if (k_act < 1) throw std::invalid_argument("engine config: k_act must be >= 1");
        if (t_join < 1) throw std::invalid_argument("engine config: t_join must be >= 1");
    }
};

enum class LifecyclePhase { arrived, initial_spread_done, spreading, settled };

// Why a (file, item) spread stopped.
enum class SpreadEnd { none, failed_vote, pool_exhausted, max_rounds_reached };

// Per-item round state of one file's spread.
struct ItemSpreadState {
    std::vector<AgentId> pool;  // members not yet pushed this file, ascending
    std::size_t rounds_completed = 0;
    bool all_passed = true;
    SpreadEnd end = SpreadEnd::none;

    bool live() const { return end == SpreadEnd::none; }
};

// Everything the engine tracks while one file moves through the pipeline.
struct FileLifecycle {
    FileId file;
    LifecyclePhase phase = LifecyclePhase::arrived;
    std::map<ItemId, ItemSpreadState> item_state;
    std::set<AgentId> pushed_agents;   // global dedup: one push per agent per file
    std::set<AgentId> matched_agents;  // across initial spread and all rounds
    std::optional<ItemId> created_item;
    std::vector<ItemId> added_items;  // existing items that accepted this file
};

enum class EventKind : std::uint8_t { post, push, round, add_file, new_item, join };

// One log record. Fields that do not apply hold the sentinels below;
// `matched` is -1 (n/a), 0, or 1 and doubles as the round pass flag.
struct Event {
    static constexpr std::uint64_t no_id = UINT64_MAX;
    static constexpr std::uint32_t no_round = 0;

    EventKind kind = EventKind::post;
    std::uint64_t file = no_id;
    std::uint64_t item = no_id;
    std::uint64_t agent = no_id;
    std::uint32_t round = no_round;
    std::int8_t matched = -1;
};

struct RoundOutcome {
    bool passed = false;
    std::size_t pushed = 0;
    std::size_t matched = 0;
};

// Full simulation state. Mutated only through the engine (single writer);
// between lifecycles it can be snapshotted and read freely.
struct SimulationState {
    UnitUniverse universe;
    std::vector<Agent> agents;        // index == agent id
    std::vector<KnowledgeFile> files; // index == file id
    std::vector<Item> items;          // index == item id
    KnsGraph graph;
    std::vector<Event> events;
    // Per (item, non-member agent): matched member files so far. Drives joins.
    std::map<ItemId, std::map<AgentId, std::size_t>> join_progress;

    SimulationState() : graph(0.1) {}
};

// Drives the per-file pipeline: post, initial spread, multi-round voted
// spread inside activated items, add-into-item, new-item creation, and
// membership growth. Owns all mutation of the simulation state.
class Engine {
public:
    Engine(UnitUniverse universe, std::vector<Agent> population, EngineConfig cfg,
           double t_e = 0.1, const AgentResponder* responder = nullptr)
        : cfg_(cfg), responder_(responder ? responder : &default_responder_) {
        cfg_.validate();
        state_.universe = universe;
        state_.agents = std::move(population);
        state_.graph = KnsGraph(t_e);
        validate_population();
    }

    // Resume from a snapshot taken between file lifecycles.
    Engine(SimulationState state, EngineConfig cfg, const AgentResponder* responder = nullptr)
        : cfg_(cfg), responder_(responder ? responder : &default_responder_),
          state_(std::move(state)) {
        cfg_.validate();
        validate_population();
    }

    const SimulationState& state() const { return state_; }
    const EngineConfig& config() const { return cfg_; }

    // Registers a fresh file. No pushes happen yet.
    FileLifecycle post_file(KnowledgeFile f) {
        if (f.units.dim() != state_.universe.m) {
            throw std::invalid_argument("post_file: file universe mismatch");
        }
        if (f.file_id.value != state_.files.size()) {
            throw std::invalid_argument("post_file: file id must be fresh and sequential");
        }
        FileLifecycle lc;
        lc.file = f.file_id;
        log({EventKind::post, f.file_id.value});
        state_.files.push_back(std::move(f));
        return lc;
    }

    // Pushes the file to min(n_init, population) agents sampled uniformly
    // without replacement from the whole population.
    void initial_spread(FileLifecycle& lc) {
        if (lc.phase != LifecyclePhase::arrived) {
            throw std::logic_error("initial_spread: lifecycle not in arrived phase");
        }
        if (state_.agents.empty()) {
            throw std::runtime_error("initial_spread: empty population");
        }
        std::vector<AgentId> all(state_.agents.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = AgentId{i};
        SplitMix64 rng(derive_seed(cfg_.rng_seed, {stream::initial_spread, lc.file.value}));
        for (AgentId a : sample_without_replacement(std::move(all), cfg_.n_init, rng)) {
            push_to(lc, a, std::nullopt, Event::no_round);
        }
        lc.phase = LifecyclePhase::initial_spread_done;
    }

    // Items eligible to spread this file now: at least k_act member agents
    // matched it (or a live spread is already underway), optionally expanded
    // along stored graph edges, minus items whose spread already ended.
    std::vector<ItemId> activate_items(const FileLifecycle& lc) const {
        if (lc.phase == LifecyclePhase::arrived) {
            throw std::logic_error("activate_items: initial spread has not run");
        }
        std::map<ItemId, std::size_t> matched_members;
        for (AgentId a : lc.matched_agents) {
            for (ItemId v : state_.agents[a.value].memberships) ++matched_members[v];
        }
        std::set<ItemId> active;
        for (const auto& [item, count] : matched_members) {
            if (count >= cfg_.k_act) active.insert(item);
        }
        for (const auto& [item, st] : lc.item_state) {
            if (st.live()) active.insert(item);
        }
        if (cfg_.edge_propagation) {
            std::vector<ItemId> frontier(active.begin(), active.end());
            while (!frontier.empty()) {
                const ItemId v = frontier.back();
                frontier.pop_back();
                for (ItemId w : state_.graph.out_neighbors(v)) {
                    if (active.insert(w).second) frontier.push_back(w);
                }
            }
        }
        std::vector<ItemId> out;
        for (ItemId v : active) {
            auto it = lc.item_state.find(v);
            if (it != lc.item_state.end() && !it->second.live()) continue;  // already ended
            out.push_back(v);
        }
        return out;
    }

    // One voted round inside an item: push the file to ceil(rho * pool)
    // not-yet-pushed members, record matches, and stop the spread on a
    // failed vote, an exhausted pool, or the round cap.
    RoundOutcome spread_round(FileLifecycle& lc, ItemId item) {
        auto it = lc.item_state.find(item);
        if (it == lc.item_state.end()) {
            begin_item_spread(lc, item);
            it = lc.item_state.find(item);
        }
        ItemSpreadState& st = it->second;
        if (!st.live()) throw std::logic_error("spread_round: spread already ended for this item");

        std::erase_if(st.pool, [&](AgentId a) { return lc.pushed_agents.count(a) > 0; });
        if (st.pool.empty()) {
            st.end = SpreadEnd::pool_exhausted;
            return {true, 0, 0};
        }

        const auto want = static_cast<std::size_t>(
            std::ceil(cfg_.rho * static_cast<double>(st.pool.size())));
        SplitMix64 rng(derive_seed(
            cfg_.rng_seed,
            {stream::spread_round, lc.file.value, item.value,
             static_cast<std::uint64_t>(st.rounds_completed + 1)}));
        const std::vector<AgentId> sampled = sample_without_replacement(st.pool, want, rng);

        std::size_t matched = 0;
        const auto round_no = static_cast<std::uint32_t>(st.rounds_completed + 1);
        for (AgentId a : sampled) {
            if (push_to(lc, a, item, round_no)) ++matched;
        }
        std::set<AgentId> taken(sampled.begin(), sampled.end());
        std::erase_if(st.pool, [&](AgentId a) { return taken.count(a) > 0; });
        st.rounds_completed = round_no;

        const bool passed =
            static_cast<double>(matched) >= cfg_.t_vote * static_cast<double>(sampled.size());
        log({EventKind::round, lc.file.value, item.value, Event::no_id, round_no,
             static_cast<std::int8_t>(passed ? 1 : 0)});

        if (!passed) {
            st.all_passed = false;
            st.end = SpreadEnd::failed_vote;
        } else if (st.pool.empty()) {
            st.end = SpreadEnd::pool_exhausted;
        } else if (st.rounds_completed >= cfg_.max_rounds) {
            st.end = SpreadEnd::max_rounds_reached;
        }
        return {passed, sampled.size(), matched};
    }

    // A file that ended its spread in an item joins the item's file set iff
    // no round failed and it overlaps the founding file strongly enough.
    bool try_add_into_item(FileLifecycle& lc, ItemId item) {
        auto it = lc.item_state.find(item);
        if (it == lc.item_state.end() || it->second.live()) {
            throw std::logic_error("try_add_into_item: spread has not ended for this item");
        }
        const ItemSpreadState& st = it->second;
        if (!st.all_passed || st.end == SpreadEnd::failed_vote) return false;

        Item& v = state_.items[item.value];
        const KnowledgeFile& f = state_.files[lc.file.value];
        const KnowledgeFile& founding = state_.files[v.founding_file.value];
        if (match_file_file(f, founding).degree < cfg_.t_add) return false;

        v.files.push_back(lc.file);  // arrival order == ascending id
        lc.added_items.push_back(item);
        state_.graph.refresh_edges(item, state_.items);
        log({EventKind::add_file, lc.file.value, item.value});
        return true;
    }

    // Founds a new item from this file when enough agents matched it,
    // regardless of whether the file also joined existing items.
    std::optional<ItemId> try_new_item(FileLifecycle& lc) {
        if (lc.created_item) throw std::logic_error("try_new_item: already attempted");
        if (lc.matched_agents.size() < cfg_.t_new) return std::nullopt;

        const ItemId id{state_.items.size()};
        Item v;
        v.item_id = id;
        v.files = {lc.file};
        v.agents = lc.matched_agents;
        v.founding_file = lc.file;
        state_.items.push_back(std::move(v));
        for (AgentId a : lc.matched_agents) state_.agents[a.value].memberships.insert(id);
        state_.graph.add_node(id);
        state_.graph.refresh_edges(id, state_.items);
        log({EventKind::new_item, lc.file.value, id.value});
        lc.created_item = id;
        return id;
    }

    // Grows item memberships: a non-member joins an item once it has
    // matched t_join of the item's files. Counts are maintained
    // incrementally, so only items that just received this file can
    // cross the threshold here.
    std::size_t update_memberships(FileLifecycle& lc) {
        std::size_t joins = 0;
        std::vector<ItemId> touched = lc.added_items;
        if (lc.created_item) touched.push_back(*lc.created_item);
        for (ItemId id : touched) {
            Item& v = state_.items[id.value];
            auto& progress = state_.join_progress[id];
            for (AgentId a : lc.matched_agents) {
                if (v.agents.count(a)) continue;
                if (++progress[a] >= cfg_.t_join) {
                    v.agents.insert(a);
                    state_.agents[a.value].memberships.insert(id);
                    log({EventKind::join, lc.file.value, id.value, a.value});
                    ++joins;
                }
            }
        }
        return joins;
    }

    // Runs the whole pipeline for one posted file.
    void run_file(FileLifecycle& lc) {
        initial_spread(lc);
        lc.phase = LifecyclePhase::spreading;
        while (true) {
            bool any_round = false;
            for (ItemId item : activate_items(lc)) {
                if (!lc.item_state.count(item)) begin_item_spread(lc, item);
                if (!lc.item_state.at(item).live()) continue;
                if (spread_round(lc, item).pushed > 0) any_round = true;
            }
            if (!any_round) break;
        }
        for (auto& [item, st] : lc.item_state) {
            (void)st;
            try_add_into_item(lc, item);
        }
        try_new_item(lc);
        update_memberships(lc);
        lc.phase = LifecyclePhase::settled;
    }

    FileLifecycle process(KnowledgeFile f) {
        FileLifecycle lc = post_file(std::move(f));
        run_file(lc);
        return lc;
    }

private:
    void validate_population() {
        for (std::size_t i = 0; i < state_.agents.size(); ++i) {
            if (state_.agents[i].agent_id.value != i) {
                throw std::invalid_argument("engine: agent ids must be sequential from 0");
            }
            if (state_.agents[i].interests.dim() != state_.universe.m) {
                throw std::invalid_argument("engine: agent vector dimension mismatch");
            }
        }
    }

    void begin_item_spread(FileLifecycle& lc, ItemId item) {
        ItemSpreadState st;
        const Item& v = state_.items[item.value];
        st.pool.assign(v.agents.begin(), v.agents.end());  // membership at activation
        lc.item_state.emplace(item, std::move(st));
    }

    // Single push entry point: records the event, the agent's log, and the
    // lifecycle dedup/matched sets. Returns the match outcome.
    bool push_to(FileLifecycle& lc, AgentId a, std::optional<ItemId> item, std::uint32_t round) {
        if (!lc.pushed_agents.insert(a).second) {
            throw std::logic_error("push_to: agent already pushed this file");
        }
        Agent& agent = state_.agents[a.value];
        const KnowledgeFile& f = state_.files[lc.file.value];
        const bool matched = responder_->matches(agent, f);
        agent.pushed_log.push_back({lc.file, matched});
        if (matched) lc.matched_agents.insert(a);
        log({EventKind::push, lc.file.value, item ? item->value : Event::no_id, a.value, round,
             static_cast<std::int8_t>(matched ? 1 : 0)});
        return matched;
    }

    void log(Event e) { state_.events.push_back(e); }

    EngineConfig cfg_;
    const AgentResponder* responder_;
    SimulationState state_;

    static inline const SyntheticResponder default_responder_{};
};

// Processes the whole stream in arrival order and returns the final state.
inline SimulationState run_simulation(UnitUniverse universe, std::vector<Agent> population,
                                      std::vector<KnowledgeFile> stream, const EngineConfig& cfg,
                                      double t_e = 0.1,
                                      const AgentResponder* responder = nullptr) {
    Engine engine(universe, std::move(population), cfg, t_e, responder);
    for (KnowledgeFile& f : stream) engine.process(std::move(f));
    return engine.state();
}

}  // namespace eci
