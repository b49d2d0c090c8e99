#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "eci/engine.hpp"
#include "eci/synthgen.hpp"

namespace eci {

// A config problem the caller should report as a usage error (exit 2).
// `where` names the offending field or line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct ReportToggles {
    bool metrics = true;
    bool edges = true;
    bool dot = true;
    bool events = true;
    bool population = true;
    bool summary = true;
};

// Everything one simulation run needs. A single seed feeds both the
// population and the engine through named substreams, so `population.seed`
// and `engine.rng_seed` are not independent knobs here.
struct RunConfig {
    PopulationSpec population;
    EngineConfig engine;
    double t_e = 0.1;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::uint64_t baseline_trials = 0;  // 0: closed-form baseline only
    ReportToggles reports;

    // Effective sub-configs with the shared seed applied.
    PopulationSpec effective_population() const {
        PopulationSpec p = population;
        p.seed = seed;
        return p;
    }
    EngineConfig effective_engine() const {
        EngineConfig e = engine;
        e.rng_seed = seed;
        return e;
    }

    void validate() const {
        effective_population().validate();
        effective_engine().validate();
        if (t_e < 0.0 || t_e > 1.0) throw ConfigError("t_e", "must be in [0,1]");
        if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
    }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                                const std::string& scope) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) {
            if (key == k) { ok = true; break; }
        }
        if (!ok) throw ConfigError(scope.empty() ? key : scope + "." + key, "unknown key");
    }
}

template <class T>
void read_field(const json& obj, const char* key, T& out, const std::string& scope) {
    auto it = obj.find(key);
    if (it == obj.end()) return;  // missing keys keep defaults
    const std::string where = scope.empty() ? key : scope + "." + std::string(key);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigError(where, "expected a boolean");
            out = it->get<bool>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ConfigError(where, "expected a number");
            out = it->get<double>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw ConfigError(where, "expected a string");
            out = it->get<std::string>();
        } else {
            if (!it->is_number_unsigned()) throw ConfigError(where, "expected a non-negative integer");
            out = it->get<T>();
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where, e.what());
    }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Map the parser's byte offset to a line number for the diagnostic.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line;
        }
        throw ConfigError("line " + std::to_string(line), e.what());
    }
    if (!root.is_object()) throw ConfigError("config", "top level must be an object");

    RunConfig cfg;
    detail::reject_unknown_keys(
        root, {"population", "engine", "t_e", "seed", "out_dir", "baseline_trials", "reports"},
        "");

    if (root.contains("population")) {
        const json& p = root["population"];
        if (!p.is_object()) throw ConfigError("population", "expected an object");
        detail::reject_unknown_keys(p,
                                    {"m", "n_agents", "n_files", "p_agent", "p_file", "structure",
                                     "k_clusters", "intra_boost"},
                                    "population");
        detail::read_field(p, "m", cfg.population.m, "population");
        detail::read_field(p, "n_agents", cfg.population.n_agents, "population");
        detail::read_field(p, "n_files", cfg.population.n_files, "population");
        detail::read_field(p, "p_agent", cfg.population.p_agent, "population");
        detail::read_field(p, "p_file", cfg.population.p_file, "population");
        if (p.contains("structure")) {
            std::string s;
            detail::read_field(p, "structure", s, "population");
            if (s == "independent") cfg.population.structure = StructureKind::independent;
            else if (s == "clustered") cfg.population.structure = StructureKind::clustered;
            else throw ConfigError("population.structure", "must be `independent` or `clustered`");
        }
        detail::read_field(p, "k_clusters", cfg.population.k_clusters, "population");
        detail::read_field(p, "intra_boost", cfg.population.intra_boost, "population");
    }

    if (root.contains("engine")) {
        const json& e = root["engine"];
        if (!e.is_object()) throw ConfigError("engine", "expected an object");
        detail::reject_unknown_keys(e,
                                    {"n_init", "t_new", "t_vote", "rho", "max_rounds", "t_add",
                                     "k_act", "t_join", "edge_propagation"},
                                    "engine");
        detail::read_field(e, "n_init", cfg.engine.n_init, "engine");
        detail::read_field(e, "t_new", cfg.engine.t_new, "engine");
        detail::read_field(e, "t_vote", cfg.engine.t_vote, "engine");
        detail::read_field(e, "rho", cfg.engine.rho, "engine");
        detail::read_field(e, "max_rounds", cfg.engine.max_rounds, "engine");
        detail::read_field(e, "t_add", cfg.engine.t_add, "engine");
        detail::read_field(e, "k_act", cfg.engine.k_act, "engine");
        detail::read_field(e, "t_join", cfg.engine.t_join, "engine");
        detail::read_field(e, "edge_propagation", cfg.engine.edge_propagation, "engine");
    }

    detail::read_field(root, "t_e", cfg.t_e, "");
    detail::read_field(root, "seed", cfg.seed, "");
    detail::read_field(root, "out_dir", cfg.out_dir, "");
    detail::read_field(root, "baseline_trials", cfg.baseline_trials, "");

    if (root.contains("reports")) {
        const json& r = root["reports"];
        if (!r.is_object()) throw ConfigError("reports", "expected an object");
        detail::reject_unknown_keys(
            r, {"metrics", "edges", "dot", "events", "population", "summary"}, "reports");
        detail::read_field(r, "metrics", cfg.reports.metrics, "reports");
        detail::read_field(r, "edges", cfg.reports.edges, "reports");
        detail::read_field(r, "dot", cfg.reports.dot, "reports");
        detail::read_field(r, "events", cfg.reports.events, "reports");
        detail::read_field(r, "population", cfg.reports.population, "reports");
        detail::read_field(r, "summary", cfg.reports.summary, "reports");
    }

    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("config", e.what());
    }
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

// Serializes every effective value, so parse(serialize(cfg)) == cfg.
inline std::string serialize_config(const RunConfig& cfg) {
    nlohmann::ordered_json root;
    root["population"] = {
        {"m", cfg.population.m},
        {"n_agents", cfg.population.n_agents},
        {"n_files", cfg.population.n_files},
        {"p_agent", cfg.population.p_agent},
        {"p_file", cfg.population.p_file},
        {"structure",
         cfg.population.structure == StructureKind::clustered ? "clustered" : "independent"},
        {"k_clusters", cfg.population.k_clusters},
        {"intra_boost", cfg.population.intra_boost},
    };
    root["engine"] = {
        {"n_init", cfg.engine.n_init},
        {"t_new", cfg.engine.t_new},
        {"t_vote", cfg.engine.t_vote},
        {"rho", cfg.engine.rho},
        {"max_rounds", cfg.engine.max_rounds},
        {"t_add", cfg.engine.t_add},
        {"k_act", cfg.engine.k_act},
        {"t_join", cfg.engine.t_join},
        {"edge_propagation", cfg.engine.edge_propagation},
    };
    root["t_e"] = cfg.t_e;
    root["seed"] = cfg.seed;
    root["out_dir"] = cfg.out_dir;
    root["baseline_trials"] = cfg.baseline_trials;
    root["reports"] = {
        {"metrics", cfg.reports.metrics},     {"edges", cfg.reports.edges},
        {"dot", cfg.reports.dot},             {"events", cfg.reports.events},
        {"population", cfg.reports.population}, {"summary", cfg.reports.summary},
    };
    return root.dump(2) + "\n";
}

}  // namespace eci
