#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eci/config.hpp"
#include "eci/engine.hpp"
#include "eci/exports.hpp"
#include "eci/metrics.hpp"
#include "eci/synthgen.hpp"

namespace eci {

namespace cli_detail {

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::string format = "json";
};

inline RunConfig load_run_config(const CommonFlags& flags) {
    RunConfig cfg = load_config_file(flags.config_path);
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (flags.seed) cfg.seed = *flags.seed;
    cfg.validate();
    return cfg;
}

struct RunOutput {
    SimulationState state;
    Population population;
    RunMetrics metrics;
};

inline RunOutput execute_run(const RunConfig& cfg) {
    RunOutput out;
    out.population = generate(cfg.effective_population());
    out.state = run_simulation(out.population.universe, out.population.agents,
                               out.population.files, cfg.effective_engine(), cfg.t_e);
    const double baseline = baseline_match_probability(
        cfg.population.m, cfg.population.p_file, cfg.population.p_agent);
    out.metrics = collect_metrics(out.state, baseline);
    return out;
}

inline int cmd_simulate(const CommonFlags& flags, std::ostream& out) {
    const RunConfig cfg = load_run_config(flags);
    const RunOutput run = execute_run(cfg);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const auto path = [&](const char* name) { return (fs::path(cfg.out_dir) / name).string(); };

    if (cfg.reports.metrics) {
        if (flags.format == "tsv") {
            write_text_file(path("metrics.tsv"),
                            [&](std::ostream& os) { write_metrics_tsv(os, run.metrics); });
        } else {
            write_text_file(path("metrics.json"),
                            [&](std::ostream& os) { write_metrics_json(os, run.metrics); });
        }
    }
    if (cfg.reports.edges) {
        write_text_file(path("edges.tsv"),
                        [&](std::ostream& os) { write_edges_tsv(os, run.state.graph); });
    }
    if (cfg.reports.dot) {
        write_text_file(path("graph.dot"), [&](std::ostream& os) {
            write_dot(os, run.state.graph, run.state.items);
        });
    }
    if (cfg.reports.events) {
        write_text_file(path("events.log"),
                        [&](std::ostream& os) { write_event_log(os, run.state.events); });
    }
    if (cfg.reports.population) {
        write_text_file(path("population.txt"),
                        [&](std::ostream& os) { write_population(os, run.population); });
    }
    if (cfg.reports.summary) {
        write_text_file(path("summary.txt"),
                        [&](std::ostream& os) { write_summary(os, run.metrics); });
    }
    write_summary(out, run.metrics);
    return 0;
}

inline int cmd_export_graph(const CommonFlags& flags, std::ostream& out) {
    const RunConfig cfg = load_run_config(flags);
    const RunOutput run = execute_run(cfg);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const auto path = [&](const char* name) { return (fs::path(cfg.out_dir) / name).string(); };
    write_text_file(path("edges.tsv"),
                    [&](std::ostream& os) { write_edges_tsv(os, run.state.graph); });
    write_text_file(path("graph.dot"),
                    [&](std::ostream& os) { write_dot(os, run.state.graph, run.state.items); });
    out << "nodes: " << run.state.graph.node_count() << "\nedges: " << run.state.graph.edge_count()
        << "\n";
    return 0;
}

inline int cmd_oracle(const std::string& files_path, std::size_t max_clusters,
                      const std::string& partition_csv, std::ostream& out) {
    std::vector<UnitVector> vectors;
    {
        const auto records = read_population_file(files_path);
        std::uint32_t m = 0;
        for (const auto& r : records) {
            if (r.is_agent) continue;
            for (std::uint32_t j : r.active) m = std::max(m, j + 1);
        }
        if (m == 0) m = 1;  // all-zero file sets still need a dimension
        const UnitUniverse universe{m};
        for (const auto& r : records) {
            if (!r.is_agent) vectors.push_back(make_vector(universe, r.active));
        }
    }
    if (vectors.empty()) throw ConfigError(files_path, "no file records found");
    if (vectors.size() > 10) {
        throw ConfigError(files_path, "too many files for exhaustive enumeration (max 10)");
    }

    const PartitionResult best = oracle_min_msre(vectors, max_clusters);
    out << "files: " << vectors.size() << "\npartitions scanned: " << best.partitions_scanned
        << "\noptimal blocks: " << best.n_blocks << "\noptimal assignment:";
    for (std::size_t b : best.block_of) out << ' ' << b;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", best.msre);
    out << "\noptimal msre: " << buf << "\n";

    if (!partition_csv.empty()) {
        std::vector<std::size_t> block_of;
        std::stringstream ss(partition_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                block_of.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                throw ConfigError("--partition", "expected comma-separated block indices");
            }
        }
        if (block_of.size() != vectors.size()) {
            throw ConfigError("--partition", "length must equal the number of files");
        }
        const double given = partition_msre(vectors, block_of);
        std::snprintf(buf, sizeof buf, "%.12f", given);
        out << "given msre: " << buf << "\n";
        out << "optimal <= given: " << (best.msre <= given ? "yes" : "no") << "\n";
    }
    return 0;
}

inline int cmd_baseline(std::uint32_t m, double p_file, double p_agent, std::uint64_t trials,
                        std::uint64_t seed, std::ostream& out) {
    if (!(p_file > 0.0) || p_file > 1.0 || !(p_agent > 0.0) || p_agent > 1.0) {
        throw ConfigError("densities", "p_file and p_agent must be in (0,1]");
    }
    const BaselineEstimate est = random_baseline_snr(m, p_file, p_agent, trials, seed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "closed form: %.6f\n", est.closed_form);
    out << buf;
    if (trials > 0) {
        std::snprintf(buf, sizeof buf, "monte carlo: %.6f  (stderr %.6f, trials %" PRIu64 ")\n",
                      est.monte_carlo, est.std_error, est.trials);
        out << buf;
    }
    return 0;
}

}  // namespace cli_detail

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 runtime failure, 2 usage/config error.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    using namespace cli_detail;

    CLI::App app{"knowledge-network simulator"};
    app.require_subcommand(1);

    CommonFlags flags;

    CLI::App* sim = app.add_subcommand("simulate", "run a full simulation and write artifacts");
    sim->add_option("--config", flags.config_path, "path to a JSON run configuration")
        ->required();
    sim->add_option("--out", flags.out_dir, "output directory (overrides config)");
    sim->add_option("--seed", flags.seed, "seed override");
    sim->add_option("--format", flags.format, "metrics format: json or tsv")
        ->check(CLI::IsMember({"json", "tsv"}));

    CLI::App* exp = app.add_subcommand("export-graph", "run and write only the graph exports");
    exp->add_option("--config", flags.config_path, "path to a JSON run configuration")
        ->required();
    exp->add_option("--out", flags.out_dir, "output directory (overrides config)");
    exp->add_option("--seed", flags.seed, "seed override");

    std::string oracle_files;
    std::size_t oracle_max_clusters = SIZE_MAX;
    std::string oracle_partition;
    CLI::App* ora = app.add_subcommand("oracle", "exact minimum-MSRE partition of a small file set");
    ora->add_option("--files", oracle_files, "population export holding the file records")
        ->required();
    ora->add_option("--max-clusters", oracle_max_clusters, "largest allowed block count");
    ora->add_option("--partition", oracle_partition,
                    "comma-separated block index per file, to score against the optimum");

    std::uint32_t bl_m = 54;
    double bl_pf = 3.178 / 54.0;
    double bl_pa = 1.543 / 54.0;
    std::uint64_t bl_trials = 100000;
    std::uint64_t bl_seed = 1;
    CLI::App* bas = app.add_subcommand("baseline", "random-push match probability");
    bas->add_option("--m", bl_m, "unit-universe dimension");
    bas->add_option("--p-file", bl_pf, "per-coordinate file density");
    bas->add_option("--p-agent", bl_pa, "per-coordinate agent density");
    bas->add_option("--trials", bl_trials, "Monte-Carlo trials (0: closed form only)");
    bas->add_option("--seed", bl_seed, "Monte-Carlo seed");

    // CLI11 wants argv-style reversed input when parsing a vector.
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;  // help/version exit 0; any parse problem is usage error
    }

    try {
        if (sim->parsed()) return cmd_simulate(flags, out);
        if (exp->parsed()) return cmd_export_graph(flags, out);
        if (ora->parsed()) return cmd_oracle(oracle_files, oracle_max_clusters, oracle_partition, out);
        if (bas->parsed()) return cmd_baseline(bl_m, bl_pf, bl_pa, bl_trials, bl_seed, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

inline int run_cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(std::move(args));
}

}  // namespace eci
