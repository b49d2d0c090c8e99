#include "eci/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eci;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

// Per-fixture scratch dir, wiped on teardown.
class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("eci_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_file(const std::string& name, const std::string& text) const {
        const std::string p = path(name);
        std::ofstream os(p);
        os << text;
        return p;
    }

    static std::string read_file(const std::string& p) {
        std::ifstream is(p);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    // small, fast population
    std::string small_config(const std::string& extra = "") const {
        return std::string(R"({
  "population": {"m": 12, "n_agents": 40, "n_files": 30,
                 "p_agent": 0.15, "p_file": 0.25},
  "seed": 7,
  "baseline_trials": 2000,
  "out_dir": ")") + path("out") + "\"" + extra + "\n}";
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesAllArtifacts) {
    const std::string cfg = write_file("run.json", small_config());
    const CliResult r = run({"simulate", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* name :
         {"metrics.json", "edges.tsv", "graph.dot", "events.log", "population.txt",
          "summary.txt"}) {
        EXPECT_TRUE(fs::exists(fs::path(path("out")) / name)) << name;
    }
    const std::string metrics = read_file(path("out") + "/metrics.json");
    for (const char* key : {"system_snr", "random_baseline_snr", "system_msre", "n_items",
                            "n_edges", "n_pushes", "item_msre", "item_file_counts",
                            "item_agent_counts"}) {
        EXPECT_NE(metrics.find(key), std::string::npos) << key;
    }
    EXPECT_NE(r.out.find("system snr"), std::string::npos);
    // the event log starts with the first file's post record
    const std::string events = read_file(path("out") + "/events.log");
    EXPECT_EQ(events.substr(0, events.find('\n')), "post,0,-,-,-,-");
}

TEST_F(CliTest, SimulateTsvFormat) {
    const std::string cfg = write_file("run.json", small_config());
    const CliResult r = run({"simulate", "--config", cfg, "--format", "tsv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(fs::path(path("out")) / "metrics.tsv"));
    EXPECT_FALSE(fs::exists(fs::path(path("out")) / "metrics.json"));
    const std::string tsv = read_file(path("out") + "/metrics.tsv");
    EXPECT_NE(tsv.find("system_snr\t"), std::string::npos);
}

TEST_F(CliTest, RepeatRunsAreByteIdentical) {
    const std::string cfg = write_file("run.json", small_config());
    ASSERT_EQ(run({"simulate", "--config", cfg}).code, 0);
    std::map<std::string, std::string> first;
    for (const auto& entry : fs::directory_iterator(path("out"))) {
        first[entry.path().filename().string()] = read_file(entry.path().string());
    }
    fs::remove_all(path("out"));
    ASSERT_EQ(run({"simulate", "--config", cfg}).code, 0);
    for (const auto& [name, text] : first) {
        EXPECT_EQ(read_file(path("out") + "/" + name), text) << name;
    }
    EXPECT_EQ(first.size(), 6u);
}

TEST_F(CliTest, SeedOverrideChangesArtifacts) {
    const std::string cfg = write_file("run.json", small_config());
    ASSERT_EQ(run({"simulate", "--config", cfg}).code, 0);
    const std::string base_events = read_file(path("out") + "/events.log");
    ASSERT_EQ(run({"simulate", "--config", cfg, "--seed", "99"}).code, 0);
    EXPECT_NE(read_file(path("out") + "/events.log"), base_events);
}

TEST_F(CliTest, OutOverrideRedirectsArtifacts) {
    const std::string cfg = write_file("run.json", small_config());
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", path("elsewhere")}).code, 0);
    EXPECT_TRUE(fs::exists(fs::path(path("elsewhere")) / "metrics.json"));
    EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, ReportTogglesSuppressFiles) {
    const std::string cfg = write_file(
        "run.json",
        small_config(",\n  \"reports\": {\"dot\": false, \"population\": false}"));
    ASSERT_EQ(run({"simulate", "--config", cfg}).code, 0);
    EXPECT_TRUE(fs::exists(fs::path(path("out")) / "metrics.json"));
    EXPECT_FALSE(fs::exists(fs::path(path("out")) / "graph.dot"));
    EXPECT_FALSE(fs::exists(fs::path(path("out")) / "population.txt"));
}

TEST_F(CliTest, InvalidPopulationShapeIsConfigError) {
    const std::string cfg =
        write_file("run.json", R"({"population": {"m": 0, "n_agents": 5, "n_files": 5}})");
    const CliResult r = run({"simulate", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("config error"), std::string::npos);
}

TEST_F(CliTest, UnknownConfigKeyIsRejected) {
    const std::string cfg = write_file("run.json", R"({"universe_size": 12})");
    const CliResult r = run({"simulate", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("universe_size"), std::string::npos);
}

TEST_F(CliTest, MalformedJsonReportsLineNumber) {
    const std::string cfg = write_file("run.json", "{\n  \"seed\": 1,\n  oops\n}\n");
    const CliResult r = run({"simulate", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingConfigFileIsConfigError) {
    const CliResult r = run({"simulate", "--config", path("nope.json")});
    EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, ConfigRoundTripsThroughSerialization) {
    RunConfig cfg;
    cfg.population.m = 20;
    cfg.population.n_agents = 11;
    cfg.population.n_files = 13;
    cfg.population.structure = StructureKind::clustered;
    cfg.population.k_clusters = 4;
    cfg.population.intra_boost = 12.5;
    cfg.engine.t_vote = 0.25;
    cfg.engine.edge_propagation = true;
    cfg.t_e = 0.2;
    cfg.seed = 31;
    cfg.out_dir = "somewhere";
    cfg.baseline_trials = 777;
    cfg.reports.dot = false;

    const std::string text = serialize_config(cfg);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(back.population.m, 20u);
    EXPECT_EQ(back.population.k_clusters, 4u);
    EXPECT_DOUBLE_EQ(back.engine.t_vote, 0.25);
    EXPECT_TRUE(back.engine.edge_propagation);
    EXPECT_DOUBLE_EQ(back.t_e, 0.2);
    EXPECT_EQ(back.seed, 31u);
    EXPECT_EQ(back.baseline_trials, 777u);
    EXPECT_FALSE(back.reports.dot);
}

TEST_F(CliTest, ExportGraphWritesGraphFilesOnly) {
    const std::string cfg = write_file("run.json", small_config());
    const CliResult r = run({"export-graph", "--config", cfg, "--out", path("g")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(fs::path(path("g")) / "edges.tsv"));
    EXPECT_TRUE(fs::exists(fs::path(path("g")) / "graph.dot"));
    EXPECT_FALSE(fs::exists(fs::path(path("g")) / "metrics.json"));
    EXPECT_NE(r.out.find("nodes:"), std::string::npos);
    EXPECT_NE(r.out.find("edges:"), std::string::npos);
    const std::string dot = read_file(path("g") + "/graph.dot");
    EXPECT_EQ(dot.substr(0, 13), "digraph kns {");
    // edge weights carry six decimals
    const std::string edges = read_file(path("g") + "/edges.tsv");
    if (!edges.empty()) {
        const std::string weight = edges.substr(edges.rfind('\t') + 1);
        EXPECT_EQ(weight.find('\n'), 8u) << weight;  // d.dddddd
        EXPECT_EQ(weight[1], '.');
    }
}

TEST_F(CliTest, OracleFindsPlantedPartition) {
    const std::string files = write_file("files.txt",
                                         "file,0,0,1,2\n"
                                         "file,1,0,1,3\n"
                                         "file,2,8,9,10\n"
                                         "file,3,8,9,11\n");
    const CliResult r = run({"oracle", "--files", files, "--max-clusters", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("files: 4"), std::string::npos);
    EXPECT_NE(r.out.find("partitions scanned: 15"), std::string::npos);
    EXPECT_NE(r.out.find("optimal blocks: 2"), std::string::npos);
    EXPECT_NE(r.out.find("optimal assignment: 0 0 1 1"), std::string::npos);
    EXPECT_NE(r.out.find("optimal msre: 0.500000000000"), std::string::npos);
}

TEST_F(CliTest, OracleScoresGivenPartition) {
    const std::string files = write_file("files.txt",
                                         "file,0,0,1\n"
                                         "file,1,0,1\n"
                                         "file,2,5,6\n");
    const CliResult r =
        run({"oracle", "--files", files, "--partition", "0,1,1", "--max-clusters", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("optimal msre: 0.000000000000"), std::string::npos);
    EXPECT_NE(r.out.find("given msre:"), std::string::npos);
    EXPECT_NE(r.out.find("optimal <= given: yes"), std::string::npos);
}

TEST_F(CliTest, OracleRejectsOversizedAndEmptyInputs) {
    std::string eleven;
    for (int i = 0; i < 11; ++i) eleven += "file," + std::to_string(i) + ",0\n";
    const std::string big = write_file("big.txt", eleven);
    EXPECT_EQ(run({"oracle", "--files", big}).code, 2);

    const std::string agents_only = write_file("agents.txt", "agent,0,1\n");
    EXPECT_EQ(run({"oracle", "--files", agents_only}).code, 2);

    const std::string bad_partition = write_file("one.txt", "file,0,1\n");
    EXPECT_EQ(run({"oracle", "--files", bad_partition, "--partition", "0,0"}).code, 2);
}

TEST_F(CliTest, OracleSingleFileIsTrivial) {
    const std::string one = write_file("one.txt", "file,0,3,4\n");
    const CliResult r = run({"oracle", "--files", one});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("partitions scanned: 1"), std::string::npos);
    EXPECT_NE(r.out.find("optimal msre: 0.000000000000"), std::string::npos);
}

TEST_F(CliTest, BaselinePrintsClosedFormAndMonteCarlo) {
    const CliResult r = run({"baseline", "--trials", "5000", "--seed", "3"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("closed form: 0.086877"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("monte carlo:"), std::string::npos);
    EXPECT_NE(r.out.find("trials 5000"), std::string::npos);
}

TEST_F(CliTest, BaselineZeroTrialsSkipsMonteCarlo) {
    const CliResult r = run({"baseline", "--trials", "0"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("closed form:"), std::string::npos);
    EXPECT_EQ(r.out.find("monte carlo:"), std::string::npos);
}

TEST_F(CliTest, BaselineRejectsInvalidDensities) {
    EXPECT_EQ(run({"baseline", "--p-file", "1.5"}).code, 2);
    EXPECT_EQ(run({"baseline", "--p-agent", "0"}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);                       // a subcommand is required
    EXPECT_EQ(run({"simulate"}).code, 2);             // --config is required
    EXPECT_EQ(run({"frobnicate"}).code, 2);           // unknown subcommand
    EXPECT_EQ(run({"baseline", "--bogus"}).code, 2);  // unknown flag
    const std::string cfg = write_file("run.json", small_config());
    EXPECT_EQ(run({"simulate", "--config", cfg, "--format", "xml"}).code, 2);
}

TEST_F(CliTest, HelpExitsZero) {
    const CliResult r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("simulate"), std::string::npos);
}
