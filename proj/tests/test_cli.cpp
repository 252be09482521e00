#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result cli(const std::string& args) {
    const auto log = fs::temp_directory_path() / ("flockwalk_cli_" + std::to_string(::getpid()) + ".log");
    const std::string cmd = std::string("\"") + FLOCKWALK_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("flockwalk_cli_" + name);
    fs::remove_all(d);
    return d;
}

const std::string kFixtures = FLOCKWALK_FIXTURES;

}  // namespace

TEST(Cli, ValidatePrintsGraphStats) {
    const auto r = cli("validate --graph " + kFixtures + "/small_city.graph");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("nodes 21"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("links 23"), std::string::npos);
    EXPECT_NE(r.out.find("degree min"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("validate --graph " + kFixtures + "/malformed.graph").code, 2);
    EXPECT_EQ(cli("validate --graph " + kFixtures + "/missing_node.graph").code, 2);
    EXPECT_EQ(cli("validate --graph /nonexistent/x.graph").code, 2);
    EXPECT_EQ(cli("validate").code, 1);
    EXPECT_EQ(cli("run --synthetic 'line 5' --steps 0").code, 1);
    EXPECT_EQ(cli("run --synthetic 'line 5' --beta -2").code, 1);
    EXPECT_EQ(cli("run --synthetic 'line 5' --alpha follow=0.5").code, 1);  // weights sum to 0.5
    EXPECT_EQ(cli("bogus").code, 1);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, RunWritesHeaderedMetricsAndIsReproducible) {
    const auto dir = fresh_dir("run");
    const std::string args = "run --config " + kFixtures + "/run.cfg --snapshot-stride 50 --out " + dir.string();
    const auto r = cli(args);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("seed = 3"), std::string::npos);
    EXPECT_NE(r.out.find("perturb 50 random"), std::string::npos);

    const auto first = slurp(dir / "metrics.csv");
    const auto rows = lines_of(first);
    ASSERT_EQ(rows.size(), 2u + 21u);  // comment, header, t = 0, 10, ..., 200
    EXPECT_EQ(rows[0], "# flockwalk 0.3.0 seed=3");
    EXPECT_EQ(rows[1], "t,rho,mu,sigma,groups,clusters,max_group,max_cluster_walkers");
    EXPECT_EQ(rows.back().substr(0, 4), "200,");
    EXPECT_EQ(lines_of(slurp(dir / "snapshots.csv")).size(), 1u + 5u);

    ASSERT_EQ(cli(args).code, 0);
    EXPECT_EQ(slurp(dir / "metrics.csv"), first);

    ASSERT_EQ(cli(args + " --seed 4").code, 0);
    EXPECT_NE(slurp(dir / "metrics.csv"), first);
    fs::remove_all(dir);
}

TEST(Cli, FlagsOverrideConfig) {
    const auto dir = fresh_dir("override");
    const auto r = cli("run --config " + kFixtures + "/run.cfg --steps 60 --set metrics_stride=5 --tactic best --out " +
                       dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("steps = 60"), std::string::npos);
    EXPECT_NE(r.out.find("alpha.alignment = 0.8"), std::string::npos);
    EXPECT_EQ(lines_of(slurp(dir / "metrics.csv")).size(), 2u + 13u);
    fs::remove_all(dir);
}

TEST(Cli, LineWritesSpaceTimeMatrix) {
    const auto dir = fresh_dir("line");
    const auto r = cli("line --nodes 30 --walkers 12 --steps 40 --tactic alignment --seed 2 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto rows = lines_of(slurp(dir / "spacetime.csv"));
    ASSERT_EQ(rows.size(), 1u + 41u);
    EXPECT_EQ(rows[0], "# flockwalk 0.3.0 seed=2");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int sum = 0, cols = 0;
        std::stringstream ss(rows[i]);
        for (std::string cell; std::getline(ss, cell, ',');) sum += std::stoi(cell), ++cols;
        EXPECT_EQ(cols, 30);
        EXPECT_EQ(sum, 12);
    }
    fs::remove_all(dir);
}

TEST(Cli, StrictSweepResumes) {
    const auto dir = fresh_dir("sweep");
    auto args = [&](int steps) {
        return "sweep --synthetic 'grid 5 5' --steps " + std::to_string(steps) +
               " --reps 3 --strict-only --threads 2 --out " + dir.string();
    };
    ASSERT_EQ(cli(args(20)).code, 0);
    const auto table = slurp(dir / "sweep.csv");
    const auto rows = lines_of(table);
    ASSERT_EQ(rows.size(), 2u + 5u);
    EXPECT_EQ(rows[1].substr(0, 13), "alpha_random,");
    ASSERT_EQ(cli(args(20)).code, 0);  // fully journaled: nothing recomputed
    EXPECT_EQ(slurp(dir / "sweep.csv"), table);
    const auto stale = cli(args(21));
    EXPECT_EQ(stale.code, 1);
    EXPECT_NE(stale.out.find("different sweep"), std::string::npos) << stale.out;
    ASSERT_EQ(cli(args(21) + " --fresh").code, 0);
    fs::remove_all(dir);
}

TEST(Cli, RobustnessAndBaselineFiles) {
    const auto dir = fresh_dir("robust");
    ASSERT_EQ(cli("robustness --synthetic 'grid 8 8' --steps 30 --perturb-t 10 --runs 2 --seed 5 --out " + dir.string()).code,
              0);
    for (const char* name : {"robustness_seed5.perturbed.csv", "robustness_seed5.control.csv",
                             "robustness_seed6.perturbed.csv", "robustness_seed6.control.csv"}) {
        const auto rows = lines_of(slurp(dir / name));
        ASSERT_EQ(rows.size(), 2u + 31u) << name;
        EXPECT_EQ(rows[0].substr(0, 17), "# flockwalk 0.3.0");
    }
    EXPECT_EQ(cli("robustness --synthetic 'grid 8 8' --steps 30 --perturb-t 30 --out " + dir.string()).code, 1);

    const auto r = cli("baseline --synthetic 'cycle 20' --walkers 5 --steps 50 --runs 3 --seed 1 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("seeds = 1 2 3"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "baseline_seed3.csv"));
    fs::remove_all(dir);
}

TEST(Cli, DiscretizeWritesLoadableCache) {
    const auto dir = fresh_dir("cache");
    ASSERT_EQ(cli("discretize --graph " + kFixtures + "/small_city.graph --delta 10 --out " + dir.string()).code, 0);
    const auto r = cli("validate --graph " + (dir / "graph.cache").string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("nodes 21"), std::string::npos) << r.out;
    fs::remove_all(dir);
}
