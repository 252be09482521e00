#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "flockwalk/experiments.hpp"

using namespace flockwalk;

namespace {

// Nested-loop count of integer compositions of `units` into `k` parts.
std::size_t count_compositions(int units, int k) {
    if (k == 1) return 1;
    std::size_t n = 0;
    for (int c = 0; c <= units; ++c) n += count_compositions(units - c, k - 1);
    return n;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("flockwalk_" + name);
    std::filesystem::remove(p);
    return p;
}

}  // namespace

TEST(Simplex, Counts) {
    EXPECT_EQ(enumerate_simplex(0.1, 5).size(), 1001u);
    EXPECT_EQ(count_compositions(10, 5), 1001u);
    EXPECT_EQ(enumerate_simplex(0.1, 5).size(), count_compositions(10, 5));
    EXPECT_EQ(enumerate_simplex(0.2, 4).size(), count_compositions(5, 4));
    EXPECT_EQ(enumerate_simplex(0.1, 1).size(), 1u);

    const auto halves = enumerate_simplex(0.5, 2);
    EXPECT_EQ(halves, (std::vector<std::vector<double>>{{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}}));
}

TEST(Simplex, EveryVectorIsValidAndUnique) {
    const auto all = enumerate_simplex(0.1, 5);
    std::set<std::vector<double>> unique(all.begin(), all.end());
    EXPECT_EQ(unique.size(), all.size());
    for (const auto& w : all) {
        double sum = 0.0;
        for (double x : w) {
            EXPECT_GE(x, 0.0);
            EXPECT_NEAR(x * 10.0, std::round(x * 10.0), 1e-12);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Simplex, BadStep) {
    EXPECT_THROW(enumerate_simplex(0.3, 5), ConfigError);
    EXPECT_THROW(enumerate_simplex(0.0, 5), ConfigError);
    EXPECT_THROW(enumerate_simplex(1.5, 5), ConfigError);
    EXPECT_THROW(enumerate_simplex(0.1, 0), ConfigError);
}

TEST(Sweep, StrictOnlyShape) {
    const auto g = make_grid(6, 6);
    auto plan = SweepPlan::strict_only();
    plan.steps = 30;
    const auto rows = run_sweep(g, plan, {.threads = 2});
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].rho.size(), 10u);
        EXPECT_EQ(rows[i].dominant(), to_string(kAllCriteria[i]));
        for (double r : rows[i].rho) EXPECT_GE(r, 1.0);
    }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    const auto g = make_cycle(15);
    SweepPlan plan;
    plan.grid_step = 0.5;
    plan.repetitions = 3;
    plan.steps = 20;
    plan.base_seed = 9;
    const auto a = run_sweep(g, plan, {.threads = 1});
    const auto b = run_sweep(g, plan, {.threads = 4});
    EXPECT_EQ(a.size(), 15u);
    EXPECT_EQ(a, b);
}

TEST(Sweep, RepetitionUsesSeedOffset) {
    const auto g = make_grid(5, 5);
    SweepPlan plan;
    plan.tactics = {TacticSpec::best()};
    plan.repetitions = 3;
    plan.steps = 40;
    plan.base_seed = 100;
    const auto row = run_sweep(g, plan).front();
    for (std::size_t r = 0; r < 3; ++r) {
        RunOptions opt;
        opt.walkers = g.node_count();
        opt.steps = 40;
        opt.seed = 100 + r;
        EXPECT_EQ(row.rho[r], run(g, TacticSpec::best(), opt).series.back().rho());
    }
}

TEST(Sweep, JournalResumesToSameTable) {
    const auto g = make_cycle(12);
    SweepPlan plan;
    plan.grid_step = 0.5;
    plan.repetitions = 2;
    plan.steps = 15;
    const auto reference = run_sweep(g, plan, {.threads = 1});

    const auto path = scratch("journal_test.journal");
    const auto full = run_sweep(g, plan, {.threads = 3, .journal = path});
    EXPECT_EQ(full, reference);

    // Keep the header and four records, then tear the fifth mid-line.
    std::ifstream in(path);
    std::string line, kept;
    for (int i = 0; i < 5 && std::getline(in, line); ++i) kept += line + '\n';
    std::getline(in, line);
    kept += line.substr(0, line.size() / 2);
    in.close();
    std::ofstream(path, std::ios::trunc) << kept;

    const auto resumed = run_sweep(g, plan, {.threads = 2, .journal = path});
    EXPECT_EQ(resumed, reference);

    std::ifstream again(path);
    std::size_t lines = 0;
    while (std::getline(again, line)) ++lines;
    EXPECT_EQ(lines, 1 + reference.size());

    auto other = plan;
    other.steps = 16;
    EXPECT_THROW(run_sweep(g, other, {.journal = path}), ConfigError);
    std::filesystem::remove(path);
}

TEST(Sweep, CsvHeader) {
    SweepRow row;
    row.tactic = TacticSpec::strict(Criterion::Follow);
    row.rho = {2.0, 4.0};
    row.mu = {1.0, 1.0};
    row.sigma = {3.0, 3.0};
    std::ostringstream os;
    write_sweep_csv(os, {row});
    EXPECT_EQ(os.str(),
              std::string(kSweepHeader) + "\n0,0,0,1,0,3,1,3,1.41421,0,follow\n");
}

TEST(Sweep, SampleStandardDeviation) {
    EXPECT_DOUBLE_EQ(SweepRow::sd({2, 4, 4, 4, 5, 5, 7, 9}), std::sqrt(32.0 / 7.0));
    EXPECT_EQ(SweepRow::sd({3.0}), 0.0);
}

TEST(Line, RowsConserveWalkers) {
    const auto d = run_line_diagram(100, 100, 50, TacticSpec::strict(Criterion::Alignment), 1);
    ASSERT_EQ(d.matrix.steps(), 51u);
    EXPECT_EQ(d.matrix.width(), 100u);
    for (const auto& row : d.matrix.rows) EXPECT_EQ(std::accumulate(row.begin(), row.end(), 0u), 100u);
}

TEST(Line, TwoNodesAlternate) {
    const auto d = run_line_diagram(2, 1, 6, TacticSpec::strict(Criterion::Random), 4);
    for (std::size_t t = 1; t < d.matrix.steps(); ++t) EXPECT_NE(d.matrix.rows[t], d.matrix.rows[t - 1]);
    std::ostringstream os;
    write_spacetime_csv(os, {{{1, 0}, {0, 1}}});
    EXPECT_EQ(os.str(), "1,0\n0,1\n");
}

TEST(Robustness, ControlIsPlainRunAndPairsAgreeBeforePerturbation) {
    const auto g = make_grid(12, 12);
    const auto pairs = run_robustness(g, TacticSpec::best(), 20, 40, 100, {3, 4}, 2);
    ASSERT_EQ(pairs.size(), 2u);
    for (const auto& p : pairs) {
        RunOptions opt;
        opt.walkers = 100;
        opt.steps = 40;
        opt.seed = p.seed;
        EXPECT_EQ(p.control, run(g, TacticSpec::best(), opt).series);
        for (std::size_t t = 0; t <= 20; ++t) EXPECT_EQ(p.perturbed[t], p.control[t]);
    }
    EXPECT_THROW(run_robustness(g, TacticSpec::best(), 40, 40, 10, {1}), ConfigError);
}

TEST(Baseline, OddCycleCoalesces) {
    // On an even cycle groups at odd distance keep their parity and never meet.
    const auto g = make_cycle(21);
    const auto ref = run_baseline_reference(g, 21, 4000, {1, 2, 3}, 3);
    for (const auto& series : ref.runs) {
        for (std::size_t t = 1; t < series.size(); ++t) EXPECT_LE(series[t].groups, series[t - 1].groups);
        EXPECT_EQ(series.back().groups, 1u);
        EXPECT_EQ(series.back().rho(), 21.0);
    }
    EXPECT_EQ(ref.rho(), 21.0);
    EXPECT_EQ(ref.sigma(), 1.0);
}

TEST(Baseline, EvenCycleKeepsParityClasses) {
    const auto g = make_cycle(20);
    RunOptions opt;
    opt.steps = 2000;
    opt.start = std::vector<NodeId>{0, 3};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        opt.seed = seed;
        EXPECT_EQ(run(g, Baseline{}, opt).series.back().groups, 2u);
    }
}

TEST(Baseline, SingleWalker) {
    const auto g = make_grid(4, 4);
    const auto ref = run_baseline_reference(g, 1, 100, {7});
    for (const auto& m : ref.runs[0]) {
        EXPECT_EQ(m.rho(), 1.0);
        EXPECT_EQ(m.sigma(), 1.0);
    }
}

TEST(ParallelFor, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(50, 4, [](std::size_t i) {
                     if (i == 17) throw ConfigError("boom");
                 }),
                 ConfigError);
    std::vector<int> hits(100, 0);
    parallel_for(100, 3, [&](std::size_t i) { hits[i]++; });
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
