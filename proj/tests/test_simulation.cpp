#include <gtest/gtest.h>

#include "flockwalk/simulation.hpp"

using namespace flockwalk;

TEST(Run, StepsBoundaries) {
    const auto g = make_cycle(10);
    RunOptions opt;
    opt.walkers = 4;
    opt.steps = 0;
    EXPECT_THROW(run(g, TacticSpec::best(), opt), ConfigError);
    opt.steps = 1;
    const auto r = run(g, TacticSpec::best(), opt);
    ASSERT_EQ(r.series.size(), 2u);
    EXPECT_EQ(r.series[0].t, 0u);
    EXPECT_EQ(r.series[1].t, 1u);
}

TEST(Run, StrideAlwaysKeepsFinalStep) {
    const auto g = make_cycle(10);
    RunOptions opt;
    opt.walkers = 4;
    opt.steps = 25;
    opt.metrics_stride = 10;
    opt.snapshot_stride = 5;
    const auto r = run(g, Baseline{}, opt);
    std::vector<std::uint64_t> ts;
    for (const auto& m : r.series) ts.push_back(m.t);
    EXPECT_EQ(ts, (std::vector<std::uint64_t>{0, 10, 20, 25}));
    EXPECT_EQ(r.snapshots.size(), 6u);
    for (const auto& snap : r.snapshots) EXPECT_EQ(std::accumulate(snap.occupancy.begin(), snap.occupancy.end(), 0u), 4u);
}

TEST(Run, SameSeedIsBitIdentical) {
    const auto g = make_grid(9, 7);
    RunOptions opt;
    opt.walkers = 63;
    opt.steps = 120;
    opt.seed = 5;
    for (const Mode& mode : {Mode{TacticSpec::best()}, Mode{TacticSpec::best(1.5)}, Mode{Baseline{}}}) {
        const auto a = run(g, mode, opt), b = run(g, mode, opt);
        EXPECT_EQ(a.series, b.series);
    }
    auto other = opt;
    other.seed = 6;
    EXPECT_NE(run(g, TacticSpec::best(), opt).series, run(g, TacticSpec::best(), other).series);
}

TEST(Run, ScheduleValidation) {
    const auto g = make_cycle(10);
    RunOptions opt;
    opt.walkers = 3;
    opt.steps = 10;
    opt.schedule[10] = TacticSpec::strict(Criterion::Random);
    EXPECT_THROW(run(g, TacticSpec::best(), opt), ConfigError);
    opt.schedule.clear();
    TacticSpec bad;
    opt.schedule[2] = bad;
    EXPECT_THROW(run(g, TacticSpec::best(), opt), ConfigError);
}

TEST(Run, PerturbationOverridesOneStep) {
    const auto g = make_grid(20, 20);
    RunOptions opt;
    opt.walkers = 300;
    opt.steps = 60;
    opt.seed = 2;
    const auto tactic = TacticSpec::strict(Criterion::Alignment);
    const auto control = run(g, tactic, opt).series;
    opt.schedule[30] = TacticSpec::strict(Criterion::Random);

    std::vector<NodeId> at30, at31_perturbed;
    const auto perturbed = run(g, tactic, opt, [&](const SimState& s) {
        if (s.t == 30) at30 = s.curr;
        if (s.t == 31) at31_perturbed = s.curr;
    }).series;
    for (std::uint64_t t = 0; t <= 30; ++t) EXPECT_EQ(perturbed[t], control[t]);
    EXPECT_NE(perturbed[31], control[31]);
    ASSERT_EQ(at30.size(), at31_perturbed.size());
}

TEST(Run, FixedStartPositions) {
    const auto g = make_cycle(20);
    RunOptions opt;
    opt.steps = 5;
    opt.start = std::vector<NodeId>{0, 4, 8, 12, 16};
    const auto r = run(g, Baseline{}, opt);
    EXPECT_EQ(r.series[0].walkers, 5u);
    EXPECT_EQ(r.series[0].groups, 5u);
    EXPECT_EQ(r.series[0].clusters, 5u);
}

TEST(Run, IncrementalMobilityMatchesTrajectories) {
    const auto g = make_grid(6, 6);
    RunOptions opt;
    opt.walkers = 20;
    opt.steps = 80;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        opt.seed = seed;
        std::vector<std::vector<NodeId>> trajectory;
        const auto series = run(g, TacticSpec::best(), opt, [&](const SimState& s) { trajectory.push_back(s.curr); }).series;
        for (std::size_t t = 0; t < trajectory.size(); ++t) {
            double total = 0.0;
            for (std::size_t i = 0; i < opt.walkers; ++i) {
                std::set<NodeId> seen;
                for (std::size_t k = 0; k <= t; ++k) seen.insert(trajectory[k][i]);
                total += double(seen.size());
            }
            EXPECT_DOUBLE_EQ(series[t].mu(), total / double(opt.walkers));
        }
    }
}
