#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <variant>
#include <vector>

#include "flockwalk/engine.hpp"
#include "flockwalk/metrics.hpp"

namespace flockwalk {

/// Collective-decision reference walk.
struct Baseline {
    bool operator==(const Baseline&) const = default;
};

using Mode = std::variant<TacticSpec, Baseline>;

struct RunOptions {
    std::size_t walkers = 1;
    std::uint64_t steps = 1;
    std::uint64_t seed = 0;
    /// Step t -> t+1 uses the mapped tactic instead of the run's mode.
    std::map<std::uint64_t, TacticSpec> schedule;
    std::uint64_t metrics_stride = 1;
    std::uint64_t snapshot_stride = 0;  // 0: no occupancy snapshots
    /// Fixed start nodes; overrides `walkers` and uniform placement.
    std::optional<std::vector<NodeId>> start;
};

struct Snapshot {
    std::uint64_t t = 0;
    std::vector<std::uint32_t> occupancy;
};

struct RunResult {
    MetricsSeries series;
    std::vector<Snapshot> snapshots;
};

/// Called with the state at t = 0 and after every step.
using StateObserver = std::function<void(const SimState&)>;

inline void validate(const RunOptions& opt) {
    if (opt.steps == 0) throw ConfigError("steps must be >= 1");
    if (opt.metrics_stride == 0) throw ConfigError("metrics stride must be >= 1");
    if (!opt.start && opt.walkers == 0) throw ConfigError("need at least one walker");
    for (const auto& [t, tactic] : opt.schedule) {
        if (t >= opt.steps)
            throw ConfigError("schedule step " + std::to_string(t) + " is outside [0, " + std::to_string(opt.steps) + ")");
        tactic.validate();
    }
}

/// Runs `steps` synchronous steps. Metrics are recorded at t = 0, every
/// metrics_stride steps, and always at t = steps.
inline RunResult run(const DiscretizedGraph& g, const Mode& mode, const RunOptions& opt,
                     const StateObserver& observer = {}) {
    validate(opt);
    if (const auto* tactic = std::get_if<TacticSpec>(&mode)) tactic->validate();

    SimState s = opt.start ? init_at(g, *opt.start, opt.seed) : init(g, opt.walkers, opt.seed);
    RunResult out;
    auto record = [&] {
        if (s.t % opt.metrics_stride == 0 || s.t == opt.steps) out.series.push_back(sample_metrics(g, s));
        if (opt.snapshot_stride != 0 && s.t % opt.snapshot_stride == 0) out.snapshots.push_back({s.t, s.occupancy});
        if (observer) observer(s);
    };

    record();
    while (s.t < opt.steps) {
        if (const auto it = opt.schedule.find(s.t); it != opt.schedule.end())
            step_tactic(g, s, it->second);
        else if (const auto* tactic = std::get_if<TacticSpec>(&mode))
            step_tactic(g, s, *tactic);
        else
            step_baseline(g, s);
        record();
    }
    return out;
}

/// One row per snapshot: t followed by the occupancy of every node.
inline void write_snapshots_csv(std::ostream& out, const std::vector<Snapshot>& snapshots) {
    for (const auto& snap : snapshots) {
        out << snap.t;
        for (auto n : snap.occupancy) out << ',' << n;
        out << '\n';
    }
}

}  // namespace flockwalk
