// flockwalk command-line driver.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "flockwalk/flockwalk.hpp"

namespace fs = std::filesystem;
using namespace flockwalk;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> graph, synthetic, delta, walkers, steps, beta, tactic, mode, seed, metrics_stride,
        snapshot_stride, out;
    std::vector<std::string> alpha;    // criterion=weight
    std::vector<std::string> perturb;  // t:criterion
    std::vector<std::string> set;      // key=value
    std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "run configuration file");
    cmd->add_option("--graph", o.graph, "raw street network or discretized cache");
    cmd->add_option("--synthetic", o.synthetic, "'line N', 'cycle N' or 'grid W H'");
    cmd->add_option("--delta", o.delta, "discretization step in metres");
    cmd->add_option("--walkers", o.walkers, "walker count or 'per-node'");
    cmd->add_option("--steps", o.steps);
    cmd->add_option("--tactic", o.tactic, "criterion name or 'best'");
    cmd->add_option("--alpha", o.alpha, "criterion=weight (repeatable; unset criteria become 0)");
    cmd->add_option("--beta", o.beta, "logit intensity or 'inf'");
    cmd->add_option("--mode", o.mode, "'tactic' or 'baseline'");
    cmd->add_option("--seed", o.seed);
    cmd->add_option("--metrics-stride", o.metrics_stride);
    cmd->add_option("--snapshot-stride", o.snapshot_stride);
    cmd->add_option("--perturb", o.perturb, "t:criterion, strict criterion for step t -> t+1 (repeatable)");
    cmd->add_option("-o,--out", o.out, "output directory");
    cmd->add_option("--set", o.set, "key=value, any config setting (repeatable)");
    cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
}

std::pair<std::string, std::string> split(const std::string& text, char sep) {
    const auto at = text.find(sep);
    if (at == std::string::npos || at == 0) throw ConfigError("expected key" + std::string(1, sep) + "value, got '" + text + "'");
    return {text.substr(0, at), text.substr(at + 1)};
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (!o.config.empty()) {
        try {
            cfg = load_config(o.config);
        } catch (const ParseError& e) {
            throw ConfigError(o.config + ":" + std::to_string(e.line()) + ": " + e.what());
        }
    }
    auto apply = [&](std::string_view key, std::string_view value) { apply_setting(cfg, key, tokenize(value)); };
    if (o.graph) apply("graph", *o.graph);
    if (o.synthetic) apply("synthetic", *o.synthetic);
    if (o.delta) apply("delta", *o.delta);
    if (o.walkers) apply("walkers", *o.walkers);
    if (o.steps) apply("steps", *o.steps);
    if (o.tactic) apply("tactic", *o.tactic);
    if (!o.alpha.empty()) cfg.tactic.alpha.fill(0.0);
    for (const auto& a : o.alpha) {
        const auto [c, w] = split(a, '=');
        apply("alpha." + c, w);
    }
    if (o.beta) apply("beta", *o.beta);
    if (o.mode) apply("mode", *o.mode);
    if (o.seed) apply("seed", *o.seed);
    if (o.metrics_stride) apply("metrics_stride", *o.metrics_stride);
    if (o.snapshot_stride) apply("snapshot_stride", *o.snapshot_stride);
    for (const auto& p : o.perturb) {
        const auto [t, c] = split(p, ':');
        apply_setting(cfg, "perturb", {t, c});
    }
    if (o.out) apply("out", *o.out);
    for (const auto& s : o.set) {
        const auto [k, v] = split(s, '=');
        apply(k, v);
    }
    return cfg;
}

void print_config(const RunConfig& cfg) {
    std::cout << "# resolved configuration\n" << describe(cfg);
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name, std::uint64_t seed) {
    fs::create_directories(cfg.out);
    const auto path = fs::path(cfg.out) / name;
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "# flockwalk " << kVersion << " seed=" << seed << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return out;
}

void close_output(std::ofstream& out) {
    out.close();
    if (!out) throw IoError("write failed");
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = base + i;
    return seeds;
}

void print_seeds(const std::vector<std::uint64_t>& seeds) {
    std::cout << "seeds =";
    for (auto s : seeds) std::cout << ' ' << s;
    std::cout << '\n';
}

void print_graph(const DiscretizedGraph& g) {
    const auto d = degree_stats(g);
    const auto& r = g.report();
    std::cout << "nodes " << g.node_count() << "\nlinks " << g.link_count() << "\ndegree min " << d.min << " max "
              << d.max << " mean " << format_score(d.mean) << "\ndegree histogram";
    for (std::size_t k = 0; k < d.histogram.size(); ++k)
        if (d.histogram[k]) std::cout << ' ' << k << ':' << d.histogram[k];
    std::cout << "\ndelta " << format_exact(g.delta()) << "\nself_loops " << r.self_loops << "\nduplicate_edges "
              << r.duplicate_edges << "\ndropped_nodes " << r.dropped_nodes << "\ndropped_edges " << r.dropped_edges
              << '\n';
}

int cmd_validate(const Overrides& o) {
    const auto cfg = resolve(o);
    print_graph(build_graph(cfg));
    return 0;
}

int cmd_discretize(const Overrides& o, const std::string& cache_name) {
    const auto cfg = resolve(o);
    if (!cfg.graph_path) throw ConfigError("discretize needs --graph");
    const auto g = build_graph(cfg);
    print_graph(g);
    fs::create_directories(cfg.out);
    const auto path = fs::path(cfg.out) / cache_name;
    save_cache(path.string(), g);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_run(const Overrides& o) {
    const auto cfg = resolve(o);
    print_config(cfg);
    const auto g = build_graph(cfg);
    const auto result = run(g, cfg.mode(), cfg.run_options(g));
    auto metrics = open_output(cfg, "metrics.csv", cfg.seed);
    write_metrics_csv(metrics, result.series);
    close_output(metrics);
    if (cfg.snapshot_stride > 0) {
        auto snaps = open_output(cfg, "snapshots.csv", cfg.seed);
        write_snapshots_csv(snaps, result.snapshots);
        close_output(snaps);
    }
    const auto& last = result.series.back();
    std::cout << "final t=" << last.t << " rho=" << format_score(last.rho()) << " mu=" << format_score(last.mu())
              << " sigma=" << format_score(last.sigma()) << '\n';
    return 0;
}

int cmd_line(const Overrides& o, std::size_t nodes) {
    auto cfg = resolve(o);
    cfg.synthetic = "line " + std::to_string(nodes);
    cfg.graph_path.reset();
    print_config(cfg);
    const auto d = run_line_diagram(nodes, cfg.walkers.value_or(nodes), cfg.steps, cfg.mode(), cfg.seed);
    auto matrix = open_output(cfg, "spacetime.csv", cfg.seed);
    write_spacetime_csv(matrix, d.matrix);
    close_output(matrix);
    auto metrics = open_output(cfg, "metrics.csv", cfg.seed);
    write_metrics_csv(metrics, d.series);
    close_output(metrics);
    std::uint64_t largest = 0;
    for (const auto& m : d.series) largest = std::max(largest, m.max_group);
    std::cout << "final largest cluster " << d.series.back().max_cluster_walkers << ", max group over run " << largest
              << '\n';
    return 0;
}

int cmd_sweep(const Overrides& o, double grid_step, std::size_t reps, bool strict_only, bool fresh) {
    const auto cfg = resolve(o);
    print_config(cfg);
    const auto g = build_graph(cfg);
    SweepPlan plan = strict_only ? SweepPlan::strict_only() : SweepPlan{};
    plan.grid_step = grid_step;
    plan.repetitions = reps;
    plan.steps = cfg.steps;
    plan.base_seed = cfg.seed;
    plan.beta = cfg.tactic.beta;
    plan.walkers = cfg.walkers.value_or(0);
    for (auto& t : plan.tactics) t.beta = cfg.tactic.beta;
    std::cout << "tactics " << plan.resolved_tactics().size() << ", seeds " << plan.base_seed << ".."
              << plan.base_seed + reps - 1 << '\n';

    fs::create_directories(cfg.out);
    const auto journal = fs::path(cfg.out) / "sweep.journal";
    if (fresh) fs::remove(journal);
    const auto rows = run_sweep(g, plan, {.threads = o.threads, .journal = journal});
    auto out = open_output(cfg, "sweep.csv", cfg.seed);
    write_sweep_csv(out, rows);
    close_output(out);
    return 0;
}

int cmd_robustness(const Overrides& o, std::uint64_t perturb_t, std::size_t runs) {
    const auto cfg = resolve(o);
    if (cfg.baseline) throw ConfigError("robustness needs a tactic, not baseline mode");
    print_config(cfg);
    const auto g = build_graph(cfg);
    const auto seeds = seed_range(cfg.seed, runs);
    print_seeds(seeds);
    const auto pairs = run_robustness(g, cfg.tactic, perturb_t, cfg.steps, cfg.walkers.value_or(g.node_count()), seeds,
                                      o.threads);
    for (const auto& p : pairs) {
        const auto stem = "robustness_seed" + std::to_string(p.seed);
        auto pert = open_output(cfg, stem + ".perturbed.csv", p.seed);
        write_metrics_csv(pert, p.perturbed);
        close_output(pert);
        auto ctrl = open_output(cfg, stem + ".control.csv", p.seed);
        write_metrics_csv(ctrl, p.control);
        close_output(ctrl);
    }
    return 0;
}

int cmd_baseline(const Overrides& o, std::size_t runs) {
    auto cfg = resolve(o);
    cfg.baseline = true;
    print_config(cfg);
    const auto g = build_graph(cfg);
    const auto seeds = seed_range(cfg.seed, runs);
    print_seeds(seeds);
    const auto ref = run_baseline_reference(g, cfg.walkers.value_or(g.node_count()), cfg.steps, seeds, o.threads,
                                            cfg.metrics_stride);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        auto out = open_output(cfg, "baseline_seed" + std::to_string(seeds[i]) + ".csv", seeds[i]);
        write_metrics_csv(out, ref.runs[i]);
        close_output(out);
    }
    std::cout << "reference rho=" << format_score(ref.rho()) << " mu=" << format_score(ref.mu())
              << " sigma=" << format_score(ref.sigma()) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flockwalk: biased random walkers on street networks"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Overrides o;
    auto* validate = app.add_subcommand("validate", "load a graph and print its statistics");
    auto* discretize = app.add_subcommand("discretize", "discretize a raw network into a cache file");
    auto* run = app.add_subcommand("run", "single simulation, metrics per recorded step");
    auto* line = app.add_subcommand("line", "space-time diagram on a line graph");
    auto* sweep = app.add_subcommand("sweep", "sweep the tactic simplex");
    auto* robustness = app.add_subcommand("robustness", "one-step random perturbation vs control");
    auto* baseline = app.add_subcommand("baseline", "baseline reference runs");
    for (auto* cmd : {validate, discretize, run, line, sweep, robustness, baseline}) add_common(cmd, o);

    std::string cache_name = "graph.cache";
    discretize->add_option("--cache", cache_name, "cache file name inside --out");
    std::size_t nodes = 100;
    line->add_option("--nodes", nodes);
    double grid_step = 0.1;
    std::size_t reps = 10;
    bool strict_only = false, fresh = false;
    sweep->add_option("--grid-step", grid_step);
    sweep->add_option("--reps", reps);
    sweep->add_flag("--strict-only", strict_only, "only the five strict tactics");
    sweep->add_flag("--fresh", fresh, "discard an existing journal");
    std::uint64_t perturb_t = 100;
    std::size_t runs = 10;
    robustness->add_option("--perturb-t", perturb_t);
    robustness->add_option("--runs", runs, "seeds seed .. seed+runs-1");
    baseline->add_option("--runs", runs, "seeds seed .. seed+runs-1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*discretize) return cmd_discretize(o, cache_name);
        if (*run) return cmd_run(o);
        if (*line) return cmd_line(o, nodes);
        if (*sweep) return cmd_sweep(o, grid_step, reps, strict_only, fresh);
        if (*robustness) return cmd_robustness(o, perturb_t, runs);
        if (*baseline) return cmd_baseline(o, runs);
    } catch (const ParseError& e) {
        std::cerr << "error: line " << e.line() << ": " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const ReferenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}
