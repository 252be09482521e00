#pragma once

// Run configuration: a key-value text file, one setting per line.
//
//   graph = paris.graph          # raw edge list or discretized cache
//   synthetic = grid 50 50       # or: line 100 | cycle 20
//   delta = 10
//   walkers = per-node           # or a count
//   steps = 1000
//   beta = inf                   # inf: argmax mode
//   alpha.alignment = 0.8
//   alpha.follow = 0.1
//   alpha.attraction = 0.1
//   seed = 42
//   metrics_stride = 1
//   snapshot_stride = 0
//   perturb 100 random           # step 100 -> 101 uses strict random
//   out = results
//
// The '=' is optional. `tactic = <criterion>|best` and `mode = baseline` are
// accepted as shorthands.

#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flockwalk/engine.hpp"
#include "flockwalk/error.hpp"
#include "flockwalk/format.hpp"
#include "flockwalk/graph.hpp"
#include "flockwalk/graph_io.hpp"
#include "flockwalk/simulation.hpp"

namespace flockwalk {

struct RunConfig {
    std::optional<std::string> graph_path;
    std::optional<std::string> synthetic;
    double delta = kDefaultDelta;
    std::optional<std::size_t> walkers;  // empty: one per node
    std::uint64_t steps = 1000;
    TacticSpec tactic = TacticSpec::best();
    bool baseline = false;
    std::uint64_t seed = 0;
    std::uint64_t metrics_stride = 1;
    std::uint64_t snapshot_stride = 0;
    std::map<std::uint64_t, Criterion> perturb;
    std::string out = ".";

    Mode mode() const { return baseline ? Mode{Baseline{}} : Mode{tactic}; }

    RunOptions run_options(const DiscretizedGraph& g) const {
        RunOptions opt;
        opt.walkers = walkers.value_or(g.node_count());
        opt.steps = steps;
        opt.seed = seed;
        opt.metrics_stride = metrics_stride;
        opt.snapshot_stride = snapshot_stride;
        for (const auto& [t, c] : perturb) opt.schedule[t] = TacticSpec::strict(c);
        return opt;
    }
};

namespace detail {

template <class T>
T config_number(std::string_view key, std::string_view text) {
    const auto v = parse_number<T>(text);
    if (!v) throw ConfigError("bad value '" + std::string(text) + "' for " + std::string(key));
    return *v;
}

inline double parse_beta(std::string_view text) {
    if (text == "inf" || text == "argmax") return kArgmax;
    const double b = config_number<double>("beta", text);
    if (std::isnan(b) || b < 0.0) throw ConfigError("beta must be >= 0 or 'inf'");
    return b;
}

inline std::string join(const std::vector<std::string_view>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : " ") + std::string(p);
    return s;
}

}  // namespace detail

/// Named tactic: a criterion name (strict tactic) or "best".
inline TacticSpec named_tactic(std::string_view name, double beta = kArgmax) {
    if (name == "best") return TacticSpec::best(beta);
    if (auto c = parse_criterion(name)) return TacticSpec::strict(*c, beta);
    throw ConfigError("unknown tactic '" + std::string(name) + "'");
}

/// Applies one setting. `args` are the whitespace-separated value tokens.
inline void apply_setting(RunConfig& cfg, std::string_view key, const std::vector<std::string_view>& args) {
    auto single = [&]() -> std::string_view {
        if (args.size() != 1) throw ConfigError("'" + std::string(key) + "' takes one value");
        return args[0];
    };
    if (key == "graph") {
        cfg.graph_path = std::string(single());
    } else if (key == "synthetic") {
        if (args.empty()) throw ConfigError("'synthetic' needs a shape");
        cfg.synthetic = detail::join(args);
    } else if (key == "delta") {
        cfg.delta = detail::config_number<double>(key, single());
        if (!(cfg.delta > 0.0)) throw ConfigError("delta must be > 0");
    } else if (key == "walkers") {
        const auto v = single();
        if (v == "per-node") cfg.walkers.reset();
        else cfg.walkers = detail::config_number<std::size_t>(key, v);
        if (cfg.walkers && *cfg.walkers == 0) throw ConfigError("walkers must be >= 1");
    } else if (key == "steps") {
        cfg.steps = detail::config_number<std::uint64_t>(key, single());
    } else if (key == "beta") {
        cfg.tactic.beta = detail::parse_beta(single());
    } else if (key.starts_with("alpha.")) {
        const auto c = parse_criterion(key.substr(6));
        if (!c) throw ConfigError("unknown criterion in '" + std::string(key) + "'");
        cfg.tactic.weight(*c) = detail::config_number<double>(key, single());
    } else if (key == "tactic") {
        cfg.tactic = named_tactic(single(), cfg.tactic.beta);
        cfg.baseline = false;
    } else if (key == "mode") {
        const auto v = single();
        if (v != "tactic" && v != "baseline") throw ConfigError("mode must be 'tactic' or 'baseline'");
        cfg.baseline = v == "baseline";
    } else if (key == "seed") {
        cfg.seed = detail::config_number<std::uint64_t>(key, single());
    } else if (key == "metrics_stride") {
        cfg.metrics_stride = detail::config_number<std::uint64_t>(key, single());
    } else if (key == "snapshot_stride") {
        cfg.snapshot_stride = detail::config_number<std::uint64_t>(key, single());
    } else if (key == "perturb") {
        if (args.size() != 2) throw ConfigError("'perturb' takes <step> <criterion>");
        const auto c = parse_criterion(args[1]);
        if (!c) throw ConfigError("unknown criterion '" + std::string(args[1]) + "'");
        cfg.perturb[detail::config_number<std::uint64_t>(key, args[0])] = *c;
    } else if (key == "out") {
        cfg.out = std::string(single());
    } else {
        throw ConfigError("unknown setting '" + std::string(key) + "'");
    }
}

/// Parses "key = value..." / "key value..." lines. Alpha keys that are given
/// replace the whole weight vector (unset criteria become 0).
inline RunConfig parse_config(std::istream& in, RunConfig cfg = {}) {
    std::string line;
    std::size_t number = 0;
    bool alpha_seen = false;
    while (std::getline(in, line)) {
        ++number;
        auto tok = tokenize(line);
        if (tok.empty()) continue;
        std::string_view key = tok[0];
        std::vector<std::string_view> args(tok.begin() + 1, tok.end());
        // Accept "key=value" and "key = value".
        if (const auto eq = key.find('='); eq != std::string_view::npos) {
            if (eq + 1 < key.size()) args.insert(args.begin(), key.substr(eq + 1));
            key = key.substr(0, eq);
        } else if (!args.empty() && args[0] == "=") {
            args.erase(args.begin());
        } else if (!args.empty() && args[0].starts_with('=')) {
            args[0] = args[0].substr(1);
        }
        if (key.starts_with("alpha.") && !alpha_seen) {
            alpha_seen = true;
            cfg.tactic.alpha.fill(0.0);
        }
        try {
            apply_setting(cfg, key, args);
        } catch (const ConfigError& e) {
            throw ParseError(number, e.what());
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return parse_config(in, std::move(cfg));
}

/// Resolved configuration in the same key-value form (parses back to `cfg`).
inline std::string describe(const RunConfig& cfg) {
    std::ostringstream os;
    if (cfg.graph_path) os << "graph = " << *cfg.graph_path << '\n';
    if (cfg.synthetic) os << "synthetic = " << *cfg.synthetic << '\n';
    os << "delta = " << format_exact(cfg.delta) << '\n';
    os << "walkers = " << (cfg.walkers ? std::to_string(*cfg.walkers) : "per-node") << '\n';
    os << "steps = " << cfg.steps << '\n';
    os << "mode = " << (cfg.baseline ? "baseline" : "tactic") << '\n';
    os << "beta = " << (cfg.tactic.is_argmax() ? "inf" : format_exact(cfg.tactic.beta)) << '\n';
    for (Criterion c : kAllCriteria) os << "alpha." << to_string(c) << " = " << format_exact(cfg.tactic.weight(c)) << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "metrics_stride = " << cfg.metrics_stride << '\n';
    os << "snapshot_stride = " << cfg.snapshot_stride << '\n';
    for (const auto& [t, c] : cfg.perturb) os << "perturb " << t << ' ' << to_string(c) << '\n';
    os << "out = " << cfg.out << '\n';
    return os.str();
}

/// Builds a synthetic graph from "line N", "cycle N" or "grid W H".
inline DiscretizedGraph make_synthetic(std::string_view spec) {
    const auto tok = tokenize(spec);
    auto arg = [&](std::size_t i) { return detail::config_number<std::size_t>("synthetic", tok[i]); };
    if (tok.size() == 2 && tok[0] == "line") return make_line(arg(1));
    if (tok.size() == 2 && tok[0] == "cycle") return make_cycle(arg(1));
    if (tok.size() == 3 && tok[0] == "grid") return make_grid(arg(1), arg(2));
    throw ConfigError("synthetic graph must be 'line N', 'cycle N' or 'grid W H'");
}

inline DiscretizedGraph build_graph(const RunConfig& cfg) {
    if (cfg.synthetic && cfg.graph_path) throw ConfigError("set either 'graph' or 'synthetic', not both");
    if (cfg.synthetic) return make_synthetic(*cfg.synthetic);
    if (cfg.graph_path) return load_graph(*cfg.graph_path, cfg.delta);
    throw ConfigError("no graph: set 'graph' or 'synthetic'");
}

}  // namespace flockwalk
