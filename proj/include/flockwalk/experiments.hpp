#pragma once

// Experiment protocols: the tactic-simplex sweep, line space-time diagrams,
// the break-up robustness protocol and baseline reference runs.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flockwalk/engine.hpp"
#include "flockwalk/error.hpp"
#include "flockwalk/format.hpp"
#include "flockwalk/graph.hpp"
#include "flockwalk/metrics.hpp"
#include "flockwalk/simulation.hpp"

namespace flockwalk {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0: hardware
/// concurrency). The first exception thrown by any task is rethrown.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = count;
                    }
                }
            });
    }
    if (error) std::rethrow_exception(error);
}

/// All weight vectors over k bins whose entries are multiples of `step` and
/// sum to 1, in ascending lexicographic order of the unit counts.
inline std::vector<std::vector<double>> enumerate_simplex(double step, std::size_t k) {
    if (k == 0) throw ConfigError("simplex needs at least one criterion");
    if (!(step > 0.0) || step > 1.0) throw ConfigError("grid step must lie in (0, 1]");
    const double inv = 1.0 / step;
    const auto units = static_cast<std::size_t>(std::llround(inv));
    if (units == 0 || std::abs(static_cast<double>(units) * step - 1.0) > 1e-9)
        throw ConfigError("1/step must be an integer");

    std::vector<std::vector<double>> out;
    std::vector<std::size_t> counts(k, 0);
    // counts[0..i) fixed, `left` units still to place into bins i..k-1.
    auto fill = [&](auto&& self, std::size_t i, std::size_t left) -> void {
        if (i + 1 == k) {
            counts[i] = left;
            std::vector<double> w(k);
            for (std::size_t j = 0; j < k; ++j) w[j] = static_cast<double>(counts[j]) / static_cast<double>(units);
            out.push_back(std::move(w));
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[i] = c;
            self(self, i + 1, left - c);
        }
    };
    fill(fill, 0, units);
    return out;
}

struct SweepPlan {
    double grid_step = 0.1;
    std::vector<Criterion> criteria{kAllCriteria.begin(), kAllCriteria.end()};
    std::size_t repetitions = 10;
    std::uint64_t steps = 1000;
    std::uint64_t base_seed = 0;
    double beta = kArgmax;
    std::size_t walkers = 0;             // 0: one walker per node
    std::vector<TacticSpec> tactics;     // explicit list; empty: enumerate the simplex

    std::vector<TacticSpec> resolved_tactics() const {
        if (!tactics.empty()) return tactics;
        std::vector<TacticSpec> out;
        for (const auto& w : enumerate_simplex(grid_step, criteria.size())) {
            TacticSpec t;
            t.beta = beta;
            for (std::size_t j = 0; j < criteria.size(); ++j) t.weight(criteria[j]) = w[j];
            out.push_back(t);
        }
        return out;
    }

    /// Plan restricted to the five strict tactics.
    static SweepPlan strict_only() {
        SweepPlan p;
        for (Criterion c : kAllCriteria) p.tactics.push_back(TacticSpec::strict(c));
        return p;
    }
};

struct SweepRow {
    TacticSpec tactic;
    std::vector<double> rho;    // final-step score of each repetition
    std::vector<double> mu;
    std::vector<double> sigma;

    static double mean(const std::vector<double>& xs) {
        double s = 0.0;
        for (double x : xs) s += x;
        return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
    }
    /// Sample standard deviation (n - 1); 0 for a single repetition.
    static double sd(const std::vector<double>& xs) {
        if (xs.size() < 2) return 0.0;
        const double m = mean(xs);
        double ss = 0.0;
        for (double x : xs) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }

    double rho_mean() const { return mean(rho); }
    double mu_mean() const { return mean(mu); }
    double sigma_mean() const { return mean(sigma); }
    double rho_sd() const { return sd(rho); }
    double mu_sd() const { return sd(mu); }

    /// Criterion weighted above 0.5, or "mixed".
    std::string dominant() const {
        for (Criterion c : kAllCriteria)
            if (tactic.weight(c) > 0.5) return std::string(to_string(c));
        return "mixed";
    }

    bool operator==(const SweepRow&) const = default;
};

struct SweepOptions {
    std::size_t threads = 0;
    std::optional<std::filesystem::path> journal;
};

namespace detail {

inline std::string sweep_fingerprint(const DiscretizedGraph& g, const SweepPlan& plan,
                                     const std::vector<TacticSpec>& tactics) {
    std::ostringstream os;
    os << "nodes=" << g.node_count() << " links=" << g.link_count() << " steps=" << plan.steps
       << " reps=" << plan.repetitions << " seed=" << plan.base_seed << " walkers=" << plan.walkers
       << " tactics=" << tactics.size();
    // Tactic weights and beta enter through a cheap order-sensitive hash.
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& t : tactics) {
        for (double a : t.alpha) h = (h ^ std::hash<std::string>{}(format_exact(a))) * 1099511628211ULL;
        h = (h ^ std::hash<std::string>{}(format_exact(t.beta))) * 1099511628211ULL;
    }
    os << " hash=" << h;
    return os.str();
}

inline std::string journal_record(std::size_t index, const SweepRow& row) {
    std::string line = "tactic " + std::to_string(index);
    for (const auto* xs : {&row.rho, &row.mu, &row.sigma})
        for (double x : *xs) line += ' ' + format_exact(x);
    line += '\n';
    return line;
}

/// Reads completed records, truncating a torn trailing line. Returns the
/// number of records restored.
inline std::size_t restore_journal(const std::filesystem::path& path, const std::string& header, std::size_t reps,
                                   std::vector<SweepRow>& rows, std::vector<char>& done) {
    if (!std::filesystem::exists(path) || std::filesystem::file_size(path) == 0) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("cannot create journal '" + path.string() + "'");
        out << header << '\n';
        return 0;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read journal '" + path.string() + "'");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    const auto complete = content.rfind('\n');
    const std::size_t keep = complete == std::string::npos ? 0 : complete + 1;
    std::istringstream lines(content.substr(0, keep));
    std::string line;
    if (!std::getline(lines, line) || line != header)
        throw ConfigError("journal '" + path.string() + "' belongs to a different sweep");

    std::size_t restored = 0;
    while (std::getline(lines, line)) {
        const auto tok = tokenize(line);
        if (tok.size() != 2 + 3 * reps || tok[0] != "tactic") throw ConfigError("corrupt journal record: " + line);
        const auto index = parse_number<std::size_t>(tok[1]);
        if (!index || *index >= rows.size()) throw ConfigError("journal record out of range: " + line);
        auto& row = rows[*index];
        std::vector<double>* targets[] = {&row.rho, &row.mu, &row.sigma};
        for (std::size_t k = 0; k < 3; ++k) {
            targets[k]->clear();
            for (std::size_t r = 0; r < reps; ++r) {
                const auto v = parse_number<double>(tok[2 + k * reps + r]);
                if (!v) throw ConfigError("corrupt journal value: " + line);
                targets[k]->push_back(*v);
            }
        }
        if (!done[*index]) ++restored;
        done[*index] = 1;
    }
    if (keep != content.size()) std::filesystem::resize_file(path, keep);
    return restored;
}

}  // namespace detail

/// Final-step gathering, mobility and sprawling of every tactic, each averaged
/// over `repetitions` runs seeded base_seed + repetition index. With a journal,
/// each finished tactic is appended as one line and already-journaled tactics
/// are skipped, so an interrupted sweep resumes to the same table.
inline std::vector<SweepRow> run_sweep(const DiscretizedGraph& g, const SweepPlan& plan,
                                       const SweepOptions& options = {}) {
    if (plan.repetitions == 0) throw ConfigError("repetitions must be >= 1");
    if (plan.steps == 0) throw ConfigError("steps must be >= 1");
    const auto tactics = plan.resolved_tactics();
    for (const auto& t : tactics) t.validate();

    std::vector<SweepRow> rows(tactics.size());
    std::vector<char> done(tactics.size(), 0);
    for (std::size_t i = 0; i < tactics.size(); ++i) rows[i].tactic = tactics[i];

    std::ofstream journal;
    std::mutex journal_mutex;
    if (options.journal) {
        detail::restore_journal(*options.journal, "# flockwalk-sweep-journal " + detail::sweep_fingerprint(g, plan, tactics),
                                plan.repetitions, rows, done);
        journal.open(*options.journal, std::ios::app | std::ios::binary);
        if (!journal) throw IoError("cannot append to journal '" + options.journal->string() + "'");
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < tactics.size(); ++i)
        if (!done[i]) pending.push_back(i);

    const std::size_t walkers = plan.walkers == 0 ? g.node_count() : plan.walkers;
    parallel_for(pending.size(), options.threads, [&](std::size_t p) {
        const std::size_t index = pending[p];
        SweepRow& row = rows[index];
        row.rho.clear();
        row.mu.clear();
        row.sigma.clear();
        for (std::size_t r = 0; r < plan.repetitions; ++r) {
            RunOptions opt;
            opt.walkers = walkers;
            opt.steps = plan.steps;
            opt.seed = plan.base_seed + r;
            opt.metrics_stride = plan.steps;
            const auto last = run(g, row.tactic, opt).series.back();
            row.rho.push_back(last.rho());
            row.mu.push_back(last.mu());
            row.sigma.push_back(last.sigma());
        }
        if (journal.is_open()) {
            const auto record = detail::journal_record(index, row);
            std::lock_guard lock(journal_mutex);
            journal.write(record.data(), static_cast<std::streamsize>(record.size()));
            journal.flush();
            if (!journal) throw IoError("journal write failed");
        }
    });
    return rows;
}

inline constexpr const char* kSweepHeader =
    "alpha_random,alpha_propulsion,alpha_attraction,alpha_follow,alpha_alignment,"
    "rho_mean,mu_mean,sigma_mean,rho_sd,mu_sd,dominant";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        for (double a : r.tactic.alpha) out << format_score(a) << ',';
        out << format_score(r.rho_mean()) << ',' << format_score(r.mu_mean()) << ',' << format_score(r.sigma_mean())
            << ',' << format_score(r.rho_sd()) << ',' << format_score(r.mu_sd()) << ',' << r.dominant() << '\n';
    }
}

/// Occupancy of every line node (columns) at every step (rows), raw counts.
struct SpaceTimeMatrix {
    std::vector<std::vector<std::uint32_t>> rows;

    std::size_t steps() const { return rows.size(); }
    std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
};

inline void write_spacetime_csv(std::ostream& out, const SpaceTimeMatrix& m) {
    for (const auto& row : m.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

struct LineDiagram {
    SpaceTimeMatrix matrix;  // rows t = 0..steps
    MetricsSeries series;
};

/// `walkers` walkers placed uniformly at random on make_line(nodes).
inline LineDiagram run_line_diagram(std::size_t nodes, std::size_t walkers, std::uint64_t steps, const Mode& mode,
                                    std::uint64_t seed) {
    const auto g = make_line(nodes);
    RunOptions opt;
    opt.walkers = walkers;
    opt.steps = steps;
    opt.seed = seed;
    opt.snapshot_stride = 1;
    auto result = run(g, mode, opt);
    LineDiagram d;
    for (auto& snap : result.snapshots) d.matrix.rows.push_back(std::move(snap.occupancy));
    d.series = std::move(result.series);
    return d;
}

struct RobustnessPair {
    std::uint64_t seed = 0;
    MetricsSeries perturbed;
    MetricsSeries control;
};

/// Runs `tactic` with one strict Random step at perturb_t -> perturb_t+1, and
/// the same run without it, for every seed.
inline std::vector<RobustnessPair> run_robustness(const DiscretizedGraph& g, const TacticSpec& tactic,
                                                  std::uint64_t perturb_t, std::uint64_t steps, std::size_t walkers,
                                                  const std::vector<std::uint64_t>& seeds, std::size_t threads = 0) {
    if (perturb_t >= steps) throw ConfigError("perturbation step must precede the last step");
    std::vector<RobustnessPair> out(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        RunOptions opt;
        opt.walkers = walkers;
        opt.steps = steps;
        opt.seed = seeds[i];
        out[i].seed = seeds[i];
        out[i].control = run(g, tactic, opt).series;
        opt.schedule[perturb_t] = TacticSpec::strict(Criterion::Random);
        out[i].perturbed = run(g, tactic, opt).series;
    });
    return out;
}

struct BaselineReference {
    std::vector<std::uint64_t> seeds;
    std::vector<MetricsSeries> runs;

    double final_mean(double (MetricsSample::*score)() const) const {
        double s = 0.0;
        for (const auto& r : runs) s += (r.back().*score)();
        return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
    }
    double rho() const { return final_mean(&MetricsSample::rho); }
    double mu() const { return final_mean(&MetricsSample::mu); }
    double sigma() const { return final_mean(&MetricsSample::sigma); }
};

inline BaselineReference run_baseline_reference(const DiscretizedGraph& g, std::size_t walkers, std::uint64_t steps,
                                                const std::vector<std::uint64_t>& seeds, std::size_t threads = 0,
                                                std::uint64_t metrics_stride = 1) {
    BaselineReference ref;
    ref.seeds = seeds;
    ref.runs.resize(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        RunOptions opt;
        opt.walkers = walkers;
        opt.steps = steps;
        opt.seed = seeds[i];
        opt.metrics_stride = metrics_stride;
        ref.runs[i] = run(g, Baseline{}, opt).series;
    });
    return ref;
}

}  // namespace flockwalk
