#pragma once

// Walker state and the synchronous step rules: tactics built from the five
// movement criteria via the logit rule, and the collective-decision baseline.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flockwalk/error.hpp"
#include "flockwalk/graph.hpp"
#include "flockwalk/rng.hpp"
#include "flockwalk/visited_set.hpp"

namespace flockwalk {

enum class Criterion : std::uint8_t { Random, Propulsion, Attraction, Follow, Alignment };

inline constexpr std::size_t kCriterionCount = 5;
inline constexpr std::array<Criterion, kCriterionCount> kAllCriteria = {
    Criterion::Random, Criterion::Propulsion, Criterion::Attraction, Criterion::Follow, Criterion::Alignment};

inline std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::Random: return "random";
        case Criterion::Propulsion: return "propulsion";
        case Criterion::Attraction: return "attraction";
        case Criterion::Follow: return "follow";
        case Criterion::Alignment: return "alignment";
    }
    return "?";
}

inline std::optional<Criterion> parse_criterion(std::string_view name) {
    for (Criterion c : kAllCriteria)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

/// beta value meaning "beta -> infinity": uniform choice among the maximizers.
inline constexpr double kArgmax = std::numeric_limits<double>::infinity();

struct TacticSpec {
    std::array<double, kCriterionCount> alpha{};  // indexed by Criterion
    double beta = kArgmax;

    static TacticSpec strict(Criterion c, double beta = kArgmax) {
        TacticSpec t;
        t.alpha[static_cast<std::size_t>(c)] = 1.0;
        t.beta = beta;
        return t;
    }

    /// Follow 0.1, Alignment 0.8, Attraction 0.1.
    static TacticSpec best(double beta = kArgmax) {
        TacticSpec t;
        t.weight(Criterion::Follow) = 0.1;
        t.weight(Criterion::Alignment) = 0.8;
        t.weight(Criterion::Attraction) = 0.1;
        t.beta = beta;
        return t;
    }

    double& weight(Criterion c) { return alpha[static_cast<std::size_t>(c)]; }
    double weight(Criterion c) const { return alpha[static_cast<std::size_t>(c)]; }
    bool is_argmax() const { return std::isinf(beta); }

    /// The single criterion carrying all the weight, if any.
    std::optional<Criterion> strict_criterion() const {
        for (Criterion c : kAllCriteria)
            if (weight(c) == 1.0) return c;
        return std::nullopt;
    }

    void validate() const {
        double sum = 0.0;
        for (double a : alpha) {
            if (!(a >= 0.0) || a > 1.0) throw ConfigError("criterion weights must lie in [0, 1]");
            sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("criterion weights must sum to 1");
        if (std::isnan(beta) || beta < 0.0) throw ConfigError("beta must be >= 0");
    }

    bool operator==(const TacticSpec&) const = default;
};

inline constexpr SlotId kNoSlot = std::numeric_limits<SlotId>::max();

/// Walker positions and the observables they decide on, at time t.
struct SimState {
    std::uint64_t t = 0;
    std::vector<NodeId> prev;             // x_i(t-1); equals curr at t = 0
    std::vector<NodeId> curr;             // x_i(t)
    std::vector<std::uint32_t> occupancy; // n_v(t), per node
    std::vector<std::uint32_t> flux;      // J(t), per directed link slot
    std::vector<SlotId> last_move;        // slot each walker used to reach curr; kNoSlot at t = 0
    std::vector<VisitedSet> visited;
    std::uint64_t visited_total = 0;      // sum of visited[i].size()
    Rng rng;

    std::size_t walker_count() const noexcept { return curr.size(); }

    std::uint32_t flux_on(const DiscretizedGraph& g, NodeId from, NodeId to) const {
        const auto s = g.find_slot(from, to);
        return s ? flux[*s] : 0;
    }
};

/// Places walkers at the given nodes; prev = curr, zero flux.
inline SimState init_at(const DiscretizedGraph& g, std::span<const NodeId> positions, std::uint64_t seed) {
    if (positions.empty()) throw ConfigError("need at least one walker");
    SimState s;
    s.rng = Rng(seed);
    s.curr.assign(positions.begin(), positions.end());
    s.prev = s.curr;
    s.occupancy.assign(g.node_count(), 0);
    s.flux.assign(g.slot_count(), 0);
    s.last_move.assign(positions.size(), kNoSlot);
    s.visited.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] >= g.node_count()) throw ConfigError("walker position out of range");
        ++s.occupancy[positions[i]];
        s.visited[i].insert(positions[i]);
    }
    s.visited_total = positions.size();
    return s;
}

/// Each walker placed independently and uniformly over the nodes.
inline SimState init(const DiscretizedGraph& g, std::size_t num_walkers, std::uint64_t seed) {
    if (num_walkers == 0) throw ConfigError("need at least one walker");
    Rng rng(seed);
    std::vector<NodeId> positions(num_walkers);
    for (auto& p : positions) p = static_cast<NodeId>(rng.uniform_index(g.node_count()));
    SimState s = init_at(g, positions, seed);
    s.rng = rng;
    return s;
}

/// State at time `t` >= 1 right after every walker moved prev[i] -> curr[i].
/// Visited sets hold {prev, curr}. Used to freeze hand-built configurations.
inline SimState state_after_moves(const DiscretizedGraph& g, std::span<const NodeId> prev,
                                  std::span<const NodeId> curr, std::uint64_t seed, std::uint64_t t = 1) {
    if (prev.size() != curr.size()) throw ConfigError("prev/curr size mismatch");
    if (t == 0) throw ConfigError("state_after_moves needs t >= 1");
    SimState s = init_at(g, curr, seed);
    s.t = t;
    s.prev.assign(prev.begin(), prev.end());
    for (std::size_t i = 0; i < curr.size(); ++i) {
        const auto slot = g.find_slot(prev[i], curr[i]);
        if (!slot) throw ContractViolation("walker " + std::to_string(i) + " did not move along a link");
        ++s.flux[*slot];
        s.last_move[i] = *slot;
        if (s.visited[i].insert(prev[i])) ++s.visited_total;
    }
    return s;
}

namespace detail {

/// Criterion value for moving along `slot` (v -> w) when the walker came from u.
inline double criterion_at_slot(const DiscretizedGraph& g, const SimState& s, Criterion kind, NodeId from,
                                SlotId slot) {
    switch (kind) {
        case Criterion::Random: return 1.0;
        case Criterion::Propulsion: return g.slot_target(slot) == from ? 0.0 : 1.0;
        case Criterion::Attraction: return static_cast<double>(s.occupancy[g.slot_target(slot)]);
        case Criterion::Follow: return static_cast<double>(s.flux[slot]);
        case Criterion::Alignment:
            return static_cast<double>(s.flux[slot]) - static_cast<double>(s.flux[g.reverse(slot)]);
    }
    return 0.0;
}

inline void check_beta(double beta) {
    if (std::isnan(beta) || beta < 0.0) throw ConfigError("beta must be >= 0");
}

inline std::vector<double>& scratch_values() {
    thread_local std::vector<double> buf;
    return buf;
}

}  // namespace detail

/// C_{u,v,w}(t) for a walker that came from `from` (u), stands at `at` (v) and considers `to` (w).
inline double criterion_value(const DiscretizedGraph& g, const SimState& s, Criterion kind, NodeId from,
                              NodeId at, NodeId to) {
    const auto slot = g.find_slot(at, to);
    if (!slot) throw ContractViolation("candidate " + std::to_string(to) + " is not a neighbor of " + std::to_string(at));
    return detail::criterion_at_slot(g, s, kind, from, *slot);
}

/// Logit rule over a candidate list: softmax of beta * value, max-shifted.
/// With beta = kArgmax the maximizers share the mass uniformly.
inline void logit_probabilities(std::span<const double> values, double beta, std::span<double> out) {
    detail::check_beta(beta);
    if (values.empty() || out.size() != values.size()) throw ContractViolation("logit needs matching non-empty spans");
    const double top = *std::max_element(values.begin(), values.end());
    if (std::isinf(beta)) {
        const auto ties = static_cast<double>(std::count(values.begin(), values.end(), top));
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] == top ? 1.0 / ties : 0.0;
        return;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        // beta * (value - top) <= 0, so exp never overflows; beta = 0 gives exp(0) = 1 exactly.
        out[i] = beta == 0.0 ? 1.0 : std::exp(beta * (values[i] - top));
        total += out[i];
    }
    for (double& p : out) p /= total;
}

inline std::vector<double> logit_probabilities(std::span<const double> values, double beta) {
    std::vector<double> out(values.size());
    logit_probabilities(values, beta, out);
    return out;
}

/// Walking rule omega^C: probabilities over neighbors(at), in neighbor order.
inline std::vector<double> rule_probabilities(const DiscretizedGraph& g, const SimState& s, Criterion kind,
                                              NodeId from, NodeId at, double beta) {
    if (at >= g.node_count()) throw ContractViolation("node out of range");
    std::vector<double> values;
    for (SlotId slot = g.first_slot(at); slot < g.end_slot(at); ++slot)
        values.push_back(detail::criterion_at_slot(g, s, kind, from, slot));
    return logit_probabilities(values, beta);
}

/// Explicit mixture sum_C alpha_C * omega^C over neighbors(at).
inline std::vector<double> tactic_probabilities(const DiscretizedGraph& g, const SimState& s,
                                                const TacticSpec& tactic, NodeId from, NodeId at) {
    std::vector<double> mix(g.degree(at), 0.0);
    for (Criterion c : kAllCriteria) {
        const double a = tactic.weight(c);
        if (a == 0.0) continue;
        const auto p = rule_probabilities(g, s, c, from, at, tactic.beta);
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += a * p[i];
    }
    return mix;
}

/// Picks a criterion by alpha; strict tactics consume no draw.
inline Criterion sample_criterion(const TacticSpec& tactic, Rng& rng) {
    if (auto c = tactic.strict_criterion()) return *c;
    const double u = rng.uniform01();
    double acc = 0.0;
    std::optional<Criterion> last;
    for (Criterion c : kAllCriteria) {
        if (tactic.weight(c) <= 0.0) continue;
        acc += tactic.weight(c);
        last = c;
        if (u < acc) return c;
    }
    return *last;
}

/// Next-move decision of one walker against the time-t observables in `s`.
/// Returns the slot of the chosen link. Dead ends return their only link
/// without drawing.
inline SlotId choose_move(const DiscretizedGraph& g, const SimState& s, Criterion kind, double beta,
                          std::size_t walker, Rng& rng) {
    const NodeId at = s.curr[walker];
    const NodeId from = s.prev[walker];
    const SlotId first = g.first_slot(at);
    const std::size_t deg = g.degree(at);
    if (deg == 1) return first;

    auto& values = detail::scratch_values();
    values.resize(deg);
    for (std::size_t i = 0; i < deg; ++i)
        values[i] = detail::criterion_at_slot(g, s, kind, from, first + static_cast<SlotId>(i));

    if (std::isinf(beta)) {
        const double top = *std::max_element(values.begin(), values.end());
        std::size_t ties = 0;
        for (double v : values) ties += v == top;
        std::size_t pick = ties == 1 ? 0 : rng.uniform_index(ties);
        for (std::size_t i = 0; i < deg; ++i)
            if (values[i] == top && pick-- == 0) return first + static_cast<SlotId>(i);
    }

    logit_probabilities(values, beta, values);
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t chosen = deg - 1;
    for (std::size_t i = 0; i < deg; ++i) {
        acc += values[i];
        if (u < acc) {
            chosen = i;
            break;
        }
    }
    while (values[chosen] == 0.0 && chosen > 0) --chosen;  // u landed in rounding slack
    return first + static_cast<SlotId>(chosen);
}

/// Full tactic decision: sample a criterion by alpha, then a move by its rule.
inline SlotId choose_move(const DiscretizedGraph& g, const SimState& s, const TacticSpec& tactic,
                          std::size_t walker, Rng& rng) {
    const Criterion kind = sample_criterion(tactic, rng);
    return choose_move(g, s, kind, tactic.beta, walker, rng);
}

/// Applies one synchronous step: walker i follows moves[i]. All observables
/// (occupancy, flux, prev/curr, visited) switch from time t to t+1 together.
inline void commit_moves(const DiscretizedGraph& g, SimState& s, std::span<const SlotId> moves) {
    for (SlotId slot : s.last_move)
        if (slot != kNoSlot) s.flux[slot] = 0;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        const SlotId slot = moves[i];
        const NodeId from = g.slot_source(slot);
        const NodeId to = g.slot_target(slot);
        --s.occupancy[from];
        ++s.occupancy[to];
        ++s.flux[slot];
        s.prev[i] = from;
        s.curr[i] = to;
        s.last_move[i] = slot;
        if (s.visited[i].insert(to)) ++s.visited_total;
    }
    ++s.t;
}

/// Every walker samples a criterion and a move against time-t observables,
/// in increasing walker order on the state's single stream; then all commit.
inline void step_tactic(const DiscretizedGraph& g, SimState& s, const TacticSpec& tactic) {
    tactic.validate();
    thread_local std::vector<SlotId> moves;
    moves.resize(s.walker_count());
    for (std::size_t i = 0; i < s.walker_count(); ++i) moves[i] = choose_move(g, s, tactic, i, s.rng);
    commit_moves(g, s, moves);
}

/// Collective baseline: each occupied node draws one uniform neighbor and its
/// whole group moves there. Nodes draw in order of their lowest-indexed walker.
inline void step_baseline(const DiscretizedGraph& g, SimState& s) {
    thread_local std::vector<SlotId> node_choice;
    thread_local std::vector<SlotId> moves;
    if (node_choice.size() < g.node_count()) node_choice.assign(g.node_count(), kNoSlot);
    moves.resize(s.walker_count());
    for (std::size_t i = 0; i < s.walker_count(); ++i) {
        const NodeId at = s.curr[i];
        if (node_choice[at] == kNoSlot)
            node_choice[at] = g.first_slot(at) + static_cast<SlotId>(s.rng.uniform_index(g.degree(at)));
        moves[i] = node_choice[at];
    }
    for (NodeId at : s.curr) node_choice[at] = kNoSlot;
    commit_moves(g, s, moves);
}

}  // namespace flockwalk
