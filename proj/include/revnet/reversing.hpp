#pragma once

// Backtracking and causal reverse semantics. The dependence relation is
// injected as a value; building one from a net lives in analysis.hpp.

#include "revnet/core.hpp"

namespace revnet {

enum class Semantics { backtracking, causal };

inline std::string to_string(Semantics s) {
    return s == Semantics::backtracking ? "backtracking" : "causal";
}

enum class DependenceKind { structural, marking_oriented, co_backward_conflict };

inline std::string to_string(DependenceKind k) {
    switch (k) {
        case DependenceKind::structural: return "structural";
        case DependenceKind::marking_oriented: return "marking-oriented";
        default: return "co-backward-conflict";
    }
}

// Symmetric relation over transitions. Pairs are stored normalized with
// first < second and without the diagonal; the co-backward-conflict kind
// is reflexive by definition, which dependent() accounts for.
struct DependenceRelation {
    DependenceKind kind = DependenceKind::structural;
    std::set<std::pair<TransitionId, TransitionId>> pairs;

    void insert(const TransitionId& a, const TransitionId& b) {
        if (a == b) return;
        pairs.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    }

    bool dependent(const TransitionId& a, const TransitionId& b) const {
        if (a == b) return kind == DependenceKind::co_backward_conflict;
        return pairs.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) != 0;
    }

    std::set<TransitionId> partners(const TransitionId& t) const {
        std::set<TransitionId> out;
        for (const auto& [a, b] : pairs) {
            if (a == t) out.insert(b);
            if (b == t) out.insert(a);
        }
        return out;
    }
};

enum class Direction { forward, reverse };

struct Move {
    TransitionId transition;
    Direction direction = Direction::forward;

    std::string str() const {
        return (direction == Direction::reverse ? "~" : "") + transition;
    }

    static Move parse(const std::string& text) {
        if (!text.empty() && text[0] == '~')
            return {text.substr(1), Direction::reverse};
        return {text, Direction::forward};
    }

    auto operator<=>(const Move&) const = default;
};

// Tokens and bonds a transition deposited must still sit in its output
// place for the transition to be reversible; with backtracking or causal
// reversing over structural dependence this holds whenever the history
// side allows the reversal, but with co-backward-conflict dependence the
// deposited component may have been carried away (the stuck situations).
inline std::optional<std::string> deposit_block_reason(const NetDef& net, const State& s,
                                                       const TransitionId& t) {
    PlaceId q = net.output_place(t);
    const ArcLabel& lo = net.label(t, q);
    const Content& mq = s.marking.at(q);
    for (const BaseId& a : lo.bases)
        if (!mq.contains_base(a))
            return "base " + a + " deposited by " + t + " is no longer in " + q;
    for (const Bond& b : lo.bonds)
        if (!mq.contains_bond(b))
            return "bond " + b.str() + " deposited by " + t + " is no longer in " + q;
    return std::nullopt;
}

// Backtracking: only the holder of the globally maximal history index may
// be reversed.
inline std::optional<std::string> bt_block_reason(const NetDef& net, const State& s,
                                                  const TransitionId& t) {
    net.require_transition(t);
    if (!s.history.executed(t))
        return t + " has not been executed";
    if (s.history.max_of(t) != s.history.max_index())
        return t + " was not the most recent transition (index " +
               std::to_string(s.history.max_of(t)) + " < " +
               std::to_string(s.history.max_index()) + ")";
    return deposit_block_reason(net, s, t);
}

inline bool bt_enabled(const NetDef& net, const State& s, const TransitionId& t) {
    return !bt_block_reason(net, s, t).has_value();
}

// Causal reversing: every transition dependent on t must be unexecuted or
// older than t's latest occurrence.
inline std::optional<std::string> co_block_reason(const NetDef& net, const State& s,
                                                  const TransitionId& t,
                                                  const DependenceRelation& dep) {
    net.require_transition(t);
    if (!s.history.executed(t))
        return t + " has not been executed";
    int mine = s.history.max_of(t);
    for (const TransitionId& u : dep.partners(t)) {
        if (s.history.executed(u) && s.history.max_of(u) > mine)
            return u + " is dependent on " + t + " and was executed later; reverse it first";
    }
    return deposit_block_reason(net, s, t);
}

inline bool co_enabled(const NetDef& net, const State& s, const TransitionId& t,
                       const DependenceRelation& dep) {
    return !co_block_reason(net, s, t, dep).has_value();
}

// Marking effect shared by both reversal semantics: the created bonds are
// removed, the resulting components travel back to the input places whose
// arcs mention their tokens, and the output place drops the components of
// everything the transition had deposited.
inline Marking reverse_marking(const NetDef& net, const Marking& m, const TransitionId& t) {
    Marking out = m;
    PlaceId q = net.output_place(t);
    const ArcLabel& lo = net.label(t, q);
    const Content& mq = m.at(q);

    Content removed = con_of_label(lo, mq);

    Content pool = mq;
    ArcLabel eff = net.effect_of(t);
    for (const Bond& b : eff.bonds) pool.bonds.erase(b);

    out.mut(q).subtract(removed);
    for (const PlaceId& p : net.preset(t)) {
        const ArcLabel& li = net.label(p, t);
        ArcLabel common;
        for (const BaseId& a : li.bases)
            if (lo.bases.count(a)) common.bases.insert(a);
        for (const Bond& b : li.bonds)
            if (lo.bonds.count(b)) common.bonds.insert(b);
        out.mut(p).unite(con_of_label(common, pool));
    }
    out.prune_empty();
    return out;
}

// Backtracking reversal: drop the maximal index of t; the remaining indices
// stay contiguous because t held the global maximum.
inline State fire_backtrack(const NetDef& net, const State& s, const TransitionId& t) {
    if (auto why = bt_block_reason(net, s, t))
        throw IllegalMove("cannot backtrack " + t + ": " + *why);
    State out;
    out.marking = reverse_marking(net, s.marking, t);
    out.history = s.history;
    auto& ks = out.history.entries[t];
    ks.erase(*ks.rbegin());
    out.history.prune_empty();
    return out;
}

// Causal reversal: same marking effect; the reversed occurrence k = max(H(t))
// disappears and every strictly larger index anywhere shifts down by one,
// restoring contiguity.
inline State fire_causal_reverse(const NetDef& net, const State& s, const TransitionId& t,
                                 const DependenceRelation& dep) {
    if (auto why = co_block_reason(net, s, t, dep))
        throw IllegalMove("cannot reverse " + t + ": " + *why);
    State out;
    out.marking = reverse_marking(net, s.marking, t);
    int k = s.history.max_of(t);
    for (const auto& [u, ks] : s.history.entries) {
        std::set<int> next;
        for (int v : ks) {
            if (u == t && v == k) continue;
            next.insert(v > k ? v - 1 : v);
        }
        if (!next.empty()) out.history.entries[u] = next;
    }
    return out;
}

inline std::optional<std::string> move_block_reason(const NetDef& net, const State& s,
                                                    const Move& mv, Semantics sem,
                                                    const DependenceRelation& dep) {
    if (mv.direction == Direction::forward)
        return forward_block_reason(net, s, mv.transition);
    if (sem == Semantics::backtracking)
        return bt_block_reason(net, s, mv.transition);
    return co_block_reason(net, s, mv.transition, dep);
}

inline State fire_move(const NetDef& net, const State& s, const Move& mv, Semantics sem,
                       const DependenceRelation& dep) {
    if (mv.direction == Direction::forward)
        return fire_forward(net, s, mv.transition);
    if (sem == Semantics::backtracking)
        return fire_backtrack(net, s, mv.transition);
    return fire_causal_reverse(net, s, mv.transition, dep);
}

inline bool move_enabled(const NetDef& net, const State& s, const Move& mv, Semantics sem,
                         const DependenceRelation& dep) {
    return !move_block_reason(net, s, mv, sem, dep).has_value();
}

}  // namespace revnet
