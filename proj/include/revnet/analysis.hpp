#pragma once

// Structural analysis: transition classification, simple cycle enumeration,
// trans-acyclicity, and construction of the three dependence relations.

#include "revnet/reversing.hpp"

#include <deque>

namespace revnet {

enum class TransitionKind { transferring, bond_creating };

// Transferring: union of incoming labels equals union of outgoing labels
// (over bases, bonds and their negative mentions alike).
inline std::map<TransitionId, TransitionKind> classify_transitions(const NetDef& net) {
    std::map<TransitionId, TransitionKind> out;
    for (const TransitionId& t : net.transitions) {
        ArcLabel g = net.guard_of(t);
        ArcLabel e = net.effects_of(t);
        out[t] = (g == e) ? TransitionKind::transferring : TransitionKind::bond_creating;
    }
    return out;
}

// Alternating place/transition sequence with first == last, starting at its
// lexicographically least place.
struct Cycle {
    std::vector<std::string> nodes;

    bool contains(const std::string& id) const {
        return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
    }

    std::string str() const {
        std::string out;
        for (const auto& n : nodes) {
            if (!out.empty()) out += " -> ";
            out += n;
        }
        return out;
    }
};

namespace detail {

// Rotate a simple cycle (without the closing repeat) to start at its least
// place, then close it.
inline Cycle canonical_cycle(std::vector<std::string> ring, const NetDef& net) {
    std::size_t best = 0;
    bool found = false;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (!net.places.count(ring[i])) continue;
        if (!found || ring[i] < ring[best]) {
            best = i;
            found = true;
        }
    }
    std::rotate(ring.begin(), ring.begin() + static_cast<long>(best), ring.end());
    ring.push_back(ring.front());
    return Cycle{std::move(ring)};
}

}  // namespace detail

// All simple cycles of the arc graph. Nets are desk-scale, so a DFS with an
// anchor node (cycles are enumerated once, at their least node) is enough.
inline std::vector<Cycle> find_cycles(const NetDef& net) {
    std::vector<std::string> nodes(net.places.begin(), net.places.end());
    nodes.insert(nodes.end(), net.transitions.begin(), net.transitions.end());
    std::sort(nodes.begin(), nodes.end());

    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [key, l] : net.arcs)
        if (!l.empty()) succ[key.first].push_back(key.second);
    for (auto& [n, vs] : succ) std::sort(vs.begin(), vs.end());

    std::vector<Cycle> cycles;
    std::vector<std::string> path;
    std::set<std::string> on_path;

    // Only nodes >= anchor may appear, so each cycle is found exactly once.
    auto dfs = [&](auto&& self, const std::string& anchor, const std::string& u) -> void {
        path.push_back(u);
        on_path.insert(u);
        for (const std::string& v : succ[u]) {
            if (v == anchor)
                cycles.push_back(detail::canonical_cycle(path, net));
            else if (v > anchor && !on_path.count(v))
                self(self, anchor, v);
        }
        on_path.erase(u);
        path.pop_back();
    };

    for (const std::string& anchor : nodes) dfs(dfs, anchor, anchor);

    std::sort(cycles.begin(), cycles.end(),
              [](const Cycle& a, const Cycle& b) { return a.nodes < b.nodes; });
    return cycles;
}

struct TransAcyclicity {
    bool ok = true;
    std::optional<Cycle> witness;
};

// A net is trans-acyclic when no cycle consists of transferring transitions
// only; the witness is the offending cycle.
inline TransAcyclicity is_trans_acyclic(const NetDef& net) {
    auto kinds = classify_transitions(net);
    for (const Cycle& c : find_cycles(net)) {
        bool all_transferring = true;
        for (const std::string& n : c.nodes) {
            auto it = kinds.find(n);
            if (it != kinds.end() && it->second == TransitionKind::bond_creating) {
                all_transferring = false;
                break;
            }
        }
        if (all_transferring) return {false, c};
    }
    return {true, std::nullopt};
}

// Structural dependence: an input place of one transition is an output
// place of the other.
inline DependenceRelation structural_dependence(const NetDef& net) {
    DependenceRelation dep;
    dep.kind = DependenceKind::structural;
    for (const TransitionId& t1 : net.transitions) {
        auto pre1 = net.preset(t1);
        auto post1 = net.postset(t1);
        for (const TransitionId& t2 : net.transitions) {
            if (t2 <= t1) continue;
            auto pre2 = net.preset(t2);
            auto post2 = net.postset(t2);
            bool hit = false;
            for (const PlaceId& p : post1)
                if (pre2.count(p)) hit = true;
            for (const PlaceId& p : pre1)
                if (post2.count(p)) hit = true;
            if (hit) dep.insert(t1, t2);
        }
    }
    return dep;
}

// Marking-oriented dependence: two executed transitions manipulate a common
// connected component in some reachable state. Reachability is explored
// forward-only from the given initial state; the state space is finite for
// trans-acyclic nets.
inline DependenceRelation marking_oriented_dependence(const NetDef& net, const State& initial) {
    auto ta = is_trans_acyclic(net);
    if (!ta.ok)
        throw RpnError("marking-oriented dependence needs a trans-acyclic net; cycle: " +
                       ta.witness->str());

    std::map<TransitionId, ArcLabel> eff;
    for (const TransitionId& t : net.transitions) eff[t] = net.effects_of(t);

    DependenceRelation dep;
    dep.kind = DependenceKind::marking_oriented;

    std::set<std::string> seen;
    std::deque<State> frontier;
    frontier.push_back(initial);
    seen.insert(state_digest(initial));
    while (!frontier.empty()) {
        State s = frontier.front();
        frontier.pop_front();

        std::vector<TransitionId> executed;
        for (const TransitionId& t : net.transitions)
            if (s.history.executed(t)) executed.push_back(t);
        if (executed.size() >= 2) {
            for (const auto& [p, content] : s.marking.content) {
                std::set<BaseId> visited;
                for (const BaseId& a : content.bases) {
                    if (visited.count(a)) continue;
                    Content comp = con(a, content);
                    visited.insert(comp.bases.begin(), comp.bases.end());
                    std::vector<TransitionId> touching;
                    for (const TransitionId& t : executed) {
                        bool hit = false;
                        for (const BaseId& x : eff[t].bases)
                            if (comp.contains_base(x)) hit = true;
                        for (const Bond& b : eff[t].bonds)
                            if (comp.contains_bond(b)) hit = true;
                        if (hit) touching.push_back(t);
                    }
                    for (std::size_t i = 0; i < touching.size(); ++i)
                        for (std::size_t j = i + 1; j < touching.size(); ++j)
                            dep.insert(touching[i], touching[j]);
                }
            }
        }

        for (const TransitionId& t : net.transitions) {
            if (!forward_enabled(net, s, t)) continue;
            State next = fire_forward(net, s, t);
            if (seen.insert(state_digest(next)).second) frontier.push_back(next);
        }
    }
    return dep;
}

// Co-backward-conflict: two transitions share an output place lying on some
// simple cycle, and at least one of the two is on no simple cycle. The
// relation is reflexive on top of these pairs.
inline DependenceRelation co_backward_conflict(const NetDef& net) {
    DependenceRelation dep;
    dep.kind = DependenceKind::co_backward_conflict;

    std::set<PlaceId> cyclic_places;
    std::set<TransitionId> cyclic_transitions;
    for (const Cycle& c : find_cycles(net)) {
        for (const std::string& n : c.nodes) {
            if (net.places.count(n)) cyclic_places.insert(n);
            if (net.transitions.count(n)) cyclic_transitions.insert(n);
        }
    }

    for (const TransitionId& t1 : net.transitions) {
        for (const TransitionId& t2 : net.transitions) {
            if (t2 <= t1) continue;
            if (cyclic_transitions.count(t1) && cyclic_transitions.count(t2)) continue;
            auto post1 = net.postset(t1);
            for (const PlaceId& p : net.postset(t2)) {
                if (post1.count(p) && cyclic_places.count(p)) {
                    dep.insert(t1, t2);
                    break;
                }
            }
        }
    }
    return dep;
}

// Ind_co restricted to T: transitions having at least one co-independent
// partner. The diagonal is co-dependent by definition, so only distinct
// partners count.
inline std::set<TransitionId> co_independent_capable(const NetDef& net,
                                                     const DependenceRelation& co) {
    std::set<TransitionId> out;
    for (const TransitionId& t : net.transitions)
        for (const TransitionId& u : net.transitions)
            if (u != t && !co.dependent(t, u)) {
                out.insert(t);
                break;
            }
    return out;
}

inline DependenceRelation build_dependence(const NetDef& net, const State& initial,
                                           DependenceKind kind) {
    switch (kind) {
        case DependenceKind::structural: return structural_dependence(net);
        case DependenceKind::marking_oriented: return marking_oriented_dependence(net, initial);
        default: return co_backward_conflict(net);
    }
}

}  // namespace revnet
