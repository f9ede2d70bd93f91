#pragma once

// Reversing Petri nets: data model, well-formedness checks and the
// forward execution semantics.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace revnet {

using PlaceId = std::string;
using TransitionId = std::string;
using BaseId = std::string;

struct RpnError : std::runtime_error {
    explicit RpnError(const std::string& what) : std::runtime_error(what) {}
};

struct IllegalMove : RpnError {
    explicit IllegalMove(const std::string& what) : RpnError(what) {}
};

// Unordered pair of distinct bases, kept normalized so that first < second.
struct Bond {
    BaseId first;
    BaseId second;

    Bond() = default;
    Bond(BaseId a, BaseId b) {
        if (a == b)
            throw RpnError("bond endpoints must differ: " + a);
        if (b < a)
            std::swap(a, b);
        first = std::move(a);
        second = std::move(b);
    }

    bool has(const BaseId& x) const { return x == first || x == second; }
    const BaseId& other(const BaseId& x) const { return x == first ? second : first; }

    std::string str() const { return first + "-" + second; }

    auto operator<=>(const Bond&) const = default;
};

// Label of a single arc: positive and negative base/bond mentions.
struct ArcLabel {
    std::set<BaseId> bases;
    std::set<BaseId> neg_bases;
    std::set<Bond> bonds;
    std::set<Bond> neg_bonds;

    bool empty() const {
        return bases.empty() && neg_bases.empty() && bonds.empty() && neg_bonds.empty();
    }

    bool operator==(const ArcLabel&) const = default;
};

// A set of bases together with bonds between them; doubles as the content
// of a place in a marking and as the result type of con().
struct Content {
    std::set<BaseId> bases;
    std::set<Bond> bonds;

    bool empty() const { return bases.empty() && bonds.empty(); }

    bool contains_base(const BaseId& a) const { return bases.count(a) != 0; }
    bool contains_bond(const Bond& b) const { return bonds.count(b) != 0; }

    void unite(const Content& other) {
        bases.insert(other.bases.begin(), other.bases.end());
        bonds.insert(other.bonds.begin(), other.bonds.end());
    }

    void subtract(const Content& other) {
        for (const auto& a : other.bases) bases.erase(a);
        for (const auto& b : other.bonds) bonds.erase(b);
    }

    bool bond_closed() const {
        for (const Bond& b : bonds)
            if (!bases.count(b.first) || !bases.count(b.second))
                return false;
        return true;
    }

    std::string str() const {
        std::vector<std::string> items(bases.begin(), bases.end());
        for (const Bond& b : bonds) items.push_back(b.str());
        std::sort(items.begin(), items.end());
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += ", ";
            out += s;
        }
        return out.empty() ? "-" : out;
    }

    auto operator<=>(const Content&) const = default;
};

// A molecule is a bond-closed, connected content set; we reuse Content and
// keep connectivity as a usage invariant of the CPN layer.
using Molecule = Content;

// The RPN tuple (P, T, F, A, B). Arcs are keyed by (from, to) id pairs;
// id namespaces of places, transitions and bases are disjoint.
struct NetDef {
    std::set<PlaceId> places;
    std::set<TransitionId> transitions;
    std::set<BaseId> bases;
    std::set<Bond> bonds;
    std::map<std::pair<std::string, std::string>, ArcLabel> arcs;

    static const ArcLabel& empty_label() {
        static const ArcLabel e{};
        return e;
    }

    const ArcLabel& label(const std::string& from, const std::string& to) const {
        auto it = arcs.find({from, to});
        return it == arcs.end() ? empty_label() : it->second;
    }

    bool has_arc(const std::string& from, const std::string& to) const {
        auto it = arcs.find({from, to});
        return it != arcs.end() && !it->second.empty();
    }

    std::set<PlaceId> preset(const TransitionId& t) const {
        std::set<PlaceId> out;
        for (const PlaceId& p : places)
            if (has_arc(p, t)) out.insert(p);
        return out;
    }

    std::set<PlaceId> postset(const TransitionId& t) const {
        std::set<PlaceId> out;
        for (const PlaceId& p : places)
            if (has_arc(t, p)) out.insert(p);
        return out;
    }

    // The unique output place of a well-formed transition.
    PlaceId output_place(const TransitionId& t) const {
        auto post = postset(t);
        if (post.size() != 1)
            throw RpnError("transition " + t + " does not have exactly one output place");
        return *post.begin();
    }

    void require_transition(const TransitionId& t) const {
        if (!transitions.count(t))
            throw RpnError("unknown transition: " + t);
    }

    ArcLabel guard_of(const TransitionId& t) const {
        require_transition(t);
        ArcLabel out;
        for (const PlaceId& p : places) {
            const ArcLabel& l = label(p, t);
            out.bases.insert(l.bases.begin(), l.bases.end());
            out.neg_bases.insert(l.neg_bases.begin(), l.neg_bases.end());
            out.bonds.insert(l.bonds.begin(), l.bonds.end());
            out.neg_bonds.insert(l.neg_bonds.begin(), l.neg_bonds.end());
        }
        return out;
    }

    ArcLabel effects_of(const TransitionId& t) const {
        require_transition(t);
        ArcLabel out;
        for (const PlaceId& p : places) {
            const ArcLabel& l = label(t, p);
            out.bases.insert(l.bases.begin(), l.bases.end());
            out.neg_bases.insert(l.neg_bases.begin(), l.neg_bases.end());
            out.bonds.insert(l.bonds.begin(), l.bonds.end());
            out.neg_bonds.insert(l.neg_bonds.begin(), l.neg_bonds.end());
        }
        return out;
    }

    // effect(t) = effects(t) \ guard(t): the bonds created by t.
    ArcLabel effect_of(const TransitionId& t) const {
        ArcLabel g = guard_of(t);
        ArcLabel e = effects_of(t);
        ArcLabel out;
        for (const BaseId& a : e.bases)
            if (!g.bases.count(a)) out.bases.insert(a);
        for (const Bond& b : e.bonds)
            if (!g.bonds.count(b)) out.bonds.insert(b);
        return out;
    }

    // Structural sanity: referenced ids exist, namespaces are disjoint,
    // arcs connect a place with a transition, labels mention declared
    // bases/bonds only, no base/neg-base or bond/neg-bond overlap.
    std::vector<std::string> structural_errors() const {
        std::vector<std::string> errs;
        for (const PlaceId& p : places) {
            if (transitions.count(p)) errs.push_back("id used as place and transition: " + p);
            if (bases.count(p)) errs.push_back("id used as place and base: " + p);
        }
        for (const TransitionId& t : transitions)
            if (bases.count(t)) errs.push_back("id used as transition and base: " + t);
        for (const Bond& b : bonds) {
            if (!bases.count(b.first) || !bases.count(b.second))
                errs.push_back("bond endpoint not a declared base: " + b.str());
        }
        for (const auto& [key, l] : arcs) {
            const auto& [from, to] = key;
            bool pt = places.count(from) && transitions.count(to);
            bool tp = transitions.count(from) && places.count(to);
            if (!pt && !tp) {
                errs.push_back("arc does not connect a place and a transition: " + from + " -> " + to);
                continue;
            }
            for (const BaseId& a : l.bases)
                if (!bases.count(a)) errs.push_back("arc " + from + "->" + to + " mentions unknown base " + a);
            for (const BaseId& a : l.neg_bases)
                if (!bases.count(a)) errs.push_back("arc " + from + "->" + to + " mentions unknown base " + a);
            for (const Bond& b : l.bonds)
                if (!bonds.count(b)) errs.push_back("arc " + from + "->" + to + " mentions unknown bond " + b.str());
            for (const Bond& b : l.neg_bonds)
                if (!bonds.count(b)) errs.push_back("arc " + from + "->" + to + " mentions unknown bond " + b.str());
            for (const BaseId& a : l.bases)
                if (l.neg_bases.count(a)) errs.push_back("arc " + from + "->" + to + " mentions " + a + " both positively and negatively");
            for (const Bond& b : l.bonds)
                if (l.neg_bonds.count(b)) errs.push_back("arc " + from + "->" + to + " mentions " + b.str() + " both positively and negatively");
        }
        return errs;
    }
};

// One violated well-formedness clause, as data.
struct Violation {
    int clause = 0;
    TransitionId transition;
    std::string detail;

    std::string str() const {
        return "clause " + std::to_string(clause) + " (" + transition + "): " + detail;
    }
};

// The four well-formedness conditions: (1) incoming and outgoing base sets
// coincide, (2) bonds in the guard survive into the effects, (3) at least
// one input place and exactly one output place, (4) a bond created from
// tokens of a single input place needs that bond or its negative mention
// on the incoming arc.
inline std::vector<Violation> validate_well_formed(const NetDef& net) {
    std::vector<Violation> out;
    for (const TransitionId& t : net.transitions) {
        ArcLabel g = net.guard_of(t);
        ArcLabel e = net.effects_of(t);
        if (g.bases != e.bases) {
            std::string d = "base set of incoming arcs differs from outgoing arcs";
            out.push_back({1, t, d});
        }
        for (const Bond& b : g.bonds)
            if (!e.bonds.count(b))
                out.push_back({2, t, "bond " + b.str() + " required but not reproduced"});
        auto pre = net.preset(t);
        auto post = net.postset(t);
        if (pre.empty())
            out.push_back({3, t, "no input place"});
        if (post.size() != 1)
            out.push_back({3, t, "has " + std::to_string(post.size()) + " output places, expected 1"});
        for (const PlaceId& q : post) {
            const ArcLabel& lo = net.label(t, q);
            for (const Bond& b : lo.bonds) {
                for (const PlaceId& p : pre) {
                    const ArcLabel& li = net.label(p, t);
                    if (li.bases.count(b.first) && li.bases.count(b.second) &&
                        !li.bonds.count(b) && !li.neg_bonds.count(b))
                        out.push_back({4, t, "bond " + b.str() + " created from tokens of " + p +
                                              " without " + b.str() + " or its negative on the incoming arc"});
                }
            }
        }
    }
    return out;
}

// Marking: place -> set of bases and bonds. Every bond in a place must have
// both endpoints in the same place (bond-closure).
struct Marking {
    std::map<PlaceId, Content> content;

    const Content& at(const PlaceId& p) const {
        static const Content e{};
        auto it = content.find(p);
        return it == content.end() ? e : it->second;
    }

    Content& mut(const PlaceId& p) { return content[p]; }

    void prune_empty() {
        for (auto it = content.begin(); it != content.end();) {
            if (it->second.empty())
                it = content.erase(it);
            else
                ++it;
        }
    }

    bool bond_closed() const {
        for (const auto& [p, c] : content)
            if (!c.bond_closed()) return false;
        return true;
    }

    auto operator<=>(const Marking&) const = default;
};

// History: per transition, the set of global occurrence indices still
// standing. Indices across the whole net form a contiguous range 1..n.
struct History {
    std::map<TransitionId, std::set<int>> entries;

    const std::set<int>& at(const TransitionId& t) const {
        static const std::set<int> e{};
        auto it = entries.find(t);
        return it == entries.end() ? e : it->second;
    }

    bool executed(const TransitionId& t) const { return !at(t).empty(); }

    int max_of(const TransitionId& t) const {
        const auto& s = at(t);
        return s.empty() ? 0 : *s.rbegin();
    }

    // Largest index across all transitions; 0 when nothing has run.
    int max_index() const {
        int m = 0;
        for (const auto& [t, s] : entries)
            if (!s.empty()) m = std::max(m, *s.rbegin());
        return m;
    }

    int total() const {
        int n = 0;
        for (const auto& [t, s] : entries) n += static_cast<int>(s.size());
        return n;
    }

    // Indices form exactly {1, ..., total}.
    bool contiguous() const {
        std::set<int> all;
        for (const auto& [t, s] : entries)
            for (int k : s)
                if (!all.insert(k).second) return false;
        int n = static_cast<int>(all.size());
        return all.empty() || (*all.begin() == 1 && *all.rbegin() == n);
    }

    void prune_empty() {
        for (auto it = entries.begin(); it != entries.end();) {
            if (it->second.empty())
                it = entries.erase(it);
            else
                ++it;
        }
    }

    auto operator<=>(const History&) const = default;
};

struct State {
    Marking marking;
    History history;

    auto operator<=>(const State&) const = default;
};

// Canonical one-line rendering; doubles as the state digest in the explorer.
inline std::string state_digest(const State& s) {
    std::string out;
    for (const auto& [p, c] : s.marking.content) {
        if (c.empty()) continue;
        out += p + ":" + c.str() + "|";
    }
    out += "/";
    for (const auto& [t, ks] : s.history.entries) {
        if (ks.empty()) continue;
        out += t + ":";
        bool first = true;
        for (int k : ks) {
            if (!first) out += ",";
            out += std::to_string(k);
            first = false;
        }
        out += "|";
    }
    return out;
}

// con(a, C): the connected component of base a in C, following bonds whose
// both endpoints are present. Empty when a itself is absent.
inline Content con(const BaseId& a, const Content& c) {
    Content out;
    if (!c.contains_base(a)) return out;
    std::vector<BaseId> todo{a};
    out.bases.insert(a);
    while (!todo.empty()) {
        BaseId x = todo.back();
        todo.pop_back();
        for (const Bond& b : c.bonds) {
            if (!b.has(x)) continue;
            const BaseId& y = b.other(x);
            if (!c.contains_base(y)) continue;
            out.bonds.insert(b);
            if (out.bases.insert(y).second) todo.push_back(y);
        }
    }
    return out;
}

// Component of a positive arc-label item; a bond mention pulls in the
// components of both endpoints.
inline Content con_of_bond(const Bond& b, const Content& c) {
    Content out = con(b.first, c);
    out.unite(con(b.second, c));
    return out;
}

// Union of components of every positive mention of the label in c.
inline Content con_of_label(const ArcLabel& l, const Content& c) {
    Content out;
    for (const BaseId& a : l.bases) out.unite(con(a, c));
    for (const Bond& b : l.bonds) out.unite(con_of_bond(b, c));
    return out;
}

// Forward enabledness, Definition-style: required tokens present, negated
// tokens absent, and a pre-existing bond mentioned on the outgoing arc must
// be mentioned on the incoming arc of the place holding it.
inline std::optional<std::string> forward_block_reason(const NetDef& net, const State& s,
                                                       const TransitionId& t) {
    net.require_transition(t);
    auto pre = net.preset(t);
    for (const PlaceId& p : pre) {
        const ArcLabel& l = net.label(p, t);
        for (const BaseId& a : l.bases)
            if (!s.marking.at(p).contains_base(a))
                return "base " + a + " not in " + p;
        for (const Bond& b : l.bonds)
            if (!s.marking.at(p).contains_bond(b))
                return "bond " + b.str() + " not in " + p;
        for (const BaseId& a : l.neg_bases)
            if (s.marking.at(p).contains_base(a))
                return "base " + a + " must be absent from " + p;
        for (const Bond& b : l.neg_bonds)
            if (s.marking.at(p).contains_bond(b))
                return "bond " + b.str() + " must be absent from " + p;
    }
    for (const PlaceId& q : net.postset(t)) {
        const ArcLabel& lo = net.label(t, q);
        for (const Bond& b : lo.bonds) {
            for (const PlaceId& p : pre) {
                if (s.marking.at(p).contains_bond(b) && !net.label(p, t).bonds.count(b))
                    return "pre-existing bond " + b.str() + " in " + p +
                           " is not mentioned on the incoming arc";
            }
        }
    }
    return std::nullopt;
}

inline bool forward_enabled(const NetDef& net, const State& s, const TransitionId& t) {
    return !forward_block_reason(net, s, t).has_value();
}

// Firing: input places lose the full components of the consumed tokens, the
// output place gains the outgoing label plus those components, and the
// transition receives the next free history index (max of empty history
// is taken as 0, so the first firing gets index 1).
inline State fire_forward(const NetDef& net, const State& s, const TransitionId& t) {
    if (auto why = forward_block_reason(net, s, t))
        throw IllegalMove("cannot fire " + t + ": " + *why);
    State out = s;
    auto pre = net.preset(t);
    PlaceId q = net.output_place(t);
    const ArcLabel& lo = net.label(t, q);

    Content add;
    add.bases.insert(lo.bases.begin(), lo.bases.end());
    add.bonds.insert(lo.bonds.begin(), lo.bonds.end());
    for (const PlaceId& p : pre) {
        const Content& mp = s.marking.at(p);
        add.unite(con_of_label(lo, mp));
        Content consumed = con_of_label(net.label(p, t), mp);
        out.marking.mut(p).subtract(consumed);
    }
    out.marking.mut(q).unite(add);
    out.marking.prune_empty();

    int next = s.history.max_index() + 1;
    out.history.entries[t].insert(next);
    return out;
}

struct SequenceResult {
    State state;
    std::optional<std::size_t> failed_at;
    std::string error;

    bool ok() const { return !failed_at.has_value(); }
};

inline SequenceResult fire_sequence(const NetDef& net, const State& start,
                                    const std::vector<TransitionId>& seq) {
    State cur = start;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (auto why = forward_block_reason(net, cur, seq[i]))
            return {cur, i, seq[i] + ": " + *why};
        cur = fire_forward(net, cur, seq[i]);
    }
    return {cur, std::nullopt, ""};
}

}  // namespace revnet
