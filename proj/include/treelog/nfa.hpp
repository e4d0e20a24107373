#pragma once

// Epsilon-NFAs over tree axes and unary node tests, built from caterpillar
// expressions by the Thompson construction, and their rendering as datalog
// rules: one state predicate per NFA state, one rule per transition.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "caterpillar.hpp"
#include "datalog.hpp"

namespace treelog {

struct NfaSymbol {
    enum class Kind { eps, axis, axis_inv, test } kind = Kind::eps;
    Builtin builtin = Builtin::root;
    std::string label;  // label/not_label tests
    std::uint32_t k = 0; // child_k axes
};

struct EpsNFA {
    int states = 0;
    int start = 0;
    std::set<int> finals;
    std::vector<std::tuple<int, NfaSymbol, int>> transitions;

    int add_state() { return states++; }
    void add(int from, NfaSymbol sym, int to) { transitions.emplace_back(from, std::move(sym), to); }
    void add_eps(int from, int to) { add(from, NfaSymbol{}, to); }
};

namespace detail {

struct Frag {
    int start;
    int accept;
};

inline Frag thompson_frag(EpsNFA& nfa, const CaterpillarExpr& e) {
    using K = CaterpillarExpr::Kind;
    switch (e.kind) {
        case K::epsilon: {
            Frag f{nfa.add_state(), nfa.add_state()};
            nfa.add_eps(f.start, f.accept);
            return f;
        }
        case K::axis: {
            Frag f{nfa.add_state(), nfa.add_state()};
            nfa.add(f.start, {NfaSymbol::Kind::axis, e.builtin, "", e.k}, f.accept);
            return f;
        }
        case K::test: {
            Frag f{nfa.add_state(), nfa.add_state()};
            nfa.add(f.start, {NfaSymbol::Kind::test, e.builtin, e.label, 0}, f.accept);
            return f;
        }
        case K::inverse: {
            const CaterpillarExpr& inner = *e.parts[0];
            Frag f{nfa.add_state(), nfa.add_state()};
            if (inner.kind == K::axis) {
                nfa.add(f.start, {NfaSymbol::Kind::axis_inv, inner.builtin, "", inner.k}, f.accept);
            } else if (inner.kind == K::test) {
                nfa.add(f.start, {NfaSymbol::Kind::test, inner.builtin, inner.label, 0}, f.accept);
            } else {
                throw std::logic_error("inversions must be pushed to atoms before NFA construction");
            }
            return f;
        }
        case K::concat: {
            Frag all = thompson_frag(nfa, *e.parts[0]);
            for (std::size_t i = 1; i < e.parts.size(); ++i) {
                Frag next = thompson_frag(nfa, *e.parts[i]);
                nfa.add_eps(all.accept, next.start);
                all.accept = next.accept;
            }
            return all;
        }
        case K::alt: {
            Frag f{nfa.add_state(), nfa.add_state()};
            for (const auto& p : e.parts) {
                Frag sub = thompson_frag(nfa, *p);
                nfa.add_eps(f.start, sub.start);
                nfa.add_eps(sub.accept, f.accept);
            }
            return f;
        }
        case K::star: {
            Frag f{nfa.add_state(), nfa.add_state()};
            Frag sub = thompson_frag(nfa, *e.parts[0]);
            nfa.add_eps(f.start, sub.start);
            nfa.add_eps(sub.accept, f.accept);
            nfa.add_eps(f.start, f.accept);
            nfa.add_eps(sub.accept, sub.start);
            return f;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

// Inversions are pushed down first, so any expression is accepted.
inline EpsNFA thompson(const CatPtr& e) {
    EpsNFA nfa;
    auto frag = detail::thompson_frag(nfa, *push_inversions(e));
    nfa.start = frag.start;
    nfa.finals = {frag.accept};
    return nfa;
}

// Rules defining target = { x | exists x0: p0(x0) and <x0,x> in [[E]] },
// one unary predicate per NFA state:
//   start rule      $s(x)  <- p0(x)
//   eps             q2(x)  <- q1(x)
//   forward axis    q2(x)  <- q1(x0), r(x0,x)
//   inverted axis   q2(x)  <- q1(x0), r(x,x0)
//   unary test      q2(x)  <- q1(x), u(x)
//   finals          target(x) <- qf(x)
inline std::vector<Rule> nfa_to_rules(const EpsNFA& nfa, const Predicate& p0, const Predicate& target,
                                      NameSupply& names) {
    std::vector<Predicate> state_pred;
    state_pred.reserve(nfa.states);
    for (int i = 0; i < nfa.states; ++i) state_pred.push_back(Predicate::intensional(names.fresh("q")));

    std::vector<Rule> out;
    out.push_back({atom(state_pred[nfa.start], {"X"}), {atom(p0, {"X"})}});
    for (const auto& [from, sym, to] : nfa.transitions) {
        switch (sym.kind) {
            case NfaSymbol::Kind::eps:
                out.push_back({atom(state_pred[to], {"X"}), {atom(state_pred[from], {"X"})}});
                break;
            case NfaSymbol::Kind::axis: {
                Predicate r = sym.builtin == Builtin::child_k ? Predicate::child_k(sym.k) : Predicate::of(sym.builtin);
                out.push_back({atom(state_pred[to], {"X"}),
                               {atom(state_pred[from], {"X0"}), atom(r, {"X0", "X"})}});
                break;
            }
            case NfaSymbol::Kind::axis_inv: {
                Predicate r = sym.builtin == Builtin::child_k ? Predicate::child_k(sym.k) : Predicate::of(sym.builtin);
                out.push_back({atom(state_pred[to], {"X"}),
                               {atom(state_pred[from], {"X0"}), atom(r, {"X", "X0"})}});
                break;
            }
            case NfaSymbol::Kind::test: {
                Predicate u = Predicate::of(sym.builtin);
                u.name = sym.label;
                out.push_back({atom(state_pred[to], {"X"}),
                               {atom(state_pred[from], {"X"}), atom(u, {"X"})}});
                break;
            }
        }
    }
    for (int f : nfa.finals)
        out.push_back({atom(target, {"X"}), {atom(state_pred[f], {"X"})}});
    return out;
}

// Lemma-style compilation of a caterpillar step: the returned rules define
// `target` as the image of p0 under the expression.
inline std::vector<Rule> caterpillar_to_tmnf(const Predicate& p0, const CatPtr& e, const Predicate& target,
                                             NameSupply& names) {
    return nfa_to_rules(thompson(e), p0, target, names);
}

}  // namespace treelog
