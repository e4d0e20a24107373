#pragma once

// The linear-time evaluation pipeline: split rules into connected parts
// (fresh propositional predicates), ground each connected rule by
// propagating the bidirectional functional dependencies of the tree axes
// from a root variable, then close the resulting propositional Horn
// instance by counter-based unit propagation.
//
// Grounding accepts the bidirectionally functional binary relations
// (firstchild, nextsibling, child_k, lastchild). Programs that navigate
// with `child` (not functional in its first coordinate) are rewritten by
// the acyclicity passes first; the nextsibling* caterpillar atoms these
// introduce are split off and compiled into state-marking rules.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "datalog.hpp"
#include "datalog_analysis.hpp"
#include "normalize.hpp"
#include "tree.hpp"

namespace treelog {

// --------------------------------------------------------------------
// Step 1: connected rules.

inline Program connect_rules(const Program& p) {
    NameSupply names(p);
    Program out;
    out.queries = p.queries;
    for (const auto& r : p.rules) {
        QueryGraph g = query_graph(r);
        detail::UnionFind uf(g.vars.size());
        for (auto [a, b] : g.edges) uf.unite(a, b);
        std::set<int> comps;
        for (std::size_t i = 0; i < g.vars.size(); ++i) comps.insert(uf.find(static_cast<int>(i)));
        int head_comp = r.head.vars.empty() ? -1 : uf.find(g.vertex(r.head.vars[0]));
        if (comps.size() <= 1 || (head_comp == -1 && comps.size() == 1)) {
            out.rules.push_back(r);
            continue;
        }
        // head component (or an arbitrary first component for propositional
        // heads) stays; every other component becomes a propositional rule
        int keep = head_comp != -1 ? head_comp : *comps.begin();
        std::map<int, std::vector<Atom>> split;
        Rule main;
        main.head = r.head;
        main.line = r.line;
        for (const auto& a : r.body) {
            if (a.vars.empty()) {
                main.body.push_back(a); // propositional atoms stay with the main rule
                continue;
            }
            int c = uf.find(g.vertex(a.vars[0]));
            if (c == keep)
                main.body.push_back(a);
            else
                split[c].push_back(a);
        }
        for (auto& [c, atoms] : split) {
            Predicate b = Predicate::propositional(names.fresh("b"));
            out.rules.push_back({atom(b, {}), std::move(atoms), r.line});
            main.body.push_back(atom(b, {}));
        }
        out.rules.push_back(std::move(main));
    }
    return out;
}

// --------------------------------------------------------------------
// Step 2: grounding.

// Interned ground atoms: id = pred * (dom+1) + node + 1, propositional
// atoms use node slot 0.
struct HornInstance {
    using AtomId = std::uint64_t;

    NodeId dom = 0;
    std::vector<std::string> preds;        // intensional + propositional names
    std::map<std::string, int> pred_index;

    std::vector<AtomId> facts;
    std::vector<AtomId> heads;             // per clause
    std::vector<std::uint32_t> body_begin; // per clause, into body
    std::vector<AtomId> body;

    AtomId atom_count() const { return AtomId(preds.size()) * (AtomId(dom) + 1); }
    std::size_t clause_count() const { return heads.size(); }

    int pred(const std::string& name) {
        auto it = pred_index.find(name);
        if (it != pred_index.end()) return it->second;
        int id = static_cast<int>(preds.size());
        preds.push_back(name);
        pred_index.emplace(name, id);
        return id;
    }
    AtomId unary_atom(int pred, NodeId n) const { return AtomId(pred) * (AtomId(dom) + 1) + n + 1; }
    AtomId prop_atom(int pred) const { return AtomId(pred) * (AtomId(dom) + 1); }

    void add_clause(AtomId head, const std::vector<AtomId>& b) {
        if (b.empty()) {
            facts.push_back(head);
            return;
        }
        heads.push_back(head);
        body_begin.push_back(static_cast<std::uint32_t>(body.size()));
        body.insert(body.end(), b.begin(), b.end());
    }
};

namespace detail {

inline bool eval_unary_builtin(const Tree& t, const Predicate& p, NodeId n) {
    switch (p.builtin) {
        case Builtin::root: return t.is_root(n);
        case Builtin::leaf: return t.is_leaf(n);
        case Builtin::lastsibling: return t.is_last_sibling(n);
        case Builtin::firstsibling: return t.is_first_sibling(n);
        case Builtin::label: return t.has_label(n, p.name);
        case Builtin::not_label: return !t.has_label(n, p.name);
        default: throw std::logic_error("not unary");
    }
}

inline bool eval_binary_builtin(const Tree& t, const Predicate& p, NodeId u, NodeId v) {
    switch (p.builtin) {
        case Builtin::firstchild: return t.firstchild(u, v);
        case Builtin::nextsibling: return t.nextsibling(u, v);
        case Builtin::child: return t.child(u, v);
        case Builtin::lastchild: return t.lastchild(u, v);
        case Builtin::child_k: return t.child_k(u, v, p.k);
        default: throw std::logic_error("not binary");
    }
}

// Forward image under a bidirectionally functional axis, no_node if none.
inline NodeId axis_forward(const Tree& t, const Predicate& p, NodeId u) {
    switch (p.builtin) {
        case Builtin::firstchild: return t.first_child(u);
        case Builtin::nextsibling: return t.next_sibling(u);
        case Builtin::lastchild: return t.last_child(u);
        case Builtin::child_k: return t.nth_child(u, p.k);
        default: throw std::logic_error("axis not functional in coordinate 1: " + std::string(builtin_name(p.builtin)));
    }
}

inline NodeId axis_backward(const Tree& t, const Predicate& p, NodeId v) {
    switch (p.builtin) {
        case Builtin::firstchild: return t.is_first_sibling(v) ? t.parent(v) : no_node;
        case Builtin::nextsibling: return t.prev_sibling(v);
        case Builtin::lastchild: return t.is_last_sibling(v) ? t.parent(v) : no_node;
        case Builtin::child_k: return t.child_index(v) == p.k && t.parent(v) != no_node ? t.parent(v) : no_node;
        default: throw std::logic_error("axis not functional in coordinate 2");
    }
}

inline bool groundable_axis(const Predicate& p) {
    return p.kind == Predicate::Kind::builtin &&
           (p.builtin == Builtin::firstchild || p.builtin == Builtin::nextsibling ||
            p.builtin == Builtin::lastchild || p.builtin == Builtin::child_k);
}

}  // namespace detail

// Grounds one connected rule: assign each node to a root variable and
// propagate forced values along a spanning tree of the query graph; all
// remaining atoms are checked (extensional) or emitted (intensional).
inline void ground_rule(const Rule& r, const Tree& t, HornInstance& inst) {
    struct VarInfo {
        std::string name;
    };
    std::vector<std::string> vars;
    std::map<std::string, int> vid;
    for (const auto& v : rule_vars(r)) {
        vid.emplace(v, static_cast<int>(vars.size()));
        vars.push_back(v);
    }

    for (const auto& a : r.body)
        if (a.vars.size() == 2) {
            if (a.pred.kind == Predicate::Kind::caterpillar)
                throw std::invalid_argument("caterpillar atom reached grounding: " + to_string(a));
            if (!detail::groundable_axis(a.pred))
                throw std::invalid_argument(
                    "atom " + to_string(a) +
                    " is not functional in both coordinates; normalize the program first");
        }

    // spanning tree via BFS over binary atoms, rooted at the first
    // variable of the first binary atom (the guard when there is one)
    int root = 0;
    for (const auto& a : r.body)
        if (a.vars.size() == 2) {
            root = vid[a.vars[0]];
            break;
        }
    struct Step {
        int from, to;
        const Atom* via;
        bool forward; // via binds (from,to) as written
    };
    std::vector<Step> plan;
    std::vector<char> reached(vars.size(), 0);
    reached[root] = 1;
    std::vector<int> frontier = {root};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int v : frontier) {
            for (const auto& a : r.body) {
                if (a.vars.size() != 2) continue;
                int x = vid[a.vars[0]], y = vid[a.vars[1]];
                if (x == v && !reached[y]) {
                    reached[y] = 1;
                    plan.push_back({x, y, &a, true});
                    next.push_back(y);
                } else if (y == v && !reached[x]) {
                    reached[x] = 1;
                    plan.push_back({y, x, &a, false});
                    next.push_back(x);
                }
            }
        }
        frontier = std::move(next);
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (!reached[i] && !vars.empty())
            throw std::invalid_argument("rule is not connected: " + to_string(r));

    // precompute per-atom ground actions
    std::vector<NodeId> val(vars.size(), no_node);
    std::vector<HornInstance::AtomId> clause_body;
    auto instantiate = [&](NodeId seed) {
        val.assign(vars.size(), no_node);
        if (!vars.empty()) val[root] = seed;
        for (const auto& s : plan) {
            NodeId from = val[s.from];
            NodeId to = s.forward ? detail::axis_forward(t, s.via->pred, from)
                                  : detail::axis_backward(t, s.via->pred, from);
            if (to == no_node) return;
            val[s.to] = to;
        }
        clause_body.clear();
        for (const auto& a : r.body) {
            switch (a.pred.kind) {
                case Predicate::Kind::builtin:
                    if (a.vars.size() == 1) {
                        if (!detail::eval_unary_builtin(t, a.pred, val[vid[a.vars[0]]])) return;
                    } else {
                        if (!detail::eval_binary_builtin(t, a.pred, val[vid[a.vars[0]]], val[vid[a.vars[1]]]))
                            return;
                    }
                    break;
                case Predicate::Kind::intensional:
                    clause_body.push_back(inst.unary_atom(inst.pred(a.pred.name), val[vid[a.vars[0]]]));
                    break;
                case Predicate::Kind::propositional:
                    clause_body.push_back(inst.prop_atom(inst.pred(a.pred.name)));
                    break;
                case Predicate::Kind::caterpillar:
                    throw std::logic_error("unreachable");
            }
        }
        // coinciding ground atoms would double-count in unit propagation
        std::sort(clause_body.begin(), clause_body.end());
        clause_body.erase(std::unique(clause_body.begin(), clause_body.end()), clause_body.end());
        HornInstance::AtomId head = r.head.vars.empty()
                                        ? inst.prop_atom(inst.pred(r.head.pred.name))
                                        : inst.unary_atom(inst.pred(r.head.pred.name), val[vid[r.head.vars[0]]]);
        inst.add_clause(head, clause_body);
    };

    if (vars.empty()) {
        instantiate(0);
    } else {
        for (NodeId n = 0; n < t.node_count(); ++n) instantiate(n);
    }
}

inline HornInstance ground(const Program& p, const Tree& t) {
    HornInstance inst;
    inst.dom = t.node_count();
    for (const auto& r : p.rules) {
        // register head predicates up front so empty extensions exist
        inst.pred(r.head.pred.name);
        ground_rule(r, t, inst);
    }
    return inst;
}

// --------------------------------------------------------------------
// Step 3: Horn closure by unit propagation.

inline std::vector<char> horn_fixpoint(const HornInstance& inst) {
    const auto atoms = inst.atom_count();
    std::vector<char> truth(atoms, 0);
    const std::size_t clauses = inst.clause_count();
    std::vector<std::uint32_t> remaining(clauses);

    // occurrence lists in CSR form
    std::vector<std::uint32_t> occ_begin(atoms + 1, 0);
    for (auto a : inst.body) ++occ_begin[a + 1];
    for (std::size_t i = 1; i <= atoms; ++i) occ_begin[i] += occ_begin[i - 1];
    std::vector<std::uint32_t> occ(inst.body.size());
    {
        std::vector<std::uint32_t> cursor(occ_begin.begin(), occ_begin.end() - 1);
        for (std::size_t c = 0; c < clauses; ++c) {
            std::uint32_t b = inst.body_begin[c];
            std::uint32_t e = c + 1 < clauses ? inst.body_begin[c + 1] : static_cast<std::uint32_t>(inst.body.size());
            remaining[c] = e - b;
            for (std::uint32_t i = b; i < e; ++i) occ[cursor[inst.body[i]]++] = static_cast<std::uint32_t>(c);
        }
    }

    std::vector<HornInstance::AtomId> work(inst.facts.begin(), inst.facts.end());
    while (!work.empty()) {
        auto a = work.back();
        work.pop_back();
        if (truth[a]) continue;
        truth[a] = 1;
        for (std::uint32_t i = occ_begin[a]; i < occ_begin[a + 1]; ++i) {
            std::uint32_t c = occ[i];
            if (remaining[c] > 0 && --remaining[c] == 0) {
                auto h = inst.heads[c];
                if (!truth[h]) work.push_back(h);
            }
        }
    }
    return truth;
}

// --------------------------------------------------------------------
// End-to-end evaluation.

namespace detail {

// Rewrites a program into groundable form: eliminate child/lastchild via
// the acyclicity passes, split disconnected rules, and compile away the
// nextsibling* caterpillar atoms the elimination introduces.
inline Program prepare_for_grounding(const Program& p, std::vector<Diagnostic>* diags = nullptr) {
    Program q = p;
    if (q.mentions(Builtin::child) || q.mentions(Builtin::lastchild))
        q = make_acyclic_unranked(q, diags);
    q = connect_rules(q);
    if (!q.has_caterpillar_atoms()) return q;
    NameSupply names(q);
    DomPattern dom;
    Program out;
    out.queries = q.queries;
    for (const auto& r : q.rules) {
        bool has_cat = false;
        for (const auto& a : r.body) has_cat = has_cat || a.pred.kind == Predicate::Kind::caterpillar;
        if (has_cat)
            decompose_rule(r, names, dom, /*to_forms=*/false, out.rules);
        else
            out.rules.push_back(r);
    }
    return out;
}

}  // namespace detail

// Extensions of every intensional predicate of `p` (fresh helper
// predicates introduced by the rewriting are omitted).
inline std::map<std::string, std::set<NodeId>> evaluate_all(const Program& p, const Tree& t,
                                                            std::vector<Diagnostic>* diags = nullptr) {
    auto ds = validate(p);
    if (has_errors(ds)) {
        std::string msg = "invalid program";
        for (const auto& d : ds) msg += "\n  " + to_string(d);
        throw std::invalid_argument(msg);
    }
    if (diags) diags->insert(diags->end(), ds.begin(), ds.end());

    Program q = detail::prepare_for_grounding(p, diags);
    HornInstance inst = ground(q, t);
    std::vector<char> truth = horn_fixpoint(inst);

    std::map<std::string, std::set<NodeId>> out;
    for (const auto& name : p.intensional_names()) out[name];
    for (const auto& r : p.rules)
        for (const auto& a : r.body)
            if (a.pred.kind == Predicate::Kind::intensional) out[a.pred.name];
    for (auto& [name, nodes] : out) {
        auto it = inst.pred_index.find(name);
        if (it == inst.pred_index.end()) continue;
        for (NodeId n = 0; n < t.node_count(); ++n)
            if (truth[inst.unary_atom(it->second, n)]) nodes.insert(n);
    }
    return out;
}

inline std::set<NodeId> evaluate(const Program& p, const Tree& t, const std::string& query,
                                 std::vector<Diagnostic>* diags = nullptr) {
    auto all = evaluate_all(p, t, diags);
    auto it = all.find(query);
    return it == all.end() ? std::set<NodeId>{} : it->second;
}

}  // namespace treelog
