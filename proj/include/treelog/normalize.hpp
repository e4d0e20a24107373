#pragma once

// Rewriting monadic datalog over tau_ur + {child, lastchild} (or over
// child_k axes for ranked trees) into Tree-Marking Normal Form:
//   1. make rules acyclic by chasing the functional dependencies of the
//      tree axes (merging variables, dropping unsatisfiable rules),
//      eliminating child/lastchild in favor of nextsibling* steps;
//   2. connect disconnected rules with document-order caterpillar atoms;
//   3. decompose into rules with at most one binary atom and two body
//      atoms, then compile caterpillar atoms into state-marking rules.
// Dropped rules are reported as warnings naming the failing check.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "datalog.hpp"
#include "datalog_analysis.hpp"
#include "nfa.hpp"

namespace treelog {

struct Digraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

// A depth-index map assigns integers to vertices so that every edge goes
// from depth i to depth i+1. It exists iff all paths between any two
// vertices have equal length; in particular never on a directed cycle.
inline std::optional<std::vector<int>> depth_index(const Digraph& g) {
    std::vector<std::vector<std::pair<int, int>>> adj(g.n); // (neighbor, delta)
    for (auto [a, b] : g.edges) {
        if (a == b) return std::nullopt;
        adj[a].push_back({b, +1});
        adj[b].push_back({a, -1});
    }
    std::vector<int> d(g.n, 0);
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack;
    for (int s = 0; s < g.n; ++s) {
        if (seen[s]) continue;
        seen[s] = 1;
        d[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, delta] : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    d[w] = d[v] + delta;
                    stack.push_back(w);
                } else if (d[w] != d[v] + delta) {
                    return std::nullopt;
                }
            }
        }
    }
    return d;
}

namespace detail {

inline void rename_vars(Rule& r, const std::map<std::string, std::string>& subst) {
    auto ren = [&](std::vector<std::string>& vs) {
        for (auto& v : vs) {
            auto it = subst.find(v);
            if (it != subst.end()) v = it->second;
        }
    };
    ren(r.head.vars);
    for (auto& a : r.body) ren(a.vars);
    std::vector<Atom> dedup;
    for (auto& a : r.body) {
        bool seen = false;
        for (const auto& b : dedup) seen = seen || b == a;
        if (!seen) dedup.push_back(std::move(a));
    }
    r.body = std::move(dedup);
}

// Merge each group of variables into its lexicographically smallest member.
// Returns false when nothing changed.
inline bool merge_groups(Rule& r, const std::vector<std::vector<std::string>>& groups) {
    std::map<std::string, std::string> subst;
    for (const auto& g : groups) {
        if (g.size() < 2) continue;
        std::string rep = *std::min_element(g.begin(), g.end());
        for (const auto& v : g)
            if (v != rep) subst[v] = rep;
    }
    if (subst.empty()) return false;
    rename_vars(r, subst);
    return true;
}

struct VarIndex {
    std::vector<std::string> vars;
    std::map<std::string, int> index;
    explicit VarIndex(const Rule& r) {
        for (const auto& v : rule_vars(r)) {
            index.emplace(v, static_cast<int>(vars.size()));
            vars.push_back(v);
        }
    }
    int operator[](const std::string& v) const { return index.at(v); }
};

// Union-find based grouping helper.
struct Grouper {
    detail::UnionFind uf;
    const VarIndex& vi;
    Grouper(const VarIndex& vi) : uf(vi.vars.size()), vi(vi) {}
    void unite(const std::string& a, const std::string& b) { uf.unite(vi[a], vi[b]); }
    std::vector<std::vector<std::string>> groups() {
        std::map<int, std::vector<std::string>> by_root;
        for (std::size_t i = 0; i < vi.vars.size(); ++i)
            by_root[uf.find(static_cast<int>(i))].push_back(vi.vars[i]);
        std::vector<std::vector<std::string>> out;
        for (auto& [root, g] : by_root) out.push_back(std::move(g));
        return out;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------
// Acyclicity for ranked programs (child_k axes only among binary atoms).

inline std::optional<Rule> make_acyclic_ranked_rule(Rule r, std::string* reason) {
    for (;;) {
        detail::VarIndex vi(r);
        Digraph g{static_cast<int>(vi.vars.size()), {}};
        std::set<std::uint32_t> ks;
        for (const auto& a : r.body)
            if (a.pred.is_builtin(Builtin::child_k)) {
                g.edges.push_back({vi[a.vars[0]], vi[a.vars[1]]});
                ks.insert(a.pred.k);
            }
        auto d = depth_index(g);
        if (!d) {
            if (reason) *reason = "no depth-index map for the child_k structure";
            return std::nullopt;
        }
        // per k, per connected component of the child_k subgraph, merge
        // variables with equal depth-index
        bool merged = false;
        for (std::uint32_t k : ks) {
            detail::Grouper comp(vi);
            for (const auto& a : r.body)
                if (a.pred.is_builtin(Builtin::child_k) && a.pred.k == k) comp.unite(a.vars[0], a.vars[1]);
            std::map<std::pair<int, int>, std::vector<std::string>> cls; // (component, depth) -> vars
            for (const auto& v : vi.vars) {
                bool in_k = false;
                for (const auto& a : r.body)
                    if (a.pred.is_builtin(Builtin::child_k) && a.pred.k == k &&
                        (a.vars[0] == v || a.vars[1] == v))
                        in_k = true;
                if (in_k) cls[{comp.uf.find(vi[v]), (*d)[vi[v]]}].push_back(v);
            }
            std::vector<std::vector<std::string>> groups;
            for (auto& [key, g2] : cls) groups.push_back(std::move(g2));
            if (detail::merge_groups(r, groups)) {
                merged = true;
                break;
            }
        }
        if (!merged) break;
    }
    // a node is a k-th child for at most one k
    std::map<std::string, std::set<std::uint32_t>> in_k;
    for (const auto& a : r.body)
        if (a.pred.is_builtin(Builtin::child_k)) in_k[a.vars[1]].insert(a.pred.k);
    for (const auto& [v, ks] : in_k)
        if (ks.size() > 1) {
            if (reason) *reason = "variable " + v + " would be a k-th child for two different k";
            return std::nullopt;
        }
    if (!is_acyclic(r)) {
        if (reason) *reason = "query graph still cyclic after variable merging";
        return std::nullopt;
    }
    return r;
}

inline Program make_acyclic_ranked(const Program& p, std::vector<Diagnostic>* diags = nullptr) {
    Program out;
    out.queries = p.queries;
    for (const auto& r : p.rules) {
        for (const auto& a : r.body)
            if (a.vars.size() == 2 && !a.pred.is_builtin(Builtin::child_k))
                throw std::invalid_argument("ranked acyclicity pass expects child_k binary atoms only, got " +
                                            to_string(a));
        std::string reason;
        if (auto r2 = make_acyclic_ranked_rule(r, &reason)) {
            out.rules.push_back(std::move(*r2));
        } else if (diags) {
            diags->push_back({Diagnostic::Severity::warning, r.line,
                              "rule dropped as unsatisfiable (" + reason + "): " + to_string(r)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// Acyclicity for unranked programs over tau_ur + {child, lastchild}.

namespace detail {

// One fixpoint round of the functional-dependency merges:
//   (a) variables with children in a common nextsibling component share
//       their parent (child: $2 -> $1 coarsened to sibling groups)
//   (b) within a nextsibling component, equal-depth variables coincide
//       (nextsibling: $1 -> $2 and $2 -> $1); no depth map = unsatisfiable
//   (c) firstchild targets of one variable coincide ($1 -> $2)
// Returns: 0 no change, 1 merged something, -1 unsatisfiable.
inline int acyclic_unranked_round(Rule& r, std::string* reason) {
    detail::VarIndex vi(r);

    // nextsibling components
    detail::Grouper ns_comp(vi);
    for (const auto& a : r.body)
        if (a.pred.is_builtin(Builtin::nextsibling)) ns_comp.unite(a.vars[0], a.vars[1]);

    // coarsened child digraph must admit a depth-index map
    {
        Digraph g{static_cast<int>(vi.vars.size()), {}};
        for (const auto& a : r.body)
            if (a.pred.is_builtin(Builtin::firstchild) || a.pred.is_builtin(Builtin::child))
                g.edges.push_back({ns_comp.uf.find(vi[a.vars[0]]), ns_comp.uf.find(vi[a.vars[1]])});
        if (!depth_index(g)) {
            if (reason) *reason = "no depth-index map for the child structure";
            return -1;
        }
    }

    // (a) parent merging per sibling group
    {
        std::map<int, std::vector<std::string>> parents; // ns-component -> parent vars
        for (const auto& a : r.body)
            if (a.pred.is_builtin(Builtin::firstchild) || a.pred.is_builtin(Builtin::child))
                parents[ns_comp.uf.find(vi[a.vars[1]])].push_back(a.vars[0]);
        std::vector<std::vector<std::string>> groups;
        for (auto& [c, g] : parents) groups.push_back(std::move(g));
        if (detail::merge_groups(r, groups)) return 1;
    }

    // (b) nextsibling depth merging per component
    {
        std::map<int, std::vector<int>> members;
        for (std::size_t i = 0; i < vi.vars.size(); ++i)
            members[ns_comp.uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
        for (auto& [root, vs] : members) {
            if (vs.size() < 2) continue;
            std::map<int, int> local;
            for (int v : vs) local.emplace(v, static_cast<int>(local.size()));
            Digraph g{static_cast<int>(local.size()), {}};
            for (const auto& a : r.body)
                if (a.pred.is_builtin(Builtin::nextsibling)) {
                    int x = vi[a.vars[0]], y = vi[a.vars[1]];
                    if (local.count(x) && local.count(y)) g.edges.push_back({local[x], local[y]});
                }
            auto d = depth_index(g);
            if (!d) {
                if (reason) *reason = "sibling chain admits no depth-index map";
                return -1;
            }
            std::map<int, std::vector<std::string>> by_depth;
            for (int v : vs) by_depth[(*d)[local[v]]].push_back(vi.vars[v]);
            std::vector<std::vector<std::string>> groups;
            for (auto& [depth, g2] : by_depth) groups.push_back(std::move(g2));
            if (detail::merge_groups(r, groups)) return 1;
        }
    }

    // (c) firstchild target merging
    {
        std::map<std::string, std::vector<std::string>> targets;
        for (const auto& a : r.body)
            if (a.pred.is_builtin(Builtin::firstchild)) targets[a.vars[0]].push_back(a.vars[1]);
        std::vector<std::vector<std::string>> groups;
        for (auto& [x, g] : targets) groups.push_back(std::move(g));
        if (detail::merge_groups(r, groups)) return 1;
    }
    return 0;
}

}  // namespace detail

inline std::optional<Rule> make_acyclic_unranked_rule(Rule r, std::string* reason) {
    // lastchild(x,y) = child(x,y), lastsibling(y)
    {
        std::vector<Atom> body;
        for (auto& a : r.body) {
            if (a.pred.is_builtin(Builtin::lastchild)) {
                body.push_back(atom(Predicate::of(Builtin::child), {a.vars[0], a.vars[1]}));
                body.push_back(atom(Predicate::of(Builtin::lastsibling), {a.vars[1]}));
            } else {
                body.push_back(std::move(a));
            }
        }
        r.body = std::move(body);
    }

    for (;;) {
        int rc = detail::acyclic_unranked_round(r, reason);
        if (rc < 0) return std::nullopt;
        if (rc == 0) break;
    }

    // replace residual child atoms by firstchild + nextsibling* steps,
    // one representative per sibling group
    detail::VarIndex vi(r);
    detail::Grouper ns_comp(vi);
    for (const auto& a : r.body)
        if (a.pred.is_builtin(Builtin::nextsibling)) ns_comp.unite(a.vars[0], a.vars[1]);

    struct Link {
        std::string parent;
        std::vector<std::string> targets;   // child(x,y) targets in the component
        bool has_firstchild_into = false;   // firstchild(x,z) with z in the component
    };
    std::map<int, Link> links; // ns-component of y -> link info
    for (const auto& a : r.body) {
        if (a.pred.is_builtin(Builtin::child))
            links[ns_comp.uf.find(vi[a.vars[1]])].targets.push_back(a.vars[1]);
        if (a.pred.is_builtin(Builtin::child) || a.pred.is_builtin(Builtin::firstchild))
            links[ns_comp.uf.find(vi[a.vars[1]])].parent = a.vars[0];
    }
    for (const auto& a : r.body)
        if (a.pred.is_builtin(Builtin::firstchild))
            links[ns_comp.uf.find(vi[a.vars[1]])].has_firstchild_into = true;

    static const CatPtr ns_star = cat::star(cat::axis(Builtin::nextsibling));
    std::set<std::string> used = rule_vars(r);
    std::vector<Atom> extra;
    for (auto& [c, link] : links) {
        if (link.targets.empty() || link.has_firstchild_into) continue;
        std::string y = *std::min_element(link.targets.begin(), link.targets.end());
        // reuse the (unique, after merging) firstchild atom of the parent
        std::string y0;
        for (const auto& a : r.body)
            if (a.pred.is_builtin(Builtin::firstchild) && a.vars[0] == link.parent) y0 = a.vars[1];
        for (const auto& a : extra)
            if (a.pred.is_builtin(Builtin::firstchild) && a.vars[0] == link.parent) y0 = a.vars[1];
        if (y0.empty()) {
            y0 = fresh_var(used);
            extra.push_back(atom(Predicate::of(Builtin::firstchild), {link.parent, y0}));
        }
        extra.push_back(atom(Predicate::caterpillar(ns_star), {y0, y}));
    }
    std::vector<Atom> body;
    for (auto& a : r.body)
        if (!a.pred.is_builtin(Builtin::child)) body.push_back(std::move(a));
    for (auto& a : extra) body.push_back(std::move(a));
    r.body = std::move(body);

    if (r.body.empty()) {
        // all atoms were child atoms whose constraints merged away; the
        // head variable must still be bound somewhere
        if (reason) *reason = "rule body vanished during rewriting";
        return std::nullopt;
    }
    if (!is_acyclic(r)) throw std::logic_error("internal: rule not acyclic after rewriting: " + to_string(r));
    return r;
}

inline Program make_acyclic_unranked(const Program& p, std::vector<Diagnostic>* diags = nullptr) {
    Program out;
    out.queries = p.queries;
    for (const auto& r : p.rules) {
        std::string reason;
        if (auto r2 = make_acyclic_unranked_rule(r, &reason)) {
            out.rules.push_back(std::move(*r2));
        } else if (diags) {
            diags->push_back({Diagnostic::Severity::warning, r.line,
                              "rule dropped as unsatisfiable (" + reason + "): " + to_string(r)});
        }
    }
    return out;
}

// child_k(x,y) over unranked trees unfolds to a firstchild step and k-1
// nextsibling steps.
inline Program expand_child_k_unranked(const Program& p) {
    Program out;
    out.queries = p.queries;
    for (const auto& r : p.rules) {
        Rule r2;
        r2.head = r.head;
        r2.line = r.line;
        std::set<std::string> used = rule_vars(r);
        for (const auto& a : r.body) {
            if (!a.pred.is_builtin(Builtin::child_k)) {
                r2.body.push_back(a);
                continue;
            }
            std::string cur = a.vars[0];
            for (std::uint32_t i = 1; i < a.pred.k; ++i) {
                std::string nxt = fresh_var(used);
                r2.body.push_back(atom(i == 1 ? Predicate::of(Builtin::firstchild) : Predicate::of(Builtin::nextsibling),
                                       {cur, nxt}));
                cur = nxt;
            }
            r2.body.push_back(atom(a.pred.k == 1 ? Predicate::of(Builtin::firstchild) : Predicate::of(Builtin::nextsibling),
                                   {cur, a.vars[1]}));
        }
        out.rules.push_back(std::move(r2));
    }
    return out;
}

// ---------------------------------------------------------------------
// Connecting disconnected rules with document order.

// (doc-order | eps | doc-order^-1): the total relation on dom.
inline CatPtr doc_order_link_expr() {
    static const CatPtr e = [] {
        auto prec = cat::document_order();
        return cat::alt({prec, cat::epsilon(), cat::inverse(prec)});
    }();
    return e;
}

// Ranked variant built from child_k axes, for alphabets of maximum rank K.
inline CatPtr doc_order_link_expr_ranked(std::uint32_t max_rank) {
    std::vector<CatPtr> kids;
    for (std::uint32_t k = 1; k <= std::max<std::uint32_t>(max_rank, 1); ++k)
        kids.push_back(cat::axis(Builtin::child_k, k));
    CatPtr child = cat::alt(kids);
    std::vector<CatPtr> sibs;
    for (std::uint32_t k = 1; k < std::max<std::uint32_t>(max_rank, 1); ++k)
        sibs.push_back(cat::concat({cat::inverse(cat::axis(Builtin::child_k, k)), cat::axis(Builtin::child_k, k + 1)}));
    if (sibs.empty()) sibs.push_back(cat::concat({cat::inverse(child), child})); // K = 1: siblings do not exist
    CatPtr ns = cat::alt(sibs);
    CatPtr prec = cat::alt({cat::plus(child), cat::concat({cat::star(cat::inverse(child)), cat::plus(ns), cat::star(child)})});
    return cat::alt({prec, cat::epsilon(), cat::inverse(prec)});
}

inline Program connect_with_doc_order(const Program& p, CatPtr link = nullptr) {
    if (!link) link = doc_order_link_expr();
    Program out;
    out.queries = p.queries;
    for (const auto& r : p.rules) {
        if (is_connected(r)) {
            out.rules.push_back(r);
            continue;
        }
        QueryGraph g = query_graph(r);
        detail::UnionFind uf(g.vars.size());
        for (auto [a, b] : g.edges) uf.unite(a, b);
        // representative (smallest var) per component; head component first
        std::map<int, std::string> rep;
        for (std::size_t i = 0; i < g.vars.size(); ++i) {
            int c = uf.find(static_cast<int>(i));
            auto it = rep.find(c);
            if (it == rep.end() || g.vars[i] < it->second) rep[c] = g.vars[i];
        }
        if (r.head.vars.empty()) throw std::logic_error("doc-order connection requires a head variable");
        int head_comp = uf.find(g.vertex(r.head.vars[0]));
        std::vector<std::string> chain = {rep[head_comp]};
        for (auto& [c, v] : rep)
            if (c != head_comp) chain.push_back(v);
        Rule r2 = r;
        for (std::size_t i = 0; i + 1 < chain.size(); ++i)
            r2.body.push_back(atom(Predicate::caterpillar(link), {chain[i], chain[i + 1]}));
        out.rules.push_back(std::move(r2));
    }
    return out;
}

// ---------------------------------------------------------------------
// Decomposition (ear elimination) and caterpillar elimination.

namespace detail {

struct DomPattern {
    Predicate pred;
    bool emitted = false;
};

// Rules making $dom hold of every node.
inline void ensure_dom(DomPattern& dom, NameSupply& names, std::vector<Rule>& out) {
    if (dom.emitted) return;
    dom.pred = Predicate::intensional(names.fresh("dom"));
    out.push_back({atom(dom.pred, {"X"}), {atom(Predicate::of(Builtin::root), {"X"})}});
    out.push_back({atom(dom.pred, {"X"}),
                   {atom(dom.pred, {"X0"}), atom(Predicate::of(Builtin::firstchild), {"X0", "X"})}});
    out.push_back({atom(dom.pred, {"X"}),
                   {atom(dom.pred, {"X0"}), atom(Predicate::of(Builtin::nextsibling), {"X0", "X"})}});
    dom.emitted = true;
}

// Fold unary atoms over one variable into a single predicate, emitting
// chain rules p'(x) <- a(x), b(x).
inline Predicate fold_unaries(const std::vector<Atom>& atoms, const std::string& var, NameSupply& names,
                              std::vector<Rule>& out) {
    Predicate cur = atoms[0].pred;
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        Predicate next = Predicate::intensional(names.fresh("u"));
        out.push_back({atom(next, {var}), {atom(cur, {var}), atom(atoms[i].pred, {var})}});
        cur = next;
    }
    return cur;
}

// Emit rules for `target(to) <- p0(from), step(from,to)` where step is a
// single binary atom, possibly caterpillar (then compiled via its NFA).
inline void emit_step_rule(const Predicate& target, const Predicate& p0, const Atom& bin,
                           const std::string& ear, NameSupply& names, std::vector<Rule>& out) {
    bool forward = bin.vars[0] == ear; // expression read from the ear outward
    if (bin.pred.kind == Predicate::Kind::caterpillar) {
        CatPtr e = forward ? bin.pred.expr : cat::inverse(bin.pred.expr);
        auto rules = caterpillar_to_tmnf(p0, e, target, names);
        out.insert(out.end(), rules.begin(), rules.end());
        return;
    }
    std::string other = forward ? bin.vars[1] : bin.vars[0];
    Rule r;
    r.head = atom(target, {"X"});
    std::map<std::string, std::string> names_map{{ear, "X0"}, {other, "X"}};
    Atom b = bin;
    for (auto& v : b.vars) v = names_map[v];
    r.body = {atom(p0, {"X0"}), std::move(b)};
    out.push_back(std::move(r));
}

}  // namespace detail

// Decomposes a connected acyclic rule. With `to_forms` set the output
// matches the three normal-form shapes exactly; otherwise ear rules keep
// their unary atoms inline (sufficient for grounding) and only
// caterpillar steps are compiled away.
inline void decompose_rule(Rule r, NameSupply& names, detail::DomPattern& dom, bool to_forms,
                           std::vector<Rule>& out) {
    const std::string head_var = r.head.vars.empty() ? std::string() : r.head.vars[0];
    for (;;) {
        // find an ear: a variable (not the head variable) in exactly one
        // binary atom
        std::map<std::string, std::vector<std::size_t>> bin_at;
        for (std::size_t i = 0; i < r.body.size(); ++i)
            if (r.body[i].vars.size() == 2)
                for (const auto& v : r.body[i].vars) bin_at[v].push_back(i);
        std::string ear;
        for (auto& [v, occ] : bin_at)
            if (v != head_var && occ.size() == 1) {
                ear = v;
                break;
            }
        if (ear.empty()) break;

        std::size_t bin_idx = bin_at[ear][0];
        Atom bin = r.body[bin_idx];
        std::vector<Atom> unaries;
        std::vector<Atom> rest;
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            const Atom& a = r.body[i];
            if (i != bin_idx && a.vars.size() == 1 && a.vars[0] == ear)
                unaries.push_back(a);
            else if (i != bin_idx)
                rest.push_back(a);
        }
        std::string other = bin.vars[0] == ear ? bin.vars[1] : bin.vars[0];
        Predicate target = Predicate::intensional(names.fresh("e"));
        bool needs_fold = to_forms || bin.pred.kind == Predicate::Kind::caterpillar;
        if (!needs_fold) {
            Rule ear_rule;
            ear_rule.head = atom(target, {other});
            ear_rule.body = std::move(unaries);
            ear_rule.body.push_back(bin);
            out.push_back(std::move(ear_rule));
        } else {
            Predicate p0;
            if (unaries.empty()) {
                detail::ensure_dom(dom, names, out);
                p0 = dom.pred;
            } else {
                p0 = detail::fold_unaries(unaries, "X", names, out);
            }
            detail::emit_step_rule(target, p0, bin, ear, names, out);
        }
        rest.push_back(atom(target, {other}));
        r.body = std::move(rest);
    }

    if (!to_forms) {
        out.push_back(std::move(r));
        return;
    }
    // residual: unary atoms, all over the head variable
    if (r.body.size() <= 2) {
        out.push_back(std::move(r));
        return;
    }
    Predicate cur = r.body[0].pred;
    for (std::size_t i = 1; i + 1 < r.body.size(); ++i) {
        Predicate next = Predicate::intensional(names.fresh("c"));
        out.push_back({atom(next, {head_var}), {atom(cur, {head_var}), atom(r.body[i].pred, {head_var})}});
        cur = next;
    }
    out.push_back({r.head, {atom(cur, {head_var}), atom(r.body.back().pred, {head_var})}});
}

inline Program decompose(const Program& p, bool to_forms = true) {
    NameSupply names(p);
    detail::DomPattern dom;
    Program out;
    out.queries = p.queries;
    for (const auto& r : p.rules) decompose_rule(r, names, dom, to_forms, out.rules);
    return out;
}

// ---------------------------------------------------------------------
// The complete pipeline.

enum class TmnfStage { acyclic, connect, decompose, full };

struct TmnfOptions {
    bool ranked = false;
    std::uint32_t max_rank = 0; // 0: derive from the program's child_k atoms
    TmnfStage stop_after = TmnfStage::full;
};

inline Program to_tmnf(const Program& p, const TmnfOptions& opts = {}, std::vector<Diagnostic>* diags = nullptr) {
    Program q;
    CatPtr link;
    if (opts.ranked) {
        std::uint32_t K = opts.max_rank;
        if (K == 0)
            for (const auto& r : p.rules)
                for (const auto& a : r.body)
                    if (a.pred.is_builtin(Builtin::child_k)) K = std::max(K, a.pred.k);
        q = make_acyclic_ranked(p, diags);
        link = doc_order_link_expr_ranked(K);
    } else {
        q = make_acyclic_unranked(expand_child_k_unranked(p), diags);
        link = doc_order_link_expr();
    }
    if (opts.stop_after == TmnfStage::acyclic) return q;
    q = connect_with_doc_order(q, link);
    if (opts.stop_after == TmnfStage::connect) return q;
    q = decompose(q, /*to_forms=*/true);
    return q;
}

}  // namespace treelog
