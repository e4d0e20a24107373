#pragma once

// Static checks over programs and the structural predicates the rewriting
// passes rely on: rule query graphs, connectedness, (multigraph)
// acyclicity, and the TMNF shape test.

#include <map>
#include <string>
#include <vector>

#include "datalog.hpp"

namespace treelog {

struct Diagnostic {
    enum class Severity { error, warning } severity;
    int line;
    std::string message;
};

inline std::string to_string(const Diagnostic& d) {
    return "line " + std::to_string(d.line) + ": " +
           (d.severity == Diagnostic::Severity::error ? "error: " : "warning: ") + d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Diagnostic::Severity::error) return true;
    return false;
}

inline std::vector<Diagnostic> validate(const Program& p) {
    std::vector<Diagnostic> out;
    std::set<std::string> defined;
    for (const auto& r : p.rules)
        if (r.head.pred.kind != Predicate::Kind::builtin) defined.insert(r.head.pred.name);
    std::set<std::string> reported_undefined;
    for (const auto& r : p.rules) {
        auto err = [&](std::string m) { out.push_back({Diagnostic::Severity::error, r.line, std::move(m)}); };
        auto warn = [&](std::string m) { out.push_back({Diagnostic::Severity::warning, r.line, std::move(m)}); };
        if (r.head.pred.kind == Predicate::Kind::intensional && r.head.vars.size() != 1)
            err("intensional head predicates must be unary (monadicity)");
        if (r.head.pred.kind == Predicate::Kind::builtin || r.head.pred.kind == Predicate::Kind::caterpillar)
            err("rule head must be intensional");
        if (r.body.empty()) err("rule body must be nonempty");
        std::set<std::string> body_vars;
        for (const auto& a : r.body) {
            if (a.vars.size() != static_cast<std::size_t>(a.pred.arity()))
                err("arity mismatch in atom " + to_string(a));
            body_vars.insert(a.vars.begin(), a.vars.end());
            if (a.pred.kind == Predicate::Kind::intensional && !defined.count(a.pred.name) &&
                reported_undefined.insert(a.pred.name).second)
                warn("predicate '" + a.pred.name + "' has no defining rule (empty extension)");
        }
        for (const auto& v : r.head.vars)
            if (!body_vars.count(v)) err("unsafe rule: head variable " + v + " does not occur in the body");
    }
    return out;
}

// Query graph of a rule: one edge per binary body atom occurrence, over
// all variables of the rule (variables occurring only in unary atoms are
// isolated vertices).
struct QueryGraph {
    std::vector<std::string> vars;
    std::map<std::string, int> index;
    std::vector<std::pair<int, int>> edges; // parallel edges and loops kept

    int vertex(const std::string& v) const { return index.at(v); }
};

inline QueryGraph query_graph(const Rule& r) {
    QueryGraph g;
    for (const auto& v : rule_vars(r)) {
        g.index.emplace(v, static_cast<int>(g.vars.size()));
        g.vars.push_back(v);
    }
    for (const auto& a : r.body)
        if (a.vars.size() == 2) g.edges.emplace_back(g.index[a.vars[0]], g.index[a.vars[1]]);
    return g;
}

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<int>(i);
    }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    // returns false when already united
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        return true;
    }

private:
    std::vector<int> parent_;
};

}  // namespace detail

// A multigraph is a forest iff every edge joins two previously separate
// components; loops and parallel edges are cycles.
inline bool is_acyclic(const Rule& r) {
    QueryGraph g = query_graph(r);
    detail::UnionFind uf(g.vars.size());
    for (auto [a, b] : g.edges)
        if (a == b || !uf.unite(a, b)) return false;
    return true;
}

inline bool is_connected(const Rule& r) {
    QueryGraph g = query_graph(r);
    if (g.vars.empty()) return true;
    detail::UnionFind uf(g.vars.size());
    std::size_t components = g.vars.size();
    for (auto [a, b] : g.edges)
        if (uf.unite(a, b)) --components;
    return components == 1;
}

// TMNF: every rule is one of
//   (1) p(x) <- p0(x)
//   (2) p(x) <- p0(x0), B(x0,x)   with B a binary signature relation,
//       written forward or inverted
//   (3) p(x) <- p0(x), p1(x)
// where p0, p1 are intensional or unary signature predicates.
inline bool tmnf_rule(const Rule& r) {
    if (r.head.pred.kind != Predicate::Kind::intensional || r.head.vars.size() != 1) return false;
    const std::string& x = r.head.vars[0];
    auto unary_ok = [](const Atom& a) {
        return a.vars.size() == 1 &&
               (a.pred.kind == Predicate::Kind::intensional ||
                (a.pred.kind == Predicate::Kind::builtin && builtin_arity(a.pred.builtin) == 1));
    };
    auto axis_ok = [](const Atom& a) {
        return a.pred.kind == Predicate::Kind::builtin &&
               (a.pred.builtin == Builtin::firstchild || a.pred.builtin == Builtin::nextsibling ||
                a.pred.builtin == Builtin::child_k);
    };
    if (r.body.size() == 1) return unary_ok(r.body[0]) && r.body[0].vars[0] == x;
    if (r.body.size() != 2) return false;
    const Atom& a0 = r.body[0];
    const Atom& a1 = r.body[1];
    if (unary_ok(a0) && unary_ok(a1)) return a0.vars[0] == x && a1.vars[0] == x; // form (3)
    const Atom* un = unary_ok(a0) ? &a0 : unary_ok(a1) ? &a1 : nullptr;
    const Atom* bin = axis_ok(a0) ? &a0 : axis_ok(a1) ? &a1 : nullptr;
    if (!un || !bin || un == bin) return false;
    const std::string& x0 = un->vars[0];
    if (x0 == x) return false;
    return (bin->vars[0] == x0 && bin->vars[1] == x) || (bin->vars[0] == x && bin->vars[1] == x0);
}

// True iff every rule is in TMNF; otherwise also reports the first
// offending rule.
inline bool is_tmnf(const Program& p, const Rule** offending = nullptr) {
    for (const auto& r : p.rules)
        if (!tmnf_rule(r)) {
            if (offending) *offending = &r;
            return false;
        }
    if (offending) *offending = nullptr;
    return true;
}

}  // namespace treelog
