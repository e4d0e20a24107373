#pragma once

// Reference semantics: the immediate consequence operator iterated to its
// fixpoint, enumerating all valuations of each rule per round. Slow by
// design; it exists to check the linear pipeline, so it shares no code
// with it. Handles the full signature including the derived child,
// lastchild and child_k relations, and caterpillar atoms (via the
// materialized relational semantics), so intermediate normalizer outputs
// can be checked too.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "caterpillar.hpp"
#include "datalog.hpp"
#include "errors.hpp"
#include "tree.hpp"

namespace treelog {

struct GroundFact {
    std::string pred; // display name, e.g. "label_a", "b0"
    std::vector<NodeId> nodes;

    bool operator<(const GroundFact& o) const { return std::tie(pred, nodes) < std::tie(o.pred, o.nodes); }
    bool operator==(const GroundFact& o) const { return pred == o.pred && nodes == o.nodes; }
};

inline std::string to_string(const GroundFact& f) {
    std::string out = f.pred + "(";
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(f.nodes[i]);
    }
    return out + ")";
}

struct NaiveResult {
    std::map<std::string, std::set<NodeId>> extents; // intensional predicates
    std::set<std::string> props;                     // derived propositional predicates
    std::vector<std::vector<GroundFact>> rounds;     // rounds[0] = extensional facts
};

struct NaiveOptions {
    NodeId node_cap = 5000;
};

namespace detail {

inline std::string display_name(const Predicate& p) {
    switch (p.kind) {
        case Predicate::Kind::builtin:
            if (p.builtin == Builtin::label) return "label_" + p.name;
            if (p.builtin == Builtin::not_label) return "not_label_" + p.name;
            if (p.builtin == Builtin::child_k) return "child_" + std::to_string(p.k);
            return std::string(builtin_name(p.builtin));
        case Predicate::Kind::caterpillar:
            return "$cat[" + to_string(*p.expr) + "]";
        default:
            return p.name;
    }
}

}  // namespace detail

inline NaiveResult naive_fixpoint(const Program& p, const Tree& t, const NaiveOptions& opts = {}) {
    if (t.node_count() > opts.node_cap)
        throw CapExceeded("naive evaluation capped at " + std::to_string(opts.node_cap) + " nodes");

    const NodeId dom = t.node_count();
    NaiveResult res;
    std::map<const CaterpillarExpr*, NodeRelation> cat_cache;

    auto cat_rel = [&](const CatPtr& e) -> const NodeRelation& {
        auto it = cat_cache.find(e.get());
        if (it == cat_cache.end()) it = cat_cache.emplace(e.get(), eval_caterpillar_relation(t, *e)).first;
        return it->second;
    };

    auto check = [&](const Atom& a, const std::map<std::string, NodeId>& env) -> bool {
        switch (a.pred.kind) {
            case Predicate::Kind::builtin: {
                if (a.vars.size() == 1) {
                    NodeId n = env.at(a.vars[0]);
                    switch (a.pred.builtin) {
                        case Builtin::root: return t.is_root(n);
                        case Builtin::leaf: return t.is_leaf(n);
                        case Builtin::lastsibling: return t.is_last_sibling(n);
                        case Builtin::firstsibling: return t.is_first_sibling(n);
                        case Builtin::label: return t.has_label(n, a.pred.name);
                        case Builtin::not_label: return !t.has_label(n, a.pred.name);
                        default: return false;
                    }
                }
                NodeId u = env.at(a.vars[0]), v = env.at(a.vars[1]);
                switch (a.pred.builtin) {
                    case Builtin::firstchild: return t.firstchild(u, v);
                    case Builtin::nextsibling: return t.nextsibling(u, v);
                    case Builtin::child: return t.child(u, v);
                    case Builtin::lastchild: return t.lastchild(u, v);
                    case Builtin::child_k: return t.child_k(u, v, a.pred.k);
                    default: return false;
                }
            }
            case Predicate::Kind::intensional:
                return res.extents[a.pred.name].count(env.at(a.vars[0])) > 0;
            case Predicate::Kind::propositional:
                return res.props.count(a.pred.name) > 0;
            case Predicate::Kind::caterpillar:
                return cat_rel(a.pred.expr).get(env.at(a.vars[0]), env.at(a.vars[1]));
        }
        return false;
    };

    // round 0: the extensional database (for the trace; checks go straight
    // to the tree). The label families are restricted to labels occurring
    // in the tree or the program; child/lastchild/child_k appear only when
    // the program mentions them.
    {
        std::vector<GroundFact> facts;
        std::set<std::string> labels;
        for (NodeId n = 0; n < dom; ++n) labels.insert(t.label(n));
        std::set<std::string> prog_not_labels;
        bool uses_child = false, uses_lastchild = false, uses_firstsibling = false;
        std::set<std::uint32_t> prog_child_ks;
        for (const auto& r : p.rules)
            for (const auto& a : r.body) {
                if (a.pred.is_builtin(Builtin::label)) labels.insert(a.pred.name);
                if (a.pred.is_builtin(Builtin::not_label)) prog_not_labels.insert(a.pred.name);
                uses_child = uses_child || a.pred.is_builtin(Builtin::child);
                uses_lastchild = uses_lastchild || a.pred.is_builtin(Builtin::lastchild);
                uses_firstsibling = uses_firstsibling || a.pred.is_builtin(Builtin::firstsibling);
                if (a.pred.is_builtin(Builtin::child_k)) prog_child_ks.insert(a.pred.k);
            }
        facts.push_back({"root", {0}});
        for (NodeId n = 0; n < dom; ++n) {
            if (t.is_leaf(n)) facts.push_back({"leaf", {n}});
            if (t.is_last_sibling(n)) facts.push_back({"lastsibling", {n}});
            if (uses_firstsibling && t.is_first_sibling(n)) facts.push_back({"firstsibling", {n}});
            for (const auto& l : labels)
                if (t.has_label(n, l)) facts.push_back({"label_" + l, {n}});
            for (const auto& l : prog_not_labels)
                if (!t.has_label(n, l)) facts.push_back({"not_label_" + l, {n}});
            if (t.first_child(n) != no_node) facts.push_back({"firstchild", {n, t.first_child(n)}});
            if (t.next_sibling(n) != no_node) facts.push_back({"nextsibling", {n, t.next_sibling(n)}});
            if (uses_child)
                t.for_each_child(n, [&](NodeId c) { facts.push_back({"child", {n, c}}); });
            if (uses_lastchild && t.last_child(n) != no_node)
                facts.push_back({"lastchild", {n, t.last_child(n)}});
            for (auto k : prog_child_ks)
                if (NodeId c = t.nth_child(n, k); c != no_node)
                    facts.push_back({"child_" + std::to_string(k), {n, c}});
        }
        res.rounds.push_back(std::move(facts));
    }

    // enumerate all valuations of a rule; new atoms take effect only at
    // the end of the round
    for (;;) {
        std::vector<GroundFact> fresh;
        std::set<std::pair<std::string, NodeId>> fresh_unary;
        std::set<std::string> fresh_prop;
        for (const auto& r : p.rules) {
            std::vector<std::string> vars(rule_vars(r).begin(), rule_vars(r).end());
            std::map<std::string, NodeId> env;
            auto fire = [&] {
                for (const auto& a : r.body)
                    if (!check(a, env)) return;
                if (r.head.vars.empty()) {
                    if (!res.props.count(r.head.pred.name) && fresh_prop.insert(r.head.pred.name).second)
                        fresh.push_back({r.head.pred.name, {}});
                } else {
                    NodeId n = env.at(r.head.vars[0]);
                    if (!res.extents[r.head.pred.name].count(n) &&
                        fresh_unary.insert({r.head.pred.name, n}).second)
                        fresh.push_back({r.head.pred.name, {n}});
                }
            };
            if (vars.empty()) {
                fire();
                continue;
            }
            std::vector<NodeId> idx(vars.size(), 0);
            for (;;) {
                for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = idx[i];
                fire();
                std::size_t i = 0;
                while (i < vars.size() && ++idx[i] == dom) idx[i++] = 0;
                if (i == vars.size()) break;
            }
        }
        if (fresh.empty()) break;
        for (auto& [name, n] : fresh_unary) res.extents[name].insert(n);
        for (auto& name : fresh_prop) res.props.insert(name);
        res.rounds.push_back(std::move(fresh));
    }
    // make sure all head predicates are present even when empty
    for (const auto& r : p.rules)
        if (!r.head.vars.empty()) res.extents[r.head.pred.name];
    return res;
}

// The query extension under the reference semantics.
inline std::set<NodeId> naive_evaluate(const Program& p, const Tree& t, const std::string& query,
                                       const NaiveOptions& opts = {}) {
    auto res = naive_fixpoint(p, t, opts);
    auto it = res.extents.find(query);
    return it == res.extents.end() ? std::set<NodeId>{} : it->second;
}

}  // namespace treelog
