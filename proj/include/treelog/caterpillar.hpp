#pragma once

// Caterpillar expressions: regular expressions over tree axes and unary
// node tests, with inversion. A unary test denotes the identity relation
// restricted to the nodes satisfying it. The evaluator below materializes
// |dom| x |dom| relations and is intended as a semantic oracle on small
// trees, not as a query engine.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "builtins.hpp"
#include "errors.hpp"
#include "tree.hpp"

namespace treelog {

struct CaterpillarExpr;
using CatPtr = std::shared_ptr<const CaterpillarExpr>;

struct CaterpillarExpr {
    enum class Kind { epsilon, axis, test, concat, alt, star, inverse };
    Kind kind;
    Builtin builtin = Builtin::root; // axis: firstchild/nextsibling/child_k; test: unary builtins
    std::string label;               // for label/not_label tests
    std::uint32_t k = 0;             // for child_k
    std::vector<CatPtr> parts;       // concat/alt: >=2; star/inverse: 1
};

namespace cat {

inline CatPtr axis(Builtin b, std::uint32_t k = 0) {
    if (b != Builtin::firstchild && b != Builtin::nextsibling && b != Builtin::child_k)
        throw std::invalid_argument("not an atomic axis");
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::axis;
    e->builtin = b;
    e->k = k;
    return e;
}

inline CatPtr test(Builtin b, std::string label = {}) {
    if (builtin_arity(b) != 1) throw std::invalid_argument("not a unary test");
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::test;
    e->builtin = b;
    e->label = std::move(label);
    return e;
}

inline CatPtr concat(std::vector<CatPtr> parts) {
    if (parts.size() == 1) return parts[0];
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::concat;
    e->parts = std::move(parts);
    return e;
}

inline CatPtr alt(std::vector<CatPtr> parts) {
    if (parts.size() == 1) return parts[0];
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::alt;
    e->parts = std::move(parts);
    return e;
}

inline CatPtr star(CatPtr a) {
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::star;
    e->parts = {std::move(a)};
    return e;
}

inline CatPtr inverse(CatPtr a) {
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::inverse;
    e->parts = {std::move(a)};
    return e;
}

// E+ = E.E*
inline CatPtr plus(CatPtr a) { return concat({a, star(a)}); }

// The identity relation.
inline CatPtr epsilon() {
    auto e = std::make_shared<CaterpillarExpr>();
    e->kind = CaterpillarExpr::Kind::epsilon;
    return e;
}

// child = firstchild.nextsibling*
inline CatPtr child() {
    return concat({axis(Builtin::firstchild), star(axis(Builtin::nextsibling))});
}

// Document order over unranked trees (Example semantics):
//   child+ | (child^-1)*.nextsibling+.child*
inline CatPtr document_order() {
    auto ns = axis(Builtin::nextsibling);
    return alt({plus(child()),
                concat({star(inverse(child())), plus(ns), star(child())})});
}

}  // namespace cat

inline std::string to_string(const CaterpillarExpr& e) {
    using K = CaterpillarExpr::Kind;
    switch (e.kind) {
        case K::epsilon:
            return "eps";
        case K::axis:
            if (e.builtin == Builtin::child_k) return "child_" + std::to_string(e.k);
            return std::string(builtin_name(e.builtin));
        case K::test:
            if (e.builtin == Builtin::label) return "label_" + e.label;
            if (e.builtin == Builtin::not_label) return "not_label_" + e.label;
            return std::string(builtin_name(e.builtin));
        case K::concat: {
            std::string out;
            for (std::size_t i = 0; i < e.parts.size(); ++i) {
                if (i) out += ".";
                bool paren = e.parts[i]->kind == K::alt;
                out += paren ? "(" + to_string(*e.parts[i]) + ")" : to_string(*e.parts[i]);
            }
            return out;
        }
        case K::alt: {
            std::string out = "(";
            for (std::size_t i = 0; i < e.parts.size(); ++i) {
                if (i) out += " | ";
                out += to_string(*e.parts[i]);
            }
            return out + ")";
        }
        case K::star: {
            bool paren = e.parts[0]->kind != K::axis && e.parts[0]->kind != K::test &&
                         e.parts[0]->kind != K::epsilon;
            return (paren ? "(" + to_string(*e.parts[0]) + ")" : to_string(*e.parts[0])) + "*";
        }
        case K::inverse: {
            bool paren = e.parts[0]->kind != K::axis && e.parts[0]->kind != K::test;
            return (paren ? "(" + to_string(*e.parts[0]) + ")" : to_string(*e.parts[0])) + "^-1";
        }
    }
    return "";
}

// Pushes inversions down to atomic axes using
//   (E.F)^-1 = F^-1.E^-1   (E|F)^-1 = E^-1|F^-1   (E*)^-1 = (E^-1)*   (E^-1)^-1 = E
// Unary tests are self-inverse. The result contains inverse nodes only
// directly above axes, and is no larger than the input.
inline CatPtr invert(const CatPtr& e, bool inverted = true) {
    using K = CaterpillarExpr::Kind;
    switch (e->kind) {
        case K::epsilon:
            return e;
        case K::axis:
            return inverted ? cat::inverse(e) : e;
        case K::test:
            return e;
        case K::concat: {
            std::vector<CatPtr> parts;
            if (inverted)
                for (auto it = e->parts.rbegin(); it != e->parts.rend(); ++it)
                    parts.push_back(invert(*it, true));
            else
                for (const auto& p : e->parts) parts.push_back(invert(p, false));
            return cat::concat(std::move(parts));
        }
        case K::alt: {
            std::vector<CatPtr> parts;
            for (const auto& p : e->parts) parts.push_back(invert(p, inverted));
            return cat::alt(std::move(parts));
        }
        case K::star:
            return cat::star(invert(e->parts[0], inverted));
        case K::inverse:
            return invert(e->parts[0], !inverted);
    }
    return e;
}

// Normalize without flipping: same traversal with inverted = false.
inline CatPtr push_inversions(const CatPtr& e) { return invert(e, false); }

// Square boolean matrix over node ids, one bitset row per node.
class NodeRelation {
public:
    explicit NodeRelation(NodeId n) : n_(n), words_((n + 63) / 64), bits_(std::size_t(n) * words_, 0) {}

    NodeId size() const { return n_; }
    bool get(NodeId i, NodeId j) const { return bits_[row(i) + j / 64] >> (j % 64) & 1u; }
    void set(NodeId i, NodeId j) { bits_[row(i) + j / 64] |= std::uint64_t(1) << (j % 64); }

    void unite(const NodeRelation& o) {
        for (std::size_t w = 0; w < bits_.size(); ++w) bits_[w] |= o.bits_[w];
    }

    NodeRelation compose(const NodeRelation& o) const {
        NodeRelation out(n_);
        for (NodeId i = 0; i < n_; ++i)
            for (NodeId j = 0; j < n_; ++j)
                if (get(i, j))
                    for (std::size_t w = 0; w < words_; ++w)
                        out.bits_[out.row(i) + w] |= o.bits_[o.row(j) + w];
        return out;
    }

    NodeRelation transpose() const {
        NodeRelation out(n_);
        for (NodeId i = 0; i < n_; ++i)
            for (NodeId j = 0; j < n_; ++j)
                if (get(i, j)) out.set(j, i);
        return out;
    }

    // Reflexive-transitive closure (Warshall on bitset rows).
    NodeRelation star() const {
        NodeRelation out = *this;
        for (NodeId k = 0; k < n_; ++k)
            for (NodeId i = 0; i < n_; ++i)
                if (out.get(i, k))
                    for (std::size_t w = 0; w < words_; ++w)
                        out.bits_[out.row(i) + w] |= out.bits_[out.row(k) + w];
        for (NodeId i = 0; i < n_; ++i) out.set(i, i);
        return out;
    }

    bool operator==(const NodeRelation& o) const { return n_ == o.n_ && bits_ == o.bits_; }

private:
    std::size_t row(NodeId i) const { return std::size_t(i) * words_; }
    NodeId n_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

inline constexpr NodeId caterpillar_eval_cap = 2000;

inline bool eval_test(const Tree& t, const CaterpillarExpr& e, NodeId n) {
    switch (e.builtin) {
        case Builtin::root: return t.is_root(n);
        case Builtin::leaf: return t.is_leaf(n);
        case Builtin::lastsibling: return t.is_last_sibling(n);
        case Builtin::firstsibling: return t.is_first_sibling(n);
        case Builtin::label: return t.has_label(n, e.label);
        case Builtin::not_label: return !t.has_label(n, e.label);
        default: throw std::logic_error("not a unary test");
    }
}

inline NodeRelation eval_caterpillar_relation(const Tree& t, const CaterpillarExpr& e) {
    using K = CaterpillarExpr::Kind;
    const NodeId n = t.node_count();
    if (n > caterpillar_eval_cap)
        throw CapExceeded("caterpillar evaluation capped at " + std::to_string(caterpillar_eval_cap) + " nodes");
    switch (e.kind) {
        case K::epsilon: {
            NodeRelation r(n);
            for (NodeId u = 0; u < n; ++u) r.set(u, u);
            return r;
        }
        case K::axis: {
            NodeRelation r(n);
            for (NodeId u = 0; u < n; ++u) {
                NodeId v = no_node;
                if (e.builtin == Builtin::firstchild) v = t.first_child(u);
                else if (e.builtin == Builtin::nextsibling) v = t.next_sibling(u);
                else v = t.nth_child(u, e.k);
                if (v != no_node) r.set(u, v);
            }
            return r;
        }
        case K::test: {
            NodeRelation r(n);
            for (NodeId u = 0; u < n; ++u)
                if (eval_test(t, e, u)) r.set(u, u);
            return r;
        }
        case K::concat: {
            NodeRelation r = eval_caterpillar_relation(t, *e.parts[0]);
            for (std::size_t i = 1; i < e.parts.size(); ++i)
                r = r.compose(eval_caterpillar_relation(t, *e.parts[i]));
            return r;
        }
        case K::alt: {
            NodeRelation r = eval_caterpillar_relation(t, *e.parts[0]);
            for (std::size_t i = 1; i < e.parts.size(); ++i)
                r.unite(eval_caterpillar_relation(t, *e.parts[i]));
            return r;
        }
        case K::star:
            return eval_caterpillar_relation(t, *e.parts[0]).star();
        case K::inverse:
            return eval_caterpillar_relation(t, *e.parts[0]).transpose();
    }
    throw std::logic_error("unreachable");
}

// Image of `sources` under the expression's relation.
inline std::set<NodeId> eval_caterpillar(const Tree& t, const CatPtr& e, const std::set<NodeId>& sources) {
    NodeRelation r = eval_caterpillar_relation(t, *e);
    std::set<NodeId> out;
    for (NodeId s : sources)
        for (NodeId v = 0; v < t.node_count(); ++v)
            if (r.get(s, v)) out.insert(v);
    return out;
}

}  // namespace treelog
