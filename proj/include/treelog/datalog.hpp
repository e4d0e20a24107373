#pragma once

// Monadic datalog over tree signatures: AST and concrete syntax.
// Intensional predicates are unary; propositional (0-ary) predicates are
// internal, produced only when rules are split into connected parts.
// Caterpillar predicates are internal binary atoms used by the
// normalization pipeline between its passes.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "builtins.hpp"
#include "caterpillar.hpp"

namespace treelog {

struct Predicate {
    enum class Kind { builtin, intensional, propositional, caterpillar };

    Kind kind = Kind::intensional;
    Builtin builtin = Builtin::root;
    std::string name;   // intensional/propositional name; label for label/not_label
    std::uint32_t k = 0; // index for child_k
    CatPtr expr;         // caterpillar payload

    int arity() const {
        switch (kind) {
            case Kind::builtin: return builtin_arity(builtin);
            case Kind::intensional: return 1;
            case Kind::propositional: return 0;
            case Kind::caterpillar: return 2;
        }
        return 0;
    }

    bool is_builtin(Builtin b) const { return kind == Kind::builtin && builtin == b; }

    // Sort key; caterpillar predicates compare by identity of their expression.
    auto key() const {
        return std::tuple(static_cast<int>(kind), static_cast<int>(builtin), name, k,
                          reinterpret_cast<std::uintptr_t>(expr.get()));
    }
    bool operator==(const Predicate& o) const { return key() == o.key(); }
    bool operator<(const Predicate& o) const { return key() < o.key(); }

    static Predicate intensional(std::string name) {
        Predicate p;
        p.kind = Kind::intensional;
        p.name = std::move(name);
        return p;
    }
    static Predicate propositional(std::string name) {
        Predicate p;
        p.kind = Kind::propositional;
        p.name = std::move(name);
        return p;
    }
    static Predicate of(Builtin b) {
        Predicate p;
        p.kind = Kind::builtin;
        p.builtin = b;
        return p;
    }
    static Predicate label(std::string l) {
        Predicate p = of(Builtin::label);
        p.name = std::move(l);
        return p;
    }
    static Predicate not_label(std::string l) {
        Predicate p = of(Builtin::not_label);
        p.name = std::move(l);
        return p;
    }
    static Predicate child_k(std::uint32_t k) {
        Predicate p = of(Builtin::child_k);
        p.k = k;
        return p;
    }
    static Predicate caterpillar(CatPtr e) {
        Predicate p;
        p.kind = Kind::caterpillar;
        p.expr = std::move(e);
        return p;
    }
};

struct Atom {
    Predicate pred;
    std::vector<std::string> vars; // length = pred.arity()

    bool operator==(const Atom& o) const { return pred == o.pred && vars == o.vars; }
    bool operator<(const Atom& o) const {
        if (!(pred == o.pred)) return pred < o.pred;
        return vars < o.vars;
    }
};

inline Atom atom(Predicate p, std::vector<std::string> vars) { return Atom{std::move(p), std::move(vars)}; }

struct Rule {
    Atom head;
    std::vector<Atom> body;
    int line = 0; // source position for diagnostics, 0 when synthesized
};

struct Program {
    std::vector<Rule> rules;
    std::set<std::string> queries; // declared query predicates (optional)

    std::set<std::string> intensional_names() const {
        std::set<std::string> out;
        for (const auto& r : rules)
            if (r.head.pred.kind == Predicate::Kind::intensional) out.insert(r.head.pred.name);
        return out;
    }
    bool mentions(Builtin b) const {
        for (const auto& r : rules)
            for (const auto& a : r.body)
                if (a.pred.is_builtin(b)) return true;
        return false;
    }
    bool has_caterpillar_atoms() const {
        for (const auto& r : rules)
            for (const auto& a : r.body)
                if (a.pred.kind == Predicate::Kind::caterpillar) return true;
        return false;
    }
};

inline std::string to_string(const Atom& a) {
    std::string out;
    switch (a.pred.kind) {
        case Predicate::Kind::intensional:
        case Predicate::Kind::propositional:
            out = a.pred.name;
            break;
        case Predicate::Kind::caterpillar:
            out = "$cat[" + to_string(*a.pred.expr) + "]";
            break;
        case Predicate::Kind::builtin:
            switch (a.pred.builtin) {
                case Builtin::label: return "label(" + a.vars[0] + ",\"" + a.pred.name + "\")";
                case Builtin::not_label: return "not_label(" + a.vars[0] + ",\"" + a.pred.name + "\")";
                case Builtin::child_k: out = "child_" + std::to_string(a.pred.k); break;
                default: out = std::string(builtin_name(a.pred.builtin));
            }
            break;
    }
    if (a.vars.empty()) return out;
    out += "(";
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
        if (i) out += ",";
        out += a.vars[i];
    }
    out += ")";
    return out;
}

inline std::string to_string(const Rule& r) {
    std::string out = to_string(r.head);
    if (!r.body.empty()) {
        out += " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) out += ", ";
            out += to_string(r.body[i]);
        }
    }
    return out + ".";
}

inline std::string to_string(const Program& p) {
    std::string out;
    for (const auto& q : p.queries) out += "%query " + q + "\n";
    for (const auto& r : p.rules) out += to_string(r) + "\n";
    return out;
}

inline std::set<std::string> rule_vars(const Rule& r) {
    std::set<std::string> out(r.head.vars.begin(), r.head.vars.end());
    for (const auto& a : r.body) out.insert(a.vars.begin(), a.vars.end());
    return out;
}

// A variable name distinct from everything in `used`; also registers it.
inline std::string fresh_var(std::set<std::string>& used, const std::string& stem = "V") {
    for (int i = 0;; ++i) {
        std::string c = stem + std::to_string(i);
        if (used.insert(c).second) return c;
    }
}

// Fresh-name supply for generated predicates; "$" is reserved and is
// rejected by the surface parser, so generated names cannot collide with
// user names. Collisions with earlier generated names are avoided by
// scanning the program once.
class NameSupply {
public:
    explicit NameSupply(const Program& p) {
        for (const auto& r : p.rules) {
            note(r.head.pred);
            for (const auto& a : r.body) note(a.pred);
        }
    }
    std::string fresh(const std::string& stem) {
        for (;;) {
            std::string c = "$" + stem + std::to_string(counter_++);
            if (!used_.count(c)) {
                used_.insert(c);
                return c;
            }
        }
    }

private:
    void note(const Predicate& p) {
        if (p.kind == Predicate::Kind::intensional || p.kind == Predicate::Kind::propositional)
            used_.insert(p.name);
    }
    std::set<std::string> used_;
    int counter_ = 0;
};

}  // namespace treelog
