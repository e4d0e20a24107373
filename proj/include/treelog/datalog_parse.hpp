#pragma once

// Surface syntax for .dl programs:
//   rule      := atom ":-" atom ("," atom)* "."
//   atom      := pname "(" term ("," term)* ")"
//   term      := Var | quoted-string (label position only)
//   directive := "%query" pname
// Variables start with an uppercase letter. label(X,"a") desugars to the
// label_a builtin, not_label(X,"a") analogously; child_<k> names are the
// child_k family. Names starting with '$' are reserved for generated
// predicates and rejected here. Comments run from '#' to end of line.

#include <cctype>
#include <string>
#include <string_view>

#include "datalog.hpp"
#include "errors.hpp"

namespace treelog {

namespace detail {

struct DlScanner {
    std::string_view in;
    std::size_t pos = 0;
    int line = 1;

    void skip_ws() {
        while (pos < in.size()) {
            if (in[pos] == '#') {
                while (pos < in.size() && in[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(in[pos]))) {
                if (in[pos] == '\n') ++line;
                ++pos;
            } else {
                break;
            }
        }
    }
    bool eof() {
        skip_ws();
        return pos >= in.size();
    }
    char peek() {
        skip_ws();
        return pos < in.size() ? in[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos;
        return true;
    }
    bool accept(std::string_view s) {
        skip_ws();
        if (in.substr(pos, s.size()) != s) return false;
        pos += s.size();
        return true;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "' " + what, pos);
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        if (pos < in.size() && (std::isalpha(static_cast<unsigned char>(in[pos])) || in[pos] == '_' || in[pos] == '$'))
            ++pos;
        while (pos < in.size() && (std::isalnum(static_cast<unsigned char>(in[pos])) || in[pos] == '_')) ++pos;
        if (pos == start) throw ParseError("expected identifier", pos);
        return std::string(in.substr(start, pos - start));
    }
    std::string quoted() {
        skip_ws();
        std::size_t start = pos;
        if (pos >= in.size() || in[pos] != '"') throw ParseError("expected string literal", pos);
        ++pos;
        std::string out;
        while (pos < in.size() && in[pos] != '"') {
            if (in[pos] == '\\') ++pos;
            if (pos < in.size()) out.push_back(in[pos++]);
        }
        if (pos >= in.size()) throw ParseError("unterminated string", start);
        ++pos;
        return out;
    }
};

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

inline Atom parse_dl_atom(DlScanner& s, bool allow_generated) {
    std::size_t at = s.pos;
    std::string name = s.ident();
    if (!allow_generated && name[0] == '$')
        throw ParseError("names starting with '$' are reserved for generated predicates", at);
    std::vector<std::string> vars;
    std::string label_arg;
    bool has_label_arg = false;
    if (s.accept('(')) {
        for (;;) {
            s.skip_ws();
            if (s.peek() == '"') {
                if (has_label_arg) throw ParseError("at most one label literal per atom", s.pos);
                label_arg = s.quoted();
                has_label_arg = true;
            } else {
                std::size_t vp = s.pos;
                std::string v = s.ident();
                if (!std::isupper(static_cast<unsigned char>(v[0])))
                    throw ParseError("variables must start with an uppercase letter (constants are not allowed here)", vp);
                vars.push_back(std::move(v));
            }
            if (s.accept(',')) continue;
            s.expect(')', "to close atom");
            break;
        }
    }

    auto mk = [&](Predicate p) { return Atom{std::move(p), std::move(vars)}; };

    if (name == "label" || name == "not_label") {
        if (!has_label_arg || vars.size() != 1)
            throw ParseError(name + " expects (Var, \"label\")", at);
        return mk(name == "label" ? Predicate::label(label_arg) : Predicate::not_label(label_arg));
    }
    if (has_label_arg) throw ParseError("string literal only allowed in label/not_label", at);
    if (name.starts_with("label_")) return mk(Predicate::label(name.substr(6)));
    if (name.starts_with("not_label_")) return mk(Predicate::not_label(name.substr(10)));
    if (name.starts_with("child_")) {
        auto digits = std::string_view(name).substr(6);
        if (!all_digits(digits)) throw ParseError("names child_<k> are reserved for the child_k family", at);
        std::uint32_t k = 0;
        for (char c : digits) k = k * 10 + static_cast<std::uint32_t>(c - '0');
        if (k == 0) throw ParseError("child_k requires k >= 1", at);
        return mk(Predicate::child_k(k));
    }
    for (Builtin b : {Builtin::root, Builtin::leaf, Builtin::lastsibling, Builtin::firstsibling,
                      Builtin::firstchild, Builtin::nextsibling, Builtin::child, Builtin::lastchild})
        if (name == builtin_name(b)) return mk(Predicate::of(b));
    if (vars.empty()) return mk(Predicate::propositional(name));
    return mk(Predicate::intensional(name));
}

}  // namespace detail

// `allow_generated` admits '$'-prefixed names; it is used to re-read
// programs this library has emitted.
inline Program parse_program(std::string_view text, bool allow_generated = false) {
    detail::DlScanner s{text};
    Program p;
    while (!s.eof()) {
        if (s.accept('%')) {
            std::string dir = s.ident();
            if (dir != "query") throw ParseError("unknown directive %" + dir, s.pos);
            p.queries.insert(s.ident());
            continue;
        }
        int line = s.line;
        Atom head = detail::parse_dl_atom(s, allow_generated);
        Rule r;
        r.line = line;
        r.head = std::move(head);
        if (s.accept(":-")) {
            for (;;) {
                r.body.push_back(detail::parse_dl_atom(s, allow_generated));
                if (!s.accept(',')) break;
            }
        }
        s.expect('.', "to end rule");
        if (r.body.empty())
            throw ParseError("facts are not allowed; extensional data comes from the tree", s.pos);
        if (r.head.pred.kind == Predicate::Kind::builtin || r.head.pred.kind == Predicate::Kind::caterpillar)
            throw ParseError("rule head must be an intensional predicate", s.pos);
        // duplicate body atoms collapse; distinct atoms are kept
        std::vector<Atom> dedup;
        for (auto& a : r.body) {
            bool seen = false;
            for (const auto& b : dedup) seen = seen || b == a;
            if (!seen) dedup.push_back(std::move(a));
        }
        r.body = std::move(dedup);
        p.rules.push_back(std::move(r));
    }
    return p;
}

}  // namespace treelog
