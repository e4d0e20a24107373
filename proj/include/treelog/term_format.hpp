#pragma once

// Canonical term format for trees:  tree := label [ "(" tree ("," tree)* ")" ]
// Labels are either runs of [A-Za-z0-9-] or double-quoted strings with
// \" and \\ escapes. Serialization and parsing are exact inverses on the
// logical tree (text payloads are carried data and are not serialized).

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "tree.hpp"

namespace treelog {

namespace detail {

inline bool plain_label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
}

struct TermScanner {
    std::string_view in;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < in.size() && std::isspace(static_cast<unsigned char>(in[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= in.size();
    }
    char peek() {
        skip_ws();
        return pos < in.size() ? in[pos] : '\0';
    }
    void expect(char c) {
        if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos);
        ++pos;
    }
    std::string label() {
        skip_ws();
        if (pos >= in.size()) throw ParseError("expected label", pos);
        if (in[pos] == '"') {
            std::size_t start = pos++;
            std::string out;
            while (pos < in.size() && in[pos] != '"') {
                if (in[pos] == '\\') {
                    ++pos;
                    if (pos >= in.size()) throw ParseError("unterminated escape", pos);
                }
                out.push_back(in[pos++]);
            }
            if (pos >= in.size()) throw ParseError("unterminated quoted label", start);
            ++pos;
            if (out.empty()) throw ParseError("empty label", start);
            return out;
        }
        std::size_t start = pos;
        while (pos < in.size() && plain_label_char(in[pos])) ++pos;
        if (pos == start) throw ParseError("expected label", pos);
        return std::string(in.substr(start, pos - start));
    }
};

}  // namespace detail

inline Tree parse_term_tree(std::string_view text) {
    detail::TermScanner s{text};
    if (s.eof()) throw ParseError("empty input", 0);
    TreeBuilder b;
    // Explicit stack of open nodes; recursion depth is unbounded in input.
    std::vector<NodeId> stack;
    NodeId root = b.add_root(s.label());
    if (s.peek() == '(') {
        s.expect('(');
        stack.push_back(root);
    }
    while (!stack.empty()) {
        NodeId n = b.add_child(stack.back(), s.label());
        if (s.peek() == '(') {
            s.expect('(');
            stack.push_back(n);
            continue;
        }
        while (!stack.empty() && s.peek() == ')') {
            s.expect(')');
            stack.pop_back();
        }
        if (!stack.empty()) s.expect(',');
    }
    if (!s.eof()) throw ParseError("trailing input", s.pos);
    return b.finish();
}

inline void append_term_label(std::string& out, const std::string& label) {
    bool plain = !label.empty();
    for (char c : label) plain = plain && detail::plain_label_char(c);
    if (plain) {
        out += label;
        return;
    }
    out += '"';
    for (char c : label) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

inline std::string serialize_term(const Tree& t) {
    std::string out;
    // Iterative preorder with explicit closing bookkeeping.
    struct Frame { NodeId node; };
    std::vector<NodeId> stack = {0};
    std::vector<NodeId> open;
    bool first = true;
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        while (!open.empty() && t.parent(n) != open.back()) {
            out += ')';
            open.pop_back();
        }
        if (!first && !open.empty() && t.prev_sibling(n) != no_node) out += ',';
        first = false;
        append_term_label(out, t.label(n));
        if (t.first_child(n) != no_node) {
            out += '(';
            open.push_back(n);
            // push children in reverse so the leftmost is visited first
            std::vector<NodeId> kids;
            t.for_each_child(n, [&](NodeId c) { kids.push_back(c); });
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
        }
    }
    while (!open.empty()) {
        out += ')';
        open.pop_back();
    }
    return out;
}

inline std::string json_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// One JSON record per node: {"id":..,"label":..,"parent":..,"text":..}.
inline std::string serialize_json_lines(const Tree& t) {
    std::string out;
    for (NodeId n = 0; n < t.node_count(); ++n) {
        out += "{\"id\":" + std::to_string(n);
        out += ",\"label\":\"" + json_escape(t.label(n)) + "\"";
        out += ",\"parent\":";
        out += t.parent(n) == no_node ? "null" : std::to_string(t.parent(n));
        out += ",\"text\":";
        out += t.has_text(n) ? "\"" + json_escape(t.text(n)) + "\"" : "null";
        out += "}\n";
    }
    return out;
}

enum class TreeFormat { term, json_lines };

inline std::string serialize_tree(const Tree& t, TreeFormat f) {
    return f == TreeFormat::term ? serialize_term(t) : serialize_json_lines(t);
}

}  // namespace treelog
