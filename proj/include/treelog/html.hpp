#pragma once

// Tag-soup HTML ingestion. Element nodes are labeled by lowercase tag
// name; each maximal text run becomes one leaf labeled "text" with the
// raw string stored as payload. Recovery rules:
//   - void elements (br, img, hr, input, meta, link, ...) never open
//   - a small set of tags implicitly closes same-level predecessors
//     (li closes li; td/th close td/th; tr closes td/th/tr; p closes p)
//   - a mismatched close tag closes intervening open elements up to the
//     matching open element, and is ignored when no such element exists
//   - everything still open is closed at end of input
// Comments, doctype, processing instructions, and the contents of script
// and style elements are dropped. A synthetic "html" root is supplied
// when the document does not have a single root element.

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tree.hpp"

namespace treelog {

struct HtmlOptions {
    bool class_labels = false;         // append "." + class attribute to the tag label
    bool keep_whitespace_text = false; // keep whitespace-only text runs
};

namespace detail {

inline bool is_void_element(const std::string& tag) {
    static const std::set<std::string> voids = {"area", "base", "br",    "col",   "embed",
                                                "hr",   "img",  "input", "link",  "meta",
                                                "param", "source", "track", "wbr"};
    return voids.count(tag) > 0;
}

// Tags that `tag` implicitly closes when opened next to them.
inline const std::set<std::string>* auto_close_set(const std::string& tag) {
    static const std::set<std::string> li = {"li"};
    static const std::set<std::string> p = {"p"};
    static const std::set<std::string> cell = {"td", "th"};
    static const std::set<std::string> row = {"td", "th", "tr"};
    static const std::set<std::string> dt = {"dt", "dd"};
    static const std::set<std::string> option = {"option"};
    if (tag == "li") return &li;
    if (tag == "p") return &p;
    if (tag == "td" || tag == "th") return &cell;
    if (tag == "tr") return &row;
    if (tag == "dt" || tag == "dd") return &dt;
    if (tag == "option") return &option;
    return nullptr;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Bytes that are not valid UTF-8 are reinterpreted as Latin-1.
inline std::string decode_to_utf8(std::string_view bytes) {
    std::size_t i = 0;
    bool valid = true;
    while (i < bytes.size()) {
        unsigned char c = bytes[i];
        std::size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c >> 5) == 0x6) extra = 1;
        else if ((c >> 4) == 0xE) extra = 2;
        else if ((c >> 3) == 0x1E) extra = 3;
        else { valid = false; break; }
        if (i + extra >= bytes.size()) { valid = false; break; }
        for (std::size_t j = 1; j <= extra && valid; ++j)
            if ((static_cast<unsigned char>(bytes[i + j]) & 0xC0) != 0x80) valid = false;
        if (!valid) break;
        i += extra + 1;
    }
    if (valid) return std::string(bytes);
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

inline void append_entity_decoded(std::string& out, std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        std::size_t semi = text.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(text[i++]);
            continue;
        }
        std::string_view name = text.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out += "\xc2\xa0";
        else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            bool ok = true;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                for (char c : name.substr(2)) {
                    if (!std::isxdigit(static_cast<unsigned char>(c))) { ok = false; break; }
                    cp = cp * 16 + (std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                                                                                : std::tolower(c) - 'a' + 10);
                }
                ok = ok && name.size() > 2;
            } else {
                for (char c : name.substr(1)) {
                    if (!std::isdigit(static_cast<unsigned char>(c))) { ok = false; break; }
                    cp = cp * 10 + static_cast<unsigned long>(c - '0');
                }
                ok = ok && name.size() > 1;
            }
            if (!ok || cp == 0 || cp > 0x10FFFF) {
                out.push_back(text[i++]);
                continue;
            }
            if (cp < 0x80) out.push_back(static_cast<char>(cp));
            else if (cp < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else if (cp < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            }
        } else {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        i = semi + 1;
    }
}

struct HtmlToken {
    enum Kind { open, close, text } kind;
    std::string tag;        // lowercase, for open/close
    std::string class_attr; // for open
    bool self_closing = false;
    std::string data;       // for text
};

inline std::vector<HtmlToken> tokenize_html(std::string_view in) {
    std::vector<HtmlToken> toks;
    std::size_t i = 0;
    std::string pending_text;
    auto flush_text = [&] {
        if (!pending_text.empty()) {
            toks.push_back({HtmlToken::text, "", "", false, std::move(pending_text)});
            pending_text.clear();
        }
    };
    while (i < in.size()) {
        if (in[i] != '<') {
            std::size_t lt = in.find('<', i);
            if (lt == std::string_view::npos) lt = in.size();
            append_entity_decoded(pending_text, in.substr(i, lt - i));
            i = lt;
            continue;
        }
        // comments, doctype, processing instructions
        if (in.compare(i, 4, "<!--") == 0) {
            std::size_t end = in.find("-->", i + 4);
            i = end == std::string_view::npos ? in.size() : end + 3;
            continue;
        }
        if (i + 1 < in.size() && (in[i + 1] == '!' || in[i + 1] == '?')) {
            std::size_t end = in.find('>', i);
            i = end == std::string_view::npos ? in.size() : end + 1;
            continue;
        }
        std::size_t gt = in.find('>', i);
        if (gt == std::string_view::npos) {
            append_entity_decoded(pending_text, in.substr(i));
            break;
        }
        std::string_view tag_body = in.substr(i + 1, gt - i - 1);
        bool closing = !tag_body.empty() && tag_body[0] == '/';
        if (closing) tag_body.remove_prefix(1);
        std::size_t j = 0;
        while (j < tag_body.size() && !std::isspace(static_cast<unsigned char>(tag_body[j])) && tag_body[j] != '/')
            ++j;
        std::string name = to_lower(tag_body.substr(0, j));
        if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
            // stray '<' treated as text
            append_entity_decoded(pending_text, in.substr(i, gt - i + 1));
            i = gt + 1;
            continue;
        }
        flush_text();
        if (closing) {
            toks.push_back({HtmlToken::close, name, "", false, ""});
        } else {
            HtmlToken tok{HtmlToken::open, name, "", false, ""};
            // minimal attribute scan: only class is kept; also detects />
            std::string_view rest = tag_body.substr(j);
            std::size_t k = 0;
            while (k < rest.size()) {
                while (k < rest.size() && (std::isspace(static_cast<unsigned char>(rest[k])) || rest[k] == '/')) {
                    if (rest[k] == '/' && k + 1 >= rest.size()) tok.self_closing = true;
                    ++k;
                }
                std::size_t ns = k;
                while (k < rest.size() && rest[k] != '=' && rest[k] != '/'
                       && !std::isspace(static_cast<unsigned char>(rest[k])))
                    ++k;
                std::string aname = to_lower(rest.substr(ns, k - ns));
                std::string avalue;
                if (k < rest.size() && rest[k] == '=') {
                    ++k;
                    if (k < rest.size() && (rest[k] == '"' || rest[k] == '\'')) {
                        char q = rest[k++];
                        std::size_t ve = rest.find(q, k);
                        if (ve == std::string_view::npos) ve = rest.size();
                        avalue = std::string(rest.substr(k, ve - k));
                        k = ve < rest.size() ? ve + 1 : ve;
                    } else {
                        std::size_t vs = k;
                        while (k < rest.size() && !std::isspace(static_cast<unsigned char>(rest[k])) && rest[k] != '/')
                            ++k;
                        avalue = std::string(rest.substr(vs, k - vs));
                    }
                }
                if (aname == "class") tok.class_attr = avalue;
                if (ns == k) ++k;
            }
            // script/style content is skipped wholesale
            if (name == "script" || name == "style") {
                std::string close_tag = "</" + name;
                std::size_t end = i;
                std::size_t search = gt + 1;
                for (;;) {
                    end = in.find('<', search);
                    if (end == std::string_view::npos) { end = in.size(); break; }
                    if (in.size() - end >= close_tag.size()
                        && to_lower(in.substr(end, close_tag.size())) == close_tag) break;
                    search = end + 1;
                }
                std::size_t close_gt = in.find('>', end);
                i = close_gt == std::string_view::npos ? in.size() : close_gt + 1;
                continue;
            }
            toks.push_back(std::move(tok));
        }
        i = gt + 1;
    }
    flush_text();
    return toks;
}

inline bool whitespace_only(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)) && !(c == '\xc2') && !(c == '\xa0')) return false;
    return true;
}

}  // namespace detail

inline Tree parse_html(std::string_view bytes, const HtmlOptions& opts = {}) {
    if (bytes.empty()) throw std::invalid_argument("empty HTML input");
    std::string doc = detail::decode_to_utf8(bytes);
    auto toks = detail::tokenize_html(doc);

    // Build an intermediate mutable tree, then emit in document order.
    struct PNode {
        std::string label;
        std::string text;
        bool is_text = false;
        std::vector<std::size_t> children;
    };
    std::vector<PNode> pool;
    auto make = [&](PNode n) {
        pool.push_back(std::move(n));
        return pool.size() - 1;
    };
    std::vector<std::size_t> stack; // open element indices into pool
    std::vector<std::string> tags;  // open tag names, parallel to stack
    std::vector<std::size_t> roots;

    auto attach = [&](std::size_t idx) {
        if (stack.empty()) roots.push_back(idx);
        else pool[stack.back()].children.push_back(idx);
    };

    for (auto& tok : toks) {
        if (tok.kind == detail::HtmlToken::text) {
            if (!opts.keep_whitespace_text && detail::whitespace_only(tok.data)) continue;
            std::size_t idx = make({"text", tok.data, true, {}});
            attach(idx);
        } else if (tok.kind == detail::HtmlToken::open) {
            if (const auto* closes = detail::auto_close_set(tok.tag)) {
                while (!tags.empty() && closes->count(tags.back())) {
                    stack.pop_back();
                    tags.pop_back();
                }
            }
            std::string label = tok.tag;
            if (opts.class_labels && !tok.class_attr.empty()) label += "." + tok.class_attr;
            std::size_t idx = make({label, "", false, {}});
            attach(idx);
            if (!detail::is_void_element(tok.tag) && !tok.self_closing) {
                stack.push_back(idx);
                tags.push_back(tok.tag);
            }
        } else {
            // close tag: close up to the match, ignore when unmatched
            auto it = std::find(tags.rbegin(), tags.rend(), tok.tag);
            if (it == tags.rend()) continue;
            std::size_t depth = static_cast<std::size_t>(tags.rend() - it);
            stack.resize(depth - 1);
            tags.resize(depth - 1);
        }
    }

    if (roots.empty()) throw std::invalid_argument("no elements after parsing");
    std::size_t top;
    if (roots.size() == 1 && !pool[roots[0]].is_text) {
        top = roots[0];
    } else {
        top = make({"html", "", false, roots});
    }

    TreeBuilder b;
    struct Frame {
        std::size_t idx;
        NodeId parent;
    };
    std::vector<Frame> work{{top, no_node}};
    while (!work.empty()) {
        auto [idx, parent] = work.back();
        work.pop_back();
        const PNode& pn = pool[idx];
        NodeId id = parent == no_node ? b.add_root(pn.label) : b.add_child(parent, pn.label);
        if (pn.is_text) b.set_text(id, pn.text);
        for (auto cit = pn.children.rbegin(); cit != pn.children.rend(); ++cit)
            work.push_back({*cit, id});
    }
    return b.finish();
}

}  // namespace treelog
