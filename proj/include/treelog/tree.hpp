#pragma once

// Document trees: immutable, ordered, unranked, labeled. Node ids are
// assigned in document order (preorder), so id comparison coincides with
// the document-order relation on nodes. The accessors below expose the
// relational views (root, leaf, label, firstchild, nextsibling, ...) that
// the query machinery is defined against.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treelog {

using NodeId = std::uint32_t;
inline constexpr NodeId no_node = std::numeric_limits<NodeId>::max();

class Tree {
public:
    NodeId node_count() const { return static_cast<NodeId>(nodes_.size()); }

    const std::string& label(NodeId n) const { return labels_[nodes_[at(n)].label]; }
    int label_id(NodeId n) const { return nodes_[at(n)].label; }
    // Returns -1 when no node carries the label.
    int find_label(std::string_view name) const {
        auto it = label_index_.find(std::string(name));
        return it == label_index_.end() ? -1 : it->second;
    }

    NodeId parent(NodeId n) const { return nodes_[at(n)].parent; }
    NodeId first_child(NodeId n) const { return nodes_[at(n)].first_child; }
    NodeId last_child(NodeId n) const { return nodes_[at(n)].last_child; }
    NodeId next_sibling(NodeId n) const { return nodes_[at(n)].next_sibling; }
    NodeId prev_sibling(NodeId n) const { return nodes_[at(n)].prev_sibling; }
    // 1-based position among siblings; 1 for the root.
    std::uint32_t child_index(NodeId n) const { return nodes_[at(n)].child_index; }
    std::uint32_t child_count(NodeId n) const { return nodes_[at(n)].child_num; }

    bool has_text(NodeId n) const { return nodes_[at(n)].text >= 0; }
    std::string_view text(NodeId n) const {
        const auto& nd = nodes_[at(n)];
        return nd.text >= 0 ? std::string_view(texts_[nd.text]) : std::string_view();
    }

    bool is_root(NodeId n) const { return at(n) == 0; }
    bool is_leaf(NodeId n) const { return first_child(n) == no_node; }
    bool is_last_sibling(NodeId n) const { return parent(n) != no_node && next_sibling(n) == no_node; }
    bool is_first_sibling(NodeId n) const { return parent(n) != no_node && prev_sibling(n) == no_node; }
    bool has_label(NodeId n, std::string_view name) const { return label(n) == name; }

    bool firstchild(NodeId u, NodeId v) const { return first_child(u) == v && v != no_node; }
    bool nextsibling(NodeId u, NodeId v) const { return next_sibling(u) == v && v != no_node; }
    bool child(NodeId u, NodeId v) const { return v < node_count() && parent(v) == u; }
    bool lastchild(NodeId u, NodeId v) const { return last_child(u) == v && v != no_node; }
    bool child_k(NodeId u, NodeId v, std::uint32_t k) const {
        return child(u, v) && child_index(v) == k;
    }
    // k-th child of u (1-based), or no_node.
    NodeId nth_child(NodeId u, std::uint32_t k) const {
        if (k == 0 || k > child_count(u)) return no_node;
        NodeId c = first_child(u);
        for (std::uint32_t i = 1; i < k; ++i) c = next_sibling(c);
        return c;
    }

    template <typename F>
    void for_each_child(NodeId u, F&& f) const {
        for (NodeId c = first_child(u); c != no_node; c = next_sibling(c)) f(c);
    }

    // Structural equality on the logical part (shape + labels); text
    // payloads are carried data and do not participate.
    friend bool logically_equal(const Tree& a, const Tree& b) {
        if (a.node_count() != b.node_count()) return false;
        for (NodeId n = 0; n < a.node_count(); ++n) {
            if (a.label(n) != b.label(n)) return false;
            if (a.parent(n) != b.parent(n)) return false;
            if (a.next_sibling(n) != b.next_sibling(n)) return false;
        }
        return true;
    }

private:
    struct Node {
        int label = 0;
        int text = -1;
        NodeId parent = no_node;
        NodeId first_child = no_node;
        NodeId last_child = no_node;
        NodeId next_sibling = no_node;
        NodeId prev_sibling = no_node;
        std::uint32_t child_index = 1;
        std::uint32_t child_num = 0;
    };

    NodeId at(NodeId n) const {
        if (n >= nodes_.size()) throw std::out_of_range("node id out of range");
        return n;
    }

    std::vector<Node> nodes_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> label_index_;
    std::vector<std::string> texts_;

    friend class TreeBuilder;
};

// Appends nodes in document order: each added node's parent must lie on
// the rightmost root-to-leaf path of the tree built so far. This is the
// only way to construct a Tree, which keeps the preorder-id invariant
// true by construction.
class TreeBuilder {
public:
    NodeId add_root(std::string_view label) {
        if (!tree_.nodes_.empty()) throw std::logic_error("root already added");
        tree_.nodes_.push_back({});
        tree_.nodes_[0].label = intern(label);
        open_path_ = {0};
        return 0;
    }

    NodeId add_child(NodeId parent, std::string_view label) {
        if (tree_.nodes_.empty()) throw std::logic_error("add_root first");
        while (!open_path_.empty() && open_path_.back() != parent) open_path_.pop_back();
        if (open_path_.empty())
            throw std::logic_error("parent not on the open rightmost path; nodes must be added in document order");
        NodeId id = static_cast<NodeId>(tree_.nodes_.size());
        tree_.nodes_.push_back({});
        auto& nd = tree_.nodes_[id];
        auto& pd = tree_.nodes_[parent];
        nd.label = intern(label);
        nd.parent = parent;
        if (pd.last_child == no_node) {
            pd.first_child = id;
        } else {
            tree_.nodes_[pd.last_child].next_sibling = id;
            nd.prev_sibling = pd.last_child;
            nd.child_index = tree_.nodes_[pd.last_child].child_index + 1;
        }
        pd.last_child = id;
        pd.child_num += 1;
        open_path_.push_back(id);
        return id;
    }

    void set_text(NodeId n, std::string text) {
        tree_.nodes_.at(n).text = static_cast<int>(tree_.texts_.size());
        tree_.texts_.push_back(std::move(text));
    }

    Tree finish() {
        if (tree_.nodes_.empty()) throw std::logic_error("empty tree");
        open_path_.clear();
        return std::move(tree_);
    }

private:
    int intern(std::string_view label) {
        if (label.empty()) throw std::invalid_argument("empty label");
        auto it = tree_.label_index_.find(std::string(label));
        if (it != tree_.label_index_.end()) return it->second;
        int id = static_cast<int>(tree_.labels_.size());
        tree_.labels_.emplace_back(label);
        tree_.label_index_.emplace(tree_.labels_.back(), id);
        return id;
    }

    Tree tree_;
    std::vector<NodeId> open_path_;
};

// Interpreted signature check, mostly for the CLI and tests. `predicate`
// is one of root, leaf, lastsibling, firstsibling, label_<l>,
// not_label_<l>, firstchild, nextsibling, child, lastchild, child_<k>.
inline bool holds(const Tree& t, std::string_view predicate, const std::vector<NodeId>& args) {
    auto unary = [&](auto&& test) {
        if (args.size() != 1) throw std::invalid_argument("arity mismatch for " + std::string(predicate));
        return test(args[0]);
    };
    auto binary = [&](auto&& test) {
        if (args.size() != 2) throw std::invalid_argument("arity mismatch for " + std::string(predicate));
        return test(args[0], args[1]);
    };
    if (predicate == "root") return unary([&](NodeId n) { return t.is_root(n); });
    if (predicate == "leaf") return unary([&](NodeId n) { return t.is_leaf(n); });
    if (predicate == "lastsibling") return unary([&](NodeId n) { return t.is_last_sibling(n); });
    if (predicate == "firstsibling") return unary([&](NodeId n) { return t.is_first_sibling(n); });
    if (predicate == "firstchild") return binary([&](NodeId u, NodeId v) { return t.firstchild(u, v); });
    if (predicate == "nextsibling") return binary([&](NodeId u, NodeId v) { return t.nextsibling(u, v); });
    if (predicate == "child") return binary([&](NodeId u, NodeId v) { return t.child(u, v); });
    if (predicate == "lastchild") return binary([&](NodeId u, NodeId v) { return t.lastchild(u, v); });
    if (predicate.starts_with("label_"))
        return unary([&](NodeId n) { return t.has_label(n, predicate.substr(6)); });
    if (predicate.starts_with("not_label_"))
        return unary([&](NodeId n) { return !t.has_label(n, predicate.substr(10)); });
    if (predicate.starts_with("child_")) {
        auto digits = predicate.substr(6);
        std::uint32_t k = 0;
        for (char c : digits) {
            if (c < '0' || c > '9') throw std::invalid_argument("unknown predicate " + std::string(predicate));
            k = k * 10 + static_cast<std::uint32_t>(c - '0');
        }
        if (k == 0) throw std::invalid_argument("child_k requires k >= 1");
        return binary([&](NodeId u, NodeId v) { return t.child_k(u, v, k); });
    }
    throw std::invalid_argument("unknown predicate " + std::string(predicate));
}

// Ranked alphabets map labels to the child counts they admit. Arity sets
// (rather than a single arity per label) let one symbol appear at leaves
// and inner nodes alike, as the automata examples require.
struct RankedAlphabet {
    std::map<std::string, std::set<std::uint32_t>> arity;

    std::uint32_t max_rank() const {
        std::uint32_t k = 0;
        for (const auto& [l, s] : arity)
            if (!s.empty()) k = std::max(k, *s.rbegin());
        return k;
    }
};

struct RankViolation {
    NodeId node;
    std::string message;
};

inline std::vector<RankViolation> validate_ranked(const Tree& t, const RankedAlphabet& ra) {
    std::vector<RankViolation> out;
    for (NodeId n = 0; n < t.node_count(); ++n) {
        auto it = ra.arity.find(t.label(n));
        if (it == ra.arity.end()) {
            out.push_back({n, "label '" + t.label(n) + "' not in alphabet"});
            continue;
        }
        if (!it->second.count(t.child_count(n)))
            out.push_back({n, "node with label '" + t.label(n) + "' has " +
                                  std::to_string(t.child_count(n)) + " children, not an allowed arity"});
    }
    return out;
}

}  // namespace treelog
