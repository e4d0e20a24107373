#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/gen.hpp"
#include "treelog/html.hpp"
#include "treelog/term_format.hpp"
#include "treelog/tree.hpp"

using namespace treelog;

TEST_CASE("term format parses the six-node example tree") {
    Tree t = parse_term_tree("a(a,a(a,a),a)");
    REQUIRE(t.node_count() == 6);
    for (NodeId n = 0; n < 6; ++n) CHECK(t.label(n) == "a");
    // ids n1..n6 = 0..5 in document order
    CHECK(t.first_child(0) == 1);
    CHECK(t.next_sibling(1) == 2);
    CHECK(t.first_child(2) == 3);
    CHECK(t.next_sibling(3) == 4);
    CHECK(t.next_sibling(2) == 5);
    CHECK(serialize_term(t) == "a(a,a(a,a),a)");
}

TEST_CASE("single node tree is root and leaf") {
    Tree t = parse_term_tree("a");
    REQUIRE(t.node_count() == 1);
    CHECK(t.is_root(0));
    CHECK(t.is_leaf(0));
    CHECK_FALSE(t.is_last_sibling(0)); // the root is not a last sibling
    CHECK(serialize_term(t) == "a");
}

TEST_CASE("relations of a(b,c) match hand-built tables") {
    Tree t = parse_term_tree("a(b,c)");
    CHECK(t.firstchild(0, 1));
    CHECK_FALSE(t.firstchild(0, 2));
    CHECK(t.nextsibling(1, 2));
    CHECK(t.child(0, 2));
    CHECK(t.lastchild(0, 2));
    CHECK(t.is_first_sibling(1));
    CHECK(t.is_last_sibling(2));
    CHECK(holds(t, "nextsibling", {1, 2}));
    CHECK(holds(t, "label_b", {1}));
    CHECK(holds(t, "not_label_b", {2}));
    CHECK_THROWS(holds(t, "nonsense", {0}));
    CHECK_THROWS(holds(t, "root", {0, 1}));
    CHECK_THROWS(holds(t, "root", {9}));
}

TEST_CASE("child_k positions") {
    Tree t = parse_term_tree("a(b,c,d)");
    CHECK(holds(t, "child_3", {0, 3}));
    CHECK_FALSE(holds(t, "child_2", {0, 3}));
    CHECK(t.nth_child(0, 2) == 2);
    CHECK(t.nth_child(0, 4) == no_node);
}

TEST_CASE("term parse errors carry offsets") {
    CHECK_THROWS_AS(parse_term_tree(""), ParseError);
    CHECK_THROWS_AS(parse_term_tree("a(b,,c)"), ParseError);
    CHECK_THROWS_AS(parse_term_tree("a(b"), ParseError);
    CHECK_THROWS_AS(parse_term_tree("a)b"), ParseError);
}

TEST_CASE("quoted labels survive round trips") {
    Tree t = parse_term_tree("\"we ird\"(\"a(\",\"b\\\"c\")");
    CHECK(t.label(0) == "we ird");
    CHECK(t.label(1) == "a(");
    CHECK(t.label(2) == "b\"c");
    Tree u = parse_term_tree(serialize_term(t));
    CHECK(logically_equal(t, u));
}

TEST_CASE("term round trip is the identity on random trees") {
    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 40));
        Tree u = parse_term_tree(serialize_term(t));
        REQUIRE(logically_equal(t, u));
    }
}

TEST_CASE("functional dependencies hold on random trees") {
    // Prop-4.1-style check by exhaustive scan: firstchild, nextsibling,
    // child_k, lastchild are injective partial functions both ways.
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 30));
        for (auto rel : {"firstchild", "nextsibling", "lastchild", "child_2"}) {
            std::map<NodeId, NodeId> fwd, bwd;
            for (NodeId u = 0; u < t.node_count(); ++u)
                for (NodeId v = 0; v < t.node_count(); ++v)
                    if (holds(t, rel, {u, v})) {
                        REQUIRE(fwd.emplace(u, v).second); // $1 -> $2
                        REQUIRE(bwd.emplace(v, u).second); // $2 -> $1
                    }
        }
    }
}

TEST_CASE("preorder ids: parents precede children, siblings increase") {
    std::mt19937 rng(13);
    Tree t = testgen::random_tree(rng, 25);
    for (NodeId n = 1; n < t.node_count(); ++n) {
        CHECK(t.parent(n) < n);
        if (t.next_sibling(n) != no_node) CHECK(t.next_sibling(n) > n);
    }
}

TEST_CASE("json-lines serialization") {
    Tree t = parse_term_tree("a(b)");
    std::string s = serialize_json_lines(t);
    CHECK(s == "{\"id\":0,\"label\":\"a\",\"parent\":null,\"text\":null}\n"
               "{\"id\":1,\"label\":\"b\",\"parent\":0,\"text\":null}\n");
}

TEST_CASE("HTML ingestion reproduces the six-node example shape") {
    Tree t = parse_html("<a><a></a><a><a></a><a></a></a><a></a></a>");
    REQUIRE(t.node_count() == 6);
    for (NodeId n = 0; n < 6; ++n) CHECK(t.label(n) == "a");
    CHECK(serialize_term(t) == "a(a,a(a,a),a)");
}

TEST_CASE("HTML: single element") {
    Tree t = parse_html("<html></html>");
    REQUIRE(t.node_count() == 1);
    CHECK(t.label(0) == "html");
}

TEST_CASE("HTML: li auto-close") {
    Tree t = parse_html("<ul><li>x<li>y</ul>");
    // a single root element needs no synthetic root
    NodeId ul = 0;
    REQUIRE(t.label(ul) == "ul");
    REQUIRE(t.child_count(ul) == 2);
    NodeId li1 = t.first_child(ul);
    NodeId li2 = t.next_sibling(li1);
    CHECK(t.label(li1) == "li");
    CHECK(t.label(li2) == "li");
    REQUIRE(t.child_count(li1) == 1);
    CHECK(t.label(t.first_child(li1)) == "text");
    CHECK(t.text(t.first_child(li1)) == "x");
    CHECK(t.text(t.first_child(li2)) == "y");
}

TEST_CASE("HTML recovery and options") {
    SECTION("mismatched close closes intervening elements") {
        Tree t = parse_html("<div><b><i>x</b>y</div>");
        // </b> closes i then b; y lands under div
        NodeId div = 0;
        REQUIRE(t.label(div) == "div");
        REQUIRE(t.child_count(div) == 2);
        CHECK(t.label(t.first_child(div)) == "b");
        CHECK(t.label(t.next_sibling(t.first_child(div))) == "text");
    }
    SECTION("stray close tags are ignored") {
        Tree t = parse_html("<div></span>x</div>");
        CHECK(t.child_count(0) == 1);
    }
    SECTION("void elements never get children") {
        Tree t = parse_html("<div><br>x</div>");
        REQUIRE(t.child_count(0) == 2);
        CHECK(t.label(t.first_child(0)) == "br");
        CHECK(t.is_leaf(t.first_child(0)));
    }
    SECTION("comments, doctype and script bodies are dropped") {
        Tree t = parse_html("<!doctype html><html><!-- c --><script>var x = '<div>';</script><p>hi</p></html>");
        REQUIRE(t.label(0) == "html");
        REQUIRE(t.child_count(0) == 1);
        CHECK(t.label(t.first_child(0)) == "p");
    }
    SECTION("class labels flag") {
        HtmlOptions o;
        o.class_labels = true;
        Tree t = parse_html("<div class=\"item\">x</div>", o);
        CHECK(t.label(0) == "div.item");
    }
    SECTION("whitespace text dropped by default, kept on request") {
        Tree t = parse_html("<div> </div>");
        CHECK(t.child_count(0) == 0);
        HtmlOptions o;
        o.keep_whitespace_text = true;
        Tree u = parse_html("<div> </div>", o);
        CHECK(u.child_count(0) == 1);
    }
    SECTION("entities decode in text") {
        Tree t = parse_html("<p>a &amp; b &lt;c&gt; &#65;</p>");
        CHECK(t.text(t.first_child(0)) == "a & b <c> A");
    }
    SECTION("empty input fails") {
        CHECK_THROWS(parse_html(""));
        CHECK_THROWS(parse_html("   \n  "));
    }
}

TEST_CASE("ranked validation against arity sets") {
    RankedAlphabet ra;
    ra.arity["a"] = {2};
    Tree t = parse_term_tree("a(a,a)");
    auto v = validate_ranked(t, ra);
    REQUIRE(v.size() == 2); // the two leaves have 0 children
    ra.arity["a"] = {0, 2};
    CHECK(validate_ranked(t, ra).empty());

    RankedAlphabet rb;
    rb.arity["a"] = {1};
    rb.arity["b"] = {0};
    CHECK(validate_ranked(parse_term_tree("a(b)"), rb).empty());
    CHECK(rb.max_rank() == 1);
}
