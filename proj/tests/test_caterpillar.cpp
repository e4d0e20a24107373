#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/gen.hpp"
#include "treelog/caterpillar.hpp"
#include "treelog/term_format.hpp"

using namespace treelog;

namespace {

// random caterpillar expression over the unranked axes and basic tests
CatPtr random_expr(std::mt19937& rng, int depth) {
    if (depth == 0 || rng() % 3 == 0) {
        switch (rng() % 5) {
            case 0: return cat::axis(Builtin::firstchild);
            case 1: return cat::axis(Builtin::nextsibling);
            case 2: return cat::test(Builtin::leaf);
            case 3: return cat::test(Builtin::label, "a");
            default: return cat::epsilon();
        }
    }
    switch (rng() % 4) {
        case 0: return cat::concat({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        case 1: return cat::alt({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        case 2: return cat::star(random_expr(rng, depth - 1));
        default: return cat::inverse(random_expr(rng, depth - 1));
    }
}

bool is_inverse_normal(const CaterpillarExpr& e) {
    using K = CaterpillarExpr::Kind;
    if (e.kind == K::inverse) return e.parts[0]->kind == K::axis;
    for (const auto& p : e.parts)
        if (!is_inverse_normal(*p)) return false;
    return true;
}

std::size_t expr_size(const CaterpillarExpr& e) {
    std::size_t n = 1;
    for (const auto& p : e.parts) n += expr_size(*p);
    return n;
}

}  // namespace

TEST_CASE("document order on the six-node example tree") {
    Tree t = parse_term_tree("a(a,a(a,a),a)");
    CatPtr prec = cat::document_order();
    // image of n1 (id 0) is everything below/after it
    auto from_root = eval_caterpillar(t, prec, {0});
    CHECK(from_root == std::set<NodeId>{1, 2, 3, 4, 5});
    // pairwise: i < j iff i prec j
    NodeRelation r = eval_caterpillar_relation(t, *prec);
    for (NodeId i = 0; i < 6; ++i)
        for (NodeId j = 0; j < 6; ++j) CHECK(r.get(i, j) == (i < j));
}

TEST_CASE("document order equals id order on random trees") {
    std::mt19937 rng(23);
    CatPtr prec = cat::document_order();
    for (int k = 0; k < 100; ++k) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 12));
        NodeRelation r = eval_caterpillar_relation(t, *prec);
        for (NodeId i = 0; i < t.node_count(); ++i)
            for (NodeId j = 0; j < t.node_count(); ++j) REQUIRE(r.get(i, j) == (i < j));
    }
}

TEST_CASE("epsilon evaluates to the identity") {
    Tree t = parse_term_tree("a(b,c)");
    CHECK(eval_caterpillar(t, cat::epsilon(), {1}) == std::set<NodeId>{1});
}

TEST_CASE("inversion pushes to atoms") {
    // (firstchild.nextsibling*)^-1 = (nextsibling^-1)*.firstchild^-1
    CatPtr child = cat::child();
    CatPtr inv = invert(child);
    CHECK(is_inverse_normal(*inv));
    CHECK(to_string(*inv) == "(nextsibling^-1)*.firstchild^-1");
    CHECK(expr_size(*inv) <= expr_size(*child) + 2); // one inverse marker per axis

    // (E^-1)^-1 = E
    CatPtr e = cat::concat({cat::axis(Builtin::firstchild), cat::test(Builtin::leaf)});
    CatPtr back = invert(cat::inverse(e));
    CHECK(to_string(*back) == to_string(*push_inversions(e)));
}

TEST_CASE("invert computes the converse relation") {
    std::mt19937 rng(29);
    for (int k = 0; k < 100; ++k) {
        Tree t = testgen::random_tree(rng, 8);
        CatPtr e = random_expr(rng, 3);
        NodeRelation fwd = eval_caterpillar_relation(t, *e);
        NodeRelation inv = eval_caterpillar_relation(t, *invert(e));
        REQUIRE(inv == fwd.transpose());
        // and double inversion is the original
        NodeRelation twice = eval_caterpillar_relation(t, *invert(invert(e)));
        REQUIRE(twice == fwd);
    }
}

TEST_CASE("caterpillar evaluation cap") {
    TreeBuilder b;
    NodeId cur = b.add_root("a");
    for (int i = 0; i < 2100; ++i) cur = b.add_child(cur, "a");
    Tree t = b.finish();
    CHECK_THROWS_AS(eval_caterpillar(t, cat::epsilon(), {0}), CapExceeded);
}
