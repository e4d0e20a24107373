#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/gen.hpp"
#include "treelog/datalog_parse.hpp"
#include "treelog/evaluate.hpp"
#include "treelog/naive.hpp"
#include "treelog/normalize.hpp"
#include "treelog/term_format.hpp"

using namespace treelog;

TEST_CASE("depth-index maps") {
    SECTION("single edge") {
        Digraph g{2, {{0, 1}}};
        auto d = depth_index(g);
        REQUIRE(d);
        CHECK((*d)[1] - (*d)[0] == 1);
    }
    SECTION("two-cycle has none") {
        Digraph g{2, {{0, 1}, {1, 0}}};
        CHECK_FALSE(depth_index(g));
    }
    SECTION("diamond works, both paths length two") {
        Digraph g{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}};
        auto d = depth_index(g);
        REQUIRE(d);
        CHECK((*d)[3] - (*d)[0] == 2);
        // brute force: all paths between fixed endpoints have equal length
    }
    SECTION("unequal paths have none") {
        Digraph g{3, {{0, 1}, {1, 2}, {0, 2}}};
        CHECK_FALSE(depth_index(g));
    }
    SECTION("self loop has none") {
        Digraph g{1, {{0, 0}}};
        CHECK_FALSE(depth_index(g));
    }
}

TEST_CASE("ranked acyclicity pass") {
    SECTION("chasing child_1 merges targets") {
        Program p = parse_program("p(X) :- child_1(X,Y), child_1(X,Z), q(Y), r(Z).");
        std::vector<Diagnostic> diags;
        Program out = make_acyclic_ranked(p, &diags);
        REQUIRE(out.rules.size() == 1);
        CHECK(diags.empty());
        // y and z merged: two unary atoms on one variable
        std::set<std::string> vars = rule_vars(out.rules[0]);
        CHECK(vars.size() == 2);
        CHECK(is_acyclic(out.rules[0]));
    }
    SECTION("directed child cycle drops") {
        Program p = parse_program("p(X) :- child_1(X,Y), child_1(Y,X).");
        std::vector<Diagnostic> diags;
        Program out = make_acyclic_ranked(p, &diags);
        CHECK(out.rules.empty());
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].message.find("depth-index") != std::string::npos);
    }
    SECTION("two different k into one variable drops") {
        Program p = parse_program("p(X) :- child_1(Y,X), child_2(Z,X).");
        std::vector<Diagnostic> diags;
        Program out = make_acyclic_ranked(p, &diags);
        CHECK(out.rules.empty());
        REQUIRE_FALSE(diags.empty());
    }
}

TEST_CASE("unranked acyclicity pass") {
    SECTION("rule without binary atoms is unchanged") {
        Program p = parse_program("p(X) :- leaf(X), label(X,\"a\").");
        Program out = make_acyclic_unranked(p);
        REQUIRE(out.rules.size() == 1);
        CHECK(to_string(out.rules[0]) == to_string(p.rules[0]));
    }
    SECTION("child becomes firstchild + nextsibling*") {
        Program p = parse_program("p(X) :- q(X0), child(X0,X).");
        Program out = make_acyclic_unranked(p);
        REQUIRE(out.rules.size() == 1);
        const Rule& r = out.rules[0];
        bool has_fc = false, has_cat = false, has_child = false;
        for (const auto& a : r.body) {
            has_fc = has_fc || a.pred.is_builtin(Builtin::firstchild);
            has_cat = has_cat || a.pred.kind == Predicate::Kind::caterpillar;
            has_child = has_child || a.pred.is_builtin(Builtin::child);
        }
        CHECK(has_fc);
        CHECK(has_cat);
        CHECK_FALSE(has_child);
        CHECK(is_acyclic(r));
    }
    SECTION("parents of one sibling group merge") {
        Program p = parse_program("p(X) :- child(X,Y), child(Z,W), nextsibling(Y,W), q(Z).");
        Program out = make_acyclic_unranked(p);
        REQUIRE(out.rules.size() == 1);
        // X and Z denote the same parent
        std::set<std::string> vars = rule_vars(out.rules[0]);
        CHECK(vars.count("X") == 1);
        CHECK(vars.count("Z") == 0);
        CHECK(is_acyclic(out.rules[0]));
    }
    SECTION("sibling chains with equal offsets merge") {
        Program p = parse_program("p(X) :- nextsibling(X,Y), nextsibling(X,Z), q(Y), r(Z).");
        Program out = make_acyclic_unranked(p);
        REQUIRE(out.rules.size() == 1);
        CHECK(rule_vars(out.rules[0]).size() == 2);
    }
    SECTION("contradictory chains drop") {
        // y both the direct next sibling and two steps away
        Program p = parse_program("p(X) :- nextsibling(X,Y), nextsibling(X,Z), nextsibling(Z,Y).");
        std::vector<Diagnostic> diags;
        Program out = make_acyclic_unranked(p, &diags);
        CHECK(out.rules.empty());
        REQUIRE_FALSE(diags.empty());
    }
    SECTION("lastchild unfolds") {
        Program p = parse_program("p(X) :- q(X0), lastchild(X0,X).");
        Program out = make_acyclic_unranked(p);
        REQUIRE(out.rules.size() == 1);
        bool has_last = false;
        for (const auto& a : out.rules[0].body) has_last = has_last || a.pred.is_builtin(Builtin::lastsibling);
        CHECK(has_last);
    }
    SECTION("equivalence on random rules with child and lastchild") {
        std::mt19937 rng(47);
        int compared = 0;
        for (int i = 0; i < 500; ++i) {
            Program p = testgen::random_program(rng, {.max_rules = 2});
            std::vector<Diagnostic> diags;
            Program out = make_acyclic_unranked(p, &diags);
            for (const auto& r : out.rules) REQUIRE(is_acyclic(r));
            Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 10));
            auto ref = naive_fixpoint(p, t);
            auto got = naive_fixpoint(out, t);
            for (auto& [name, ext] : ref.extents) {
                REQUIRE(got.extents[name] == ext);
                ++compared;
            }
        }
        CHECK(compared > 0);
    }
}

TEST_CASE("doc-order connection") {
    SECTION("disconnected rule is linked") {
        Program p = parse_program("p(X) :- p1(X), p2(Y).");
        Program out = connect_with_doc_order(p);
        REQUIRE(out.rules.size() == 1);
        const Rule& r = out.rules[0];
        REQUIRE(r.body.size() == 3);
        CHECK(r.body[2].pred.kind == Predicate::Kind::caterpillar);
        CHECK(is_connected(r));
        CHECK(is_acyclic(r));
    }
    SECTION("connected rule unchanged") {
        Program p = parse_program("p(X) :- q(X0), firstchild(X0,X).");
        Program out = connect_with_doc_order(p);
        CHECK(to_string(out.rules[0]) == to_string(p.rules[0]));
    }
    SECTION("the link relation is total") {
        std::mt19937 rng(53);
        Tree t = testgen::random_tree(rng, 5);
        NodeRelation r = eval_caterpillar_relation(t, *doc_order_link_expr());
        for (NodeId i = 0; i < 5; ++i)
            for (NodeId j = 0; j < 5; ++j) REQUIRE(r.get(i, j));
    }
}

TEST_CASE("decompose yields the three normal forms") {
    Program p = parse_program("p(X) :- q(X0), firstchild(X0,X1), s(X1), nextsibling(X1,X).");
    Program out = decompose(p);
    CHECK(is_tmnf(out));
    // semantics preserved
    std::mt19937 rng(59);
    Program defs = parse_program("q(X) :- root(X).\ns(X) :- label(X,\"a\").");
    Program full = p, full_out;
    for (const auto& r : defs.rules) full.rules.push_back(r);
    full_out = decompose(full);
    for (int i = 0; i < 50; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 9));
        CHECK(naive_evaluate(full, t, "p") == naive_evaluate(full_out, t, "p"));
    }
}

TEST_CASE("decompose leaves two-atom rules alone") {
    Program p = parse_program("p(X) :- q(X0), firstchild(X0,X).");
    Program out = decompose(p);
    REQUIRE(out.rules.size() == 1);
    CHECK(to_string(out.rules[0]) == to_string(p.rules[0]));
}

TEST_CASE("generated names never collide with user names") {
    std::mt19937 rng(61);
    for (int i = 0; i < 50; ++i) {
        Program p = testgen::random_program(rng, {.max_rules = 4, .allow_child = false, .allow_lastchild = false});
        Program out = decompose(connect_with_doc_order(p));
        std::set<std::string> fresh;
        for (const auto& r : out.rules) {
            if (r.head.pred.name.starts_with("$")) fresh.insert(r.head.pred.name);
        }
        for (const auto& name : fresh) CHECK(name[0] == '$');
        // distinct generated heads stay distinct from user pool p0..p3
        for (const auto& r : out.rules)
            if (!r.head.pred.name.starts_with("$"))
                CHECK((r.head.pred.name[0] == 'p'));
    }
}

TEST_CASE("caterpillar steps compile to the example rule set") {
    // hand-built minimal DFA for child = firstchild.nextsibling*
    EpsNFA dfa;
    int q1 = dfa.add_state();
    int q2 = dfa.add_state();
    dfa.start = q1;
    dfa.finals = {q2};
    dfa.add(q1, {NfaSymbol::Kind::axis, Builtin::firstchild, "", 0}, q2);
    dfa.add(q2, {NfaSymbol::Kind::axis, Builtin::nextsibling, "", 0}, q2);
    Program scratch;
    NameSupply names(scratch);
    auto rules = nfa_to_rules(dfa, Predicate::intensional("p"), Predicate::intensional("pchild"), names);
    REQUIRE(rules.size() == 4);
    Program out;
    out.rules = rules;
    CHECK(is_tmnf(out));
    std::set<std::string> printed;
    for (const auto& r : rules) printed.insert(to_string(r));
    CHECK(printed == std::set<std::string>{
                         "$q0(X) :- p(X).",
                         "$q1(X) :- $q0(X0), firstchild(X0,X).",
                         "$q1(X) :- $q1(X0), nextsibling(X0,X).",
                         "pchild(X) :- $q1(X).",
                     });
}

TEST_CASE("caterpillar compilation: epsilon copies the source") {
    Program scratch;
    NameSupply names(scratch);
    auto rules = caterpillar_to_tmnf(Predicate::intensional("p"), cat::epsilon(),
                                     Predicate::intensional("t"), names);
    Program out;
    out.rules = rules;
    out.rules.push_back(parse_program("p(X) :- leaf(X).").rules[0]);
    CHECK(is_tmnf(out));
    std::mt19937 rng(67);
    for (int i = 0; i < 20; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 8));
        CHECK(naive_evaluate(out, t, "t") == naive_evaluate(out, t, "p"));
    }
}

TEST_CASE("caterpillar compilation matches the relational oracle") {
    std::mt19937 rng(71);
    auto random_expr = [&](auto&& self, int depth) -> CatPtr {
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
            case 0: return cat::concat({self(self, depth - 1), self(self, depth - 1)});
            case 1: return cat::alt({self(self, depth - 1), self(self, depth - 1)});
            case 2: return cat::star(self(self, depth - 1));
            default: return cat::inverse(self(self, depth - 1));
        }
    };
    for (int i = 0; i < 200; ++i) {
        CatPtr e = random_expr(random_expr, 3);
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 8));
        Program p = parse_program("src(X) :- label(X,\"a\").");
        NameSupply names(p);
        auto rules = caterpillar_to_tmnf(Predicate::intensional("src"), e, Predicate::intensional("tgt"), names);
        Program full = p;
        for (auto& r : rules) full.rules.push_back(r);
        std::set<NodeId> sources;
        for (NodeId n = 0; n < t.node_count(); ++n)
            if (t.label(n) == "a") sources.insert(n);
        auto expect = eval_caterpillar(t, e, sources);
        auto got = evaluate(full, t, "tgt");
        REQUIRE(got == expect);
    }
}

TEST_CASE("to_tmnf: output is TMNF and equivalent") {
    Program p = parse_program(testgen::read_file(testgen::fixture_path("even_a.dl")));
    std::vector<Diagnostic> diags;
    Program out = to_tmnf(p, {}, &diags);
    CHECK(is_tmnf(out));
    std::mt19937 rng(73);
    for (int i = 0; i < 50; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 10));
        REQUIRE(evaluate(out, t, "c0") == naive_evaluate(p, t, "c0"));
    }
}

TEST_CASE("to_tmnf eliminates child, lastchild and child_k") {
    Program p = parse_program(
        "p(X) :- q(X0), child(X0,X), label(X,\"a\").\n"
        "q(X) :- root(X).\n"
        "r(X) :- q(X0), lastchild(X0,X).\n"
        "s(X) :- q(X0), child_3(X0,X).\n");
    Program out = to_tmnf(p);
    CHECK(is_tmnf(out));
    for (const auto& r : out.rules)
        for (const auto& a : r.body) {
            CHECK_FALSE(a.pred.is_builtin(Builtin::child));
            CHECK_FALSE(a.pred.is_builtin(Builtin::lastchild));
            CHECK_FALSE(a.pred.is_builtin(Builtin::child_k));
            CHECK(a.pred.kind != Predicate::Kind::caterpillar);
        }
    std::mt19937 rng(79);
    for (int i = 0; i < 40; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 10));
        for (auto q : {"p", "q", "r", "s"}) REQUIRE(evaluate(out, t, q) == naive_evaluate(p, t, q));
    }
}

TEST_CASE("to_tmnf on an already normal program preserves semantics") {
    Program p = parse_program(
        "q1(X) :- p(X).\n"
        "q2(X) :- q1(X0), firstchild(X0,X).\n"
        "q2(X) :- q2(X0), nextsibling(X0,X).\n"
        "p(X) :- root(X).\n");
    Program out = to_tmnf(p);
    CHECK(is_tmnf(out));
    std::mt19937 rng(83);
    for (int i = 0; i < 30; ++i) {
        Tree t = testgen::random_tree(rng, 1 + static_cast<int>(rng() % 9));
        REQUIRE(evaluate(out, t, "q2") == evaluate(p, t, "q2"));
    }
}

TEST_CASE("to_tmnf size is linear per fixture") {
    Program p = parse_program(testgen::read_file(testgen::fixture_path("even_a.dl")));
    Program out = to_tmnf(p);
    auto size = [](const Program& q) {
        std::size_t n = 0;
        for (const auto& r : q.rules) n += 1 + r.body.size();
        return n;
    };
    // measured linearity witness: fixed constant, asserted
    CHECK(size(out) <= 40 * size(p));
}

TEST_CASE("stage stops expose intermediates") {
    Program p = parse_program("p(X) :- p1(X), p2(Y), child(Y,Z), q(Z).");
    Program acyc = to_tmnf(p, {.stop_after = TmnfStage::acyclic});
    for (const auto& r : acyc.rules) CHECK(is_acyclic(r));
    Program conn = to_tmnf(p, {.stop_after = TmnfStage::connect});
    for (const auto& r : conn.rules) {
        CHECK(is_acyclic(r));
        CHECK(is_connected(r));
    }
    Program full = to_tmnf(p);
    CHECK(is_tmnf(full));
}
