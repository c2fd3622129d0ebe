#include "doctest.h"

#include "hypergame/error.hpp"
#include "hypergame/model.hpp"

using namespace hypergame;

namespace
{

KripkeStructure three_state()
{
    return load_ks(HG_FIXTURES "/three_state.ks");
}

} // namespace

TEST_CASE("three-state fixture")
{
    auto ks = three_state();
    CHECK(ks.num_states() == 3);
    CHECK(ks.state_names()[ks.init()] == "s_init");
    CHECK(ks.directions() == std::vector<std::string>{"A", "B"});
    CHECK(ks.label_names(ks.init()).empty());
    CHECK(ks.label_names(*ks.find_state("s_A")).empty());
    CHECK(ks.label_names(*ks.find_state("s_B")) == std::vector<std::string>{"a"});

    CHECK(ks.step("s_init", "A") == *ks.find_state("s_A"));
    CHECK(ks.step("s_init", "B") == *ks.find_state("s_A"));
    CHECK(ks.step("s_A", "B") == *ks.find_state("s_B"));
    CHECK(ks.step("s_B", "B") == *ks.find_state("s_B"));
    CHECK_THROWS_AS((void)ks.step("s_C", "A"), ValidationError);
    CHECK_THROWS_AS((void)ks.step("s_A", "C"), ValidationError);
    CHECK_THROWS_AS((void)ks.step(7, 0), ValidationError);
}

TEST_CASE("minimal structure")
{
    auto ks = parse_ks("aps: ;\ndirections: d;\nstate s init { d -> t; }\nstate t { d -> t; }\n");
    CHECK(ks.num_states() == 2);
    CHECK(ks.step(0, 0) == 1);
    CHECK(ks.step(1, 0) == 1);
}

TEST_CASE("parse errors")
{
    const std::string head = "aps: a;\ndirections: A, B;\n";
    SUBCASE("totality")
    {
        CHECK_THROWS_WITH_AS(parse_ks(head + "state i init { A -> x; B -> x; }\nstate x { A -> x; }"),
                             doctest::Contains("totality"), ValidationError);
    }
    SUBCASE("undeclared ap")
    {
        CHECK_THROWS_AS(parse_ks(head + "state i init { labels {b}; A -> x; B -> x; }\nstate x { A -> x; B -> x; }"),
                        ValidationError);
    }
    SUBCASE("unreachable")
    {
        CHECK_THROWS_WITH_AS(parse_ks(head + "state i init { A -> x; B -> x; }\nstate x { A -> x; B -> x; }\n"
                                             "state y { A -> x; B -> x; }"),
                             doctest::Contains("unreachable"), ValidationError);
    }
    SUBCASE("edge into init")
    {
        CHECK_THROWS_AS(parse_ks(head + "state i init { A -> x; B -> x; }\nstate x { A -> i; B -> x; }"),
                        ValidationError);
    }
    SUBCASE("no init")
    {
        CHECK_THROWS_AS(parse_ks(head + "state x { A -> x; B -> x; }"), ValidationError);
    }
    SUBCASE("two inits")
    {
        CHECK_THROWS_AS(parse_ks(head + "state i init { A -> x; B -> x; }\nstate x init { A -> x; B -> x; }"),
                        ValidationError);
    }
    SUBCASE("syntax error reports position")
    {
        try {
            (void)parse_ks(head + "state i init { A => x; }");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(e.column() == 18);
        }
    }
    SUBCASE("unknown target")
    {
        CHECK_THROWS_AS(parse_ks(head + "state i init { A -> x; B -> z; }\nstate x { A -> x; B -> x; }"), ParseError);
    }
}

TEST_CASE("render round trip")
{
    auto ks = three_state();
    auto text = render_ks(ks);
    CHECK(parse_ks(text) == ks);
    CHECK(render_ks(parse_ks(text)) == text);
}

TEST_CASE("lasso traces")
{
    auto ks = three_state();
    StateId init = ks.init(), sa = *ks.find_state("s_A"), sb = *ks.find_state("s_B");
    Letter a = 1;

    auto w = lasso_trace(ks, {{init}, {sa}});
    CHECK(w.stem == std::vector<Letter>{0});
    CHECK(w.loop == std::vector<Letter>{0});

    w = lasso_trace(ks, {{init, sa}, {sb}});
    CHECK(w.stem == std::vector<Letter>{0, 0});
    CHECK(w.loop == std::vector<Letter>{a});

    CHECK_THROWS_AS(lasso_trace(ks, {{init}, {init}}), ValidationError);
    CHECK_THROWS_AS(lasso_trace(ks, {{sa}, {sa}}), ValidationError);
    CHECK_THROWS_AS(lasso_trace(ks, {{init}, {}}), ValidationError);
}

TEST_CASE("every direction word induces a path")
{
    auto ks = three_state();
    for (unsigned bits = 0; bits < 256; ++bits) {
        StateId s = ks.init();
        std::vector<StateId> path{s};
        for (int i = 0; i < 8; ++i) {
            s = ks.step(s, (bits >> i) & 1U);
            path.push_back(s);
        }
        Lasso l{std::vector<StateId>(path.begin(), path.end() - 1), {path.back()}};
        l.loop = {path.back()};
        // the self-loop of the last state always exists in this structure
        CHECK_NOTHROW(validate_lasso(ks, l));
    }
}

TEST_CASE("canonical words")
{
    CHECK(canonical({{1, 2, 1, 2}, {1, 2, 1, 2}}) == UpWord{{}, {1, 2}});
    CHECK(canonical({{0, 0, 0}, {1}}) == UpWord{{0, 0, 0}, {1}});
    CHECK(canonical({{3}, {2, 3}}) == UpWord{{}, {3, 2}});
}
