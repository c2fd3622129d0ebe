#include "hypergame/error.hpp"
#include "hypergame/prophecy.hpp"
#include "random_instances.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace hypergame;

namespace
{

const std::string fixtures = HG_FIXTURES;

} // namespace

TEST_CASE("prophecy family for predict-and-agree")
{
    auto f = load_hyperltl(fixtures + "/predict_and_agree.hltl");
    auto fam = load_prophecy_family(fixtures + "/predict_and_agree.proph", f);
    REQUIRE(fam.entries.size() == 2);
    CHECK(fam.entries[0].name == "__p0");
    CHECK(fam.entries[0].index == 1);
    CHECK(same_formula(fam.entries[0].formula, parse_ltl("X a[p1]")));
    CHECK(fam.entries[1].name == "__p1");
    CHECK(fam.entries[1].index == 3);
    CHECK(same_formula(fam.entries[1].formula, parse_ltl("G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3]))")));
    CHECK(fam.names() == std::vector<std::string>{"__p0", "__p1"});
}

TEST_CASE("prophecy file errors")
{
    auto f = load_hyperltl(fixtures + "/predict_and_agree.hltl");
    CHECK(parse_prophecy_family("", f).empty());
    CHECK(parse_prophecy_family("# nothing here\n\n", f).empty());
    CHECK_THROWS_AS(parse_prophecy_family("at 1: X a[p2]", f), ValidationError);
    CHECK_THROWS_AS(parse_prophecy_family("at 2: X a[p1]", f), ValidationError);
    CHECK_THROWS_AS(parse_prophecy_family("at 5: X a[p1]", f), ValidationError);
    CHECK_THROWS_AS(parse_prophecy_family("on 1: X a[p1]", f), ParseError);
    CHECK_THROWS_AS(parse_prophecy_family("at 1 X a[p1]", f), ParseError);
    CHECK_THROWS_AS(parse_prophecy_family("at 1: X (a[p1]", f), ParseError);
    CHECK_THROWS_AS(parse_prophecy_family("at 1: X __p0[p1]", f), ValidationError);

    auto ea = load_hyperltl(fixtures + "/lookahead.hltl");
    CHECK_THROWS_AS(parse_prophecy_family("at 1: X a[p1]", ea), ValidationError);
    CHECK(parse_prophecy_family("", ea).empty());
}

TEST_CASE("normalizing to a strictly alternating prefix")
{
    auto ea = load_hyperltl(fixtures + "/lookahead.hltl");
    CHECK_FALSE(is_strictly_alternating(ea));
    auto n = normalize_alternating(ea);
    CHECK(is_strictly_alternating(n));
    CHECK(to_string(n).rfind("forall __v0. exists p1. forall p2. exists __v1.", 0) == 0);
    CHECK(same_formula(n.body, ea.body));

    auto agree = load_hyperltl(fixtures + "/predict_and_agree.hltl");
    CHECK(is_strictly_alternating(agree));
    CHECK(normalize_alternating(agree).prefix == agree.prefix);

    auto aa = parse_hyperltl("forall p1. forall p2. G (a[p1] <-> a[p2])");
    auto m = normalize_alternating(aa);
    REQUIRE(m.size() == 4);
    CHECK(m.prefix[1].var == "__v0");
    CHECK(m.prefix[2].var == "p2");
    CHECK(m.prefix[3].quantifier == Quantifier::Exists);
}

TEST_CASE("extended three-state structure")
{
    auto ks = load_ks(fixtures + "/three_state.ks");
    auto f = load_hyperltl(fixtures + "/predict_next.hltl");
    auto fam = load_prophecy_family(fixtures + "/predict_next.proph", f);
    auto kp = extend_ks(ks, fam);
    CHECK(kp.num_states() == 1 + 2 * 2);
    CHECK(kp.directions() == std::vector<std::string>{"A{}", "B{}", "A{__p0}", "B{__p0}"});
    CHECK(kp.aps() == std::vector<std::string>{"a", "__p0"});
    CHECK(kp.state_names()[kp.step("s_A{__p0}", "B{}")] == "s_B{}");
    CHECK(kp.state_names()[kp.step("s_init", "A{__p0}")] == "s_A{__p0}");
    CHECK(kp.state_names()[kp.step("s_B{}", "B{__p0}")] == "s_B{__p0}");
    CHECK(kp.label_names(*kp.find_state("s_B{__p0}")) == std::vector<std::string>{"a", "__p0"});
    CHECK(kp.label_names(kp.init()).empty());
    CHECK(kp.state_names()[kp.init()] == "s_init");

    auto g = parse_hyperltl("forall p1. exists p2. G (a[p1] <-> a[p2])");
    CHECK(extend_ks(ks, parse_prophecy_family("", g)).num_states() == ks.num_states());

    std::vector<std::string> aps{"a", "__p0"};
    auto clash = KripkeStructure(aps, {"A"}, {"s_init", "s"}, 0, {{1}, {1}}, {0, 0});
    CHECK_THROWS_AS(extend_ks(clash, fam), ValidationError);
}

TEST_CASE("rewritten formula")
{
    auto f = load_hyperltl(fixtures + "/predict_next.hltl");
    auto fam = load_prophecy_family(fixtures + "/predict_next.proph", f);
    auto r = rewrite_formula(f, fam);
    CHECK(r.prefix == f.prefix);
    CHECK(same_formula(r.body, implies(parse_ltl("X G (__p0[p1] <-> X a[p1])"), f.body)));

    auto empty = rewrite_formula(f, parse_prophecy_family("", f));
    CHECK(same_formula(empty.body, implies(parse_ltl("X G true"), f.body)));
}

TEST_CASE("rewriting predict-and-agree with its family")
{
    auto f = load_hyperltl(fixtures + "/predict_and_agree.hltl");
    auto fam = load_prophecy_family(fixtures + "/predict_and_agree.proph", f);
    auto r = rewrite_formula(f, fam);
    // displayed with one X G per prophecy; equal as languages
    auto shown = parse_ltl("((X G (__p0[p1] <-> X a[p1])) && "
                           "(X G (__p1[p3] <-> G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3]))))) -> "
                           "(G F (a[p2] <-> X a[p1]) && X X (a[p4] <-> G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3]))))");
    auto alphabet = indexed_aps(r.body);
    CHECK(alphabet == indexed_aps(shown));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 3000; ++i) {
        auto w = testing::random_word(rng, alphabet.size(), 4, 4);
        CHECK(eval_on_word(r.body, alphabet, w) == eval_on_word(shown, alphabet, w));
    }
}

TEST_CASE("empty family leaves the semantics unchanged")
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        HyperLtlFormula f;
        f.prefix = {{Quantifier::Forall, "p1"}, {Quantifier::Exists, "p2"}};
        f.body = testing::random_body(rng, {"a", "b"}, {"p1", "p2"}, 3);
        auto r = rewrite_formula(f, ProphecyFamily{});
        auto alphabet = indexed_aps(r.body);
        auto w = testing::random_word(rng, alphabet.size(), 3, 3);
        CHECK(eval_on_word(r.body, alphabet, w) == eval_on_word(f.body, alphabet, w));
    }
}

TEST_CASE("manifest round trip")
{
    auto f = load_hyperltl(fixtures + "/predict_and_agree.hltl");
    auto fam = load_prophecy_family(fixtures + "/predict_and_agree.proph", f);
    auto text = render_manifest(fam);
    CHECK(text.rfind("prophecy __p0 at 1: ", 0) == 0);
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line))
        lines.push_back(line);
    auto back = parse_manifest(lines, f);
    REQUIRE(back.entries.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.entries[i].name == fam.entries[i].name);
        CHECK(back.entries[i].index == fam.entries[i].index);
        CHECK(same_formula(back.entries[i].formula, fam.entries[i].formula));
    }
    CHECK_THROWS_AS(parse_manifest({"prophecy __p3 at 1: X a[p1]"}, f), ValidationError);
    CHECK_THROWS_AS(parse_manifest({"at 1: X a[p1]"}, f), ParseError);
}
