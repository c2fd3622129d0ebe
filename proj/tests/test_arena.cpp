#include "hypergame/arena.hpp"
#include "hypergame/error.hpp"
#include "random_instances.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace hypergame;

namespace
{

const std::string fixtures = HG_FIXTURES;

struct Instance
{
    KripkeStructure ks;
    HyperLtlFormula f;
    Dpa a;
};

Instance load(const std::string& ks, const std::string& formula)
{
    auto k = load_ks(fixtures + "/" + ks);
    auto f = load_hyperltl(fixtures + "/" + formula);
    auto a = ltl_to_dpa(f.body, game_alphabet(f));
    return {std::move(k), std::move(f), std::move(a)};
}

StateId st(const KripkeStructure& ks, const char* name)
{
    return *ks.find_state(name);
}

// Brute-force check that ~hi refines ~lo on every vertex pair.
bool refines_pairwise(const Observations& o, PlayerId hi, PlayerId lo)
{
    for (VertexId u = 0; u < o.vertices; ++u)
        for (VertexId v = 0; v < o.vertices; ++v)
            if (o.obs[hi - 1][u] == o.obs[hi - 1][v] && o.obs[lo - 1][u] != o.obs[lo - 1][v])
                return false;
    return true;
}

} // namespace

TEST_CASE("two-player game on the three-state structure has 18 vertices per automaton state")
{
    auto in = load("three_state.ks", "predict_next.hltl");
    auto g = build_two_player_game(in.ks, in.f, in.a, Materialization::full);
    CHECK(g.size() == 18 * in.a.size());
    const auto& v0 = g.vertex(g.arena().initial);
    CHECK(v0.states == std::vector<StateId>{in.ks.init(), in.ks.init()});
    CHECK(v0.q == in.a.initial);
    CHECK(v0.turn == TwoPlayerGame::refuter);
    for (VertexId v = 0; v < g.size(); ++v)
        CHECK(g.arena().color[v] == in.a.color[g.vertex(v).q]);

    auto reach = build_two_player_game(in.ks, in.f, in.a);
    CHECK(reach.size() <= g.size());
    CHECK(reach.arena().initial == 0);
}

TEST_CASE("two-player game rejects other prefixes")
{
    auto in = load("three_state.ks", "lookahead.hltl");
    CHECK_THROWS_AS(build_two_player_game(in.ks, in.f, in.a), ValidationError);
}

TEST_CASE("transitions follow the round structure")
{
    auto in = load("three_state.ks", "predict_next.hltl");
    GameOptions opts;
    opts.materialization = Materialization::full;
    auto g = build_mpg(in.ks, in.f, in.a, opts);
    CHECK(g.num_players() == 2);
    auto s_init = in.ks.init(), s_A = st(in.ks, "s_A"), s_B = st(in.ks, "s_B");
    DirId A = *in.ks.find_direction("A"), B = *in.ks.find_direction("B");

    // player 2 moves its copy and hands back to player 1, q unchanged
    auto v = *g.find({{s_A, s_B}, in.a.initial, 2});
    auto w = g.vertex(g.next(v, A));
    CHECK(w.states == std::vector<StateId>{s_A, s_A});
    CHECK(w.turn == 1);
    CHECK(w.q == in.a.initial);

    // player 1 moves and the automaton reads the letter of the old states
    auto u = *g.find({{s_B, s_init}, in.a.initial, 1});
    auto x = g.vertex(g.next(u, B));
    CHECK(x.states == std::vector<StateId>{s_B, s_init});
    CHECK(x.turn == 2);
    CHECK(x.q == in.a.step(in.a.initial, g.letter({s_B, s_init})));
}

TEST_CASE("exists-forall lookahead formula: coalition is the existential player")
{
    auto in = load("three_state.ks", "lookahead.hltl");
    auto g = build_mpg(in.ks, in.f, in.a);
    CHECK(g.coalition() == std::vector<PlayerId>{1});
    CHECK(g.in_coalition(1));
    CHECK_FALSE(g.in_coalition(2));
    auto predict = load("three_state.ks", "predict_next.hltl");
    CHECK(build_mpg(predict.ks, predict.f, predict.a).coalition() == std::vector<PlayerId>{2});
}

TEST_CASE("observation classes")
{
    auto in = load("three_state.ks", "predict_next.hltl");
    GameOptions opts;
    opts.materialization = Materialization::full;
    auto g = build_mpg(in.ks, in.f, in.a, opts);
    auto s_A = st(in.ks, "s_A"), s_B = st(in.ks, "s_B");
    AutState q = 0, q2 = in.a.size() - 1;

    auto u = *g.find({{s_A, s_B}, q, 2});
    auto v = *g.find({{s_A, s_A}, q2, 2});
    CHECK(g.observation_class(u, 1) == g.observation_class(v, 1));
    CHECK(g.obs_id(u, 1) == g.obs_id(v, 1));
    CHECK(g.observation_class(u, 2) != g.observation_class(v, 2));

    auto u1 = *g.find({{s_A, s_B}, q, 1});
    CHECK(g.observation_class(u, 1) != g.observation_class(u1, 1));

    auto c = g.observation_class(u, 2);
    CHECK(c.states == std::vector<StateId>{s_A, s_B});
    CHECK(c.turn == 2);
    CHECK_FALSE(c.q.has_value());
    CHECK(g.find_obs(2, c) == g.obs_id(u, 2));
    CHECK(to_string(c, in.ks) == "(s_A,s_B) turn 2");
}

TEST_CASE("full-information game")
{
    auto in = load("three_state.ks", "lookahead.hltl");
    auto g = build_mpg(in.ks, in.f, in.a);
    auto full = build_full_info_game(in.ks, in.f, in.a);
    CHECK(full.dump() == g.dump());
    for (PlayerId p = 1; p <= 2; ++p) {
        CHECK(full.num_obs(p) == full.size());
        CHECK(refines(observations_of(full), p, p));
    }
    // identity observations refine the projections of the partial game
    Observations mixed;
    mixed.vertices = g.size();
    mixed.obs = {observations_of(full).obs[0], observations_of(g).obs[0]};
    CHECK(refines(mixed, 1, 2));

    HyperLtlFormula one = parse_hyperltl("exists p1. G F a[p1]");
    auto a1 = ltl_to_dpa(one.body, game_alphabet(one));
    CHECK(build_full_info_game(in.ks, one, a1).dump() == build_mpg(in.ks, one, a1).dump());
}

TEST_CASE("alphabet mismatch is rejected")
{
    auto in = load("three_state.ks", "predict_next.hltl");
    auto other = parse_hyperltl("forall p1. exists p2. G (a[p1] <-> a[p2])");
    auto small = ltl_to_dpa(parse_ltl("G a[p1]"), {{"a", "p1"}});
    CHECK_THROWS_AS(build_mpg(in.ks, other, small), ValidationError);
    auto foreign = ltl_to_dpa(parse_ltl("G b[p1]"), {{"b", "p1"}});
    auto fb = parse_hyperltl("forall p1. G b[p1]");
    CHECK_THROWS_AS(build_mpg(in.ks, fb, foreign), ValidationError);
}

TEST_CASE("hierarchy: crossing observations are refuted")
{
    // vertices (x, y) in {0,1}^2; player 1 sees x, player 2 sees y
    Observations o;
    o.vertices = 4;
    o.obs = {{0, 0, 1, 1}, {0, 1, 0, 1}};
    auto r = is_hierarchical(o);
    REQUIRE_FALSE(r.hierarchical());
    CHECK_FALSE(refines_pairwise(o, 1, 2));
    CHECK_FALSE(refines_pairwise(o, 2, 1));
    const auto& w = *r.witness;
    CHECK(o.obs[w.p - 1][w.u] == o.obs[w.p - 1][w.v]);
    CHECK(o.obs[w.p2 - 1][w.u] != o.obs[w.p2 - 1][w.v]);
    CHECK(o.obs[w.p2 - 1][w.x] == o.obs[w.p2 - 1][w.y]);
    CHECK(o.obs[w.p - 1][w.x] != o.obs[w.p - 1][w.y]);

    Observations single;
    single.vertices = 3;
    single.obs = {{0, 1, 0}};
    CHECK(is_hierarchical(single).hierarchical());
    CHECK(is_hierarchical(single).order == std::vector<PlayerId>{1});

    // nested but listed in reverse: player 1 knows more than player 2
    Observations nested;
    nested.vertices = 4;
    nested.obs = {{0, 1, 2, 3}, {0, 0, 1, 1}};
    auto n = is_hierarchical(nested);
    CHECK(n.hierarchical());
    CHECK(n.order == std::vector<PlayerId>{2, 1});
}

TEST_CASE("built games are hierarchical in quantifier order")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        auto ks = testing::random_ks(rng, 1 + testing::pick(rng, 3), 2, {"a", "b"});
        std::vector<std::string> vars{"p1", "p2", "p3"};
        vars.resize(1 + testing::pick(rng, 3));
        HyperLtlFormula f;
        for (const auto& v : vars)
            f.prefix.push_back({testing::pick(rng, 2) == 0 ? Quantifier::Forall : Quantifier::Exists, v});
        f.body = testing::random_body(rng, {"a", "b"}, vars, 2);
        auto a = ltl_to_dpa(f.body, game_alphabet(f));
        auto g = build_mpg(ks, f, a);
        auto r = is_hierarchical(g);
        REQUIRE(r.hierarchical());
        std::vector<PlayerId> expect;
        for (PlayerId p = 1; p <= f.size(); ++p)
            expect.push_back(p);
        CHECK(r.order == expect);
        for (int k = 0; k < 1000; ++k) {
            VertexId u = testing::pick(rng, g.size()), v = testing::pick(rng, g.size());
            for (PlayerId hi = 2; hi <= f.size(); ++hi)
                if (g.obs_id(u, hi) == g.obs_id(v, hi))
                    CHECK(g.obs_id(u, hi - 1) == g.obs_id(v, hi - 1));
        }
    }
}

TEST_CASE("plays project to paths of every copy")
{
    std::mt19937_64 rng(11);
    auto in = load("three_state.ks", "predict_and_agree.hltl");
    auto g = build_mpg(in.ks, in.f, in.a);
    VertexId v = g.initial();
    for (int i = 0; i < 400; ++i) {
        DirId d = testing::pick(rng, g.num_directions());
        VertexId w = g.next(v, d);
        const auto& x = g.vertex(v);
        const auto& y = g.vertex(w);
        for (std::size_t c = 0; c < x.states.size(); ++c) {
            if (c + 1 == x.turn)
                CHECK(y.states[c] == in.ks.step(x.states[c], d));
            else
                CHECK(y.states[c] == x.states[c]);
        }
        CHECK(y.turn == (x.turn % g.num_players()) + 1);
        if (x.turn != 1)
            CHECK(y.q == x.q);
        v = w;
    }
}

TEST_CASE("two-player and multiplayer constructions agree on forall-exists")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        auto ks = testing::random_ks(rng, 1 + testing::pick(rng, 4), 2, {"a"});
        HyperLtlFormula f;
        f.prefix = {{Quantifier::Forall, "p1"}, {Quantifier::Exists, "p2"}};
        f.body = testing::random_body(rng, {"a"}, {"p1", "p2"}, 3);
        auto a = ltl_to_dpa(f.body, game_alphabet(f));
        for (auto m : {Materialization::reachable, Materialization::full}) {
            auto two = build_two_player_game(ks, f, a, m);
            GameOptions opts;
            opts.materialization = m;
            auto mpg = build_mpg(ks, f, a, opts);
            REQUIRE(two.size() == mpg.size());
            std::set<VertexId> image;
            for (VertexId v = 0; v < two.size(); ++v) {
                auto w = mpg.find(two.vertex(v));
                REQUIRE(w.has_value());
                image.insert(*w);
                CHECK(two.arena().color[v] == mpg.color(*w));
                CHECK(two.arena().owner[v] == mpg.owner(*w));
                for (DirId d = 0; d < ks.num_directions(); ++d)
                    CHECK(mpg.find(two.vertex(two.arena().next(v, d))) == mpg.next(*w, d));
            }
            CHECK(image.size() == mpg.size());
            CHECK(mpg.find(two.vertex(two.arena().initial)) == mpg.initial());
        }
    }
}

TEST_CASE("dump is stable and hashed")
{
    auto in = load("three_state.ks", "predict_next.hltl");
    auto g1 = build_mpg(in.ks, in.f, in.a);
    auto g2 = build_mpg(in.ks, in.f, in.a);
    CHECK(g1.dump() == g2.dump());
    CHECK(g1.hash() == g2.hash());
    CHECK(g1.hash_hex().size() == 16);
    auto first = g1.dump().substr(0, g1.dump().find('\n'));
    CHECK(first.rfind("#0 <s_init,s_init|q" + std::to_string(in.a.initial) + "|1> color ", 0) == 0);
    CHECK(first.find(" p1 -> A:#") != std::string::npos);

    auto lookahead = load("three_state.ks", "lookahead.hltl");
    CHECK(build_mpg(lookahead.ks, lookahead.f, lookahead.a).hash() != g1.hash());
}

TEST_CASE("custom observation masks")
{
    auto in = load("three_state.ks", "predict_next.hltl");
    GameOptions opts;
    opts.observation = ObservationKind::custom;
    opts.visible = {{0, 1}, {1, 0}};
    opts.sees_q = {0, 0};
    auto g = build_mpg(in.ks, in.f, in.a, opts);
    CHECK(g.sees(1, 1));
    CHECK_FALSE(g.sees(1, 0));
    opts.visible = {{1}};
    CHECK_THROWS_AS(build_mpg(in.ks, in.f, in.a, opts), ValidationError);
}
