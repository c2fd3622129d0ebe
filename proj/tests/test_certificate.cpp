#include "hypergame/certificate.hpp"
#include "hypergame/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace hypergame;

namespace
{

const std::string fixtures = HG_FIXTURES;

struct Instance
{
    KripkeStructure ks;
    HyperLtlFormula f;
    MpgGame g;
};

Instance make(const std::string& formula)
{
    auto ks = load_ks(fixtures + "/three_state.ks");
    auto f = parse_hyperltl(formula);
    auto g = build_game(ks, f, {});
    return {std::move(ks), std::move(f), std::move(g)};
}

// Player 2 moves its copy onto the state player 1 just moved to.
StrategyProfile copy_profile(const MpgGame& g, std::uint32_t memory = 1)
{
    StrategyProfile sp;
    sp.game_hash = g.hash_hex();
    sp.formula = to_string(g.formula());
    PlayerStrategy ps;
    ps.player = 2;
    ps.memory_size = memory;
    for (std::uint32_t m = 0; m < memory; ++m)
        for (std::uint32_t o = 0; o < g.num_obs(2); ++o) {
            const auto& c = g.obs_class(2, o);
            if (c.turn != 2)
                continue;
            StrategyEntry e;
            e.memory = m;
            for (auto s : c.states)
                e.obs.push_back(g.ks().state_names()[s]);
            e.direction = e.obs[0] == "s_B" ? "B" : "A";
            e.next = (m + 1) % memory;
            ps.entries.push_back(e);
        }
    sp.players.push_back(ps);
    canonicalize(sp);
    return sp;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("export and parse round trip")
{
    StrategyProfile sp;
    sp.game_hash = "00ff00ff00ff00ff";
    sp.formula = "forall p1. exists p2. G (a[p1] <-> a[p2])";
    sp.manifest = {"prophecy __p0 at 1: X a[p1]"};
    PlayerStrategy p4{4, 2, {}};
    p4.entries.push_back({1, {"s_A", "s_B", "s_A", "s_init"}, std::nullopt, "B", 0});
    p4.entries.push_back({0, {"s_A", "s_B", "s_A", "s_init"}, 3u, "A", 1});
    PlayerStrategy p2{2, 1, {}};
    p2.entries.push_back({0, {"s_A", "s_B"}, std::nullopt, "A", 0});
    sp.players = {p4, p2};
    canonicalize(sp);
    CHECK(sp.players[0].player == 2);
    CHECK(sp.players[1].entries[0].memory == 0);

    const std::string text = export_profile(sp);
    CHECK(text.rfind("hypergame-certificate 1\n", 0) == 0);
    CHECK(text.find("m 0 obs ( s_A s_B s_A s_init q:3 ) -> A 1") != std::string::npos);
    auto back = parse_profile(text);
    CHECK(back == sp);
    CHECK(export_profile(back) == text);
}

TEST_CASE("malformed certificates")
{
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    const std::string good = export_profile(copy_profile(in.g));
    CHECK_NOTHROW(parse_profile(good));

    auto replace = [&](const std::string& from, const std::string& to) {
        std::string t = good;
        auto at = t.find(from);
        REQUIRE(at != std::string::npos);
        return t.replace(at, from.size(), to);
    };
    CHECK_THROWS_AS(parse_profile(""), ParseError);
    CHECK_THROWS_AS(parse_profile("hello\n"), ParseError);
    CHECK_THROWS_AS(parse_profile(replace("certificate 1", "certificate 2")), ParseError);
    CHECK_THROWS_AS(parse_profile(replace("game ", "gam ")), ParseError);
    CHECK_THROWS_AS(parse_profile(replace("memory 1", "memory 0")), ParseError);
    CHECK_THROWS_AS(parse_profile(replace("-> A", "=> A")), ParseError);
    CHECK_THROWS_AS(parse_profile(replace("obs (", "obs ")), ParseError);
    CHECK_THROWS_AS(parse_profile(replace(" ) ->", " ->")), ParseError);
    CHECK_THROWS_AS(parse_profile(replace("end\n", "")), ParseError);
    CHECK_THROWS_AS(parse_profile(good + "player 2 memory 1\n"), ParseError);
}

TEST_CASE("validation against the game")
{
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    auto sp = copy_profile(in.g);
    CHECK_NOTHROW(validate_profile(sp, in.g));
    CHECK(import_profile(export_profile(sp), in.g) == sp);

    auto bad = sp;
    bad.game_hash = "0123456789abcdef";
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].player = 1;
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players.clear();
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].entries[0].obs[0] = "s_C";
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].entries[0].obs = {"s_init", "s_init"}; // never seen on player 2's turn
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].entries[0].direction = "C";
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].entries[0].next = 1;
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].entries.push_back(bad.players[0].entries[0]);
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);

    bad = sp;
    bad.players[0].entries[0].obs_q = 0;
    CHECK_THROWS_AS(validate_profile(bad, in.g), ValidationError);
}

TEST_CASE("copy strategy wins the synchronisation game")
{
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    auto r = check_profile(in.g, copy_profile(in.g));
    CHECK(r.passed());
    CHECK(r.diagnostic.empty());

    // the same strategy spread over two memory states
    auto two = copy_profile(in.g, 2);
    CHECK(two.players[0].entries.size() == 2 * copy_profile(in.g).players[0].entries.size());
    CHECK(check_profile(in.g, two).passed());
}

TEST_CASE("a wrong row gives a losing lasso")
{
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    auto sp = copy_profile(in.g);
    for (auto& e : sp.players[0].entries)
        if (e.obs == std::vector<std::string>{"s_B", "s_A"})
            e.direction = "A";
    auto r = check_profile(in.g, sp);
    REQUIRE(r.status == CheckResult::Status::losing_cycle);
    CHECK_FALSE(r.diagnostic.empty());
    REQUIRE_FALSE(r.stem.empty());
    REQUIRE_FALSE(r.cycle.empty());
    CHECK(r.stem.front() == in.g.initial());
    // the lasso follows game edges and closes
    auto step_ok = [&](VertexId a, VertexId b) {
        for (DirId d = 0; d < in.g.num_directions(); ++d)
            if (in.g.next(a, d) == b)
                return true;
        return false;
    };
    for (std::size_t i = 0; i + 1 < r.stem.size(); ++i)
        CHECK(step_ok(r.stem[i], r.stem[i + 1]));
    CHECK(step_ok(r.stem.back(), r.cycle.front()));
    for (std::size_t i = 0; i + 1 < r.cycle.size(); ++i)
        CHECK(step_ok(r.cycle[i], r.cycle[i + 1]));
    CHECK(step_ok(r.cycle.back(), r.cycle.front()));
    unsigned low = ~0u;
    for (auto v : r.cycle)
        low = std::min(low, in.g.color(v));
    CHECK(low % 2 == 1);
}

TEST_CASE("a missing row gives a coverage gap")
{
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    auto sp = copy_profile(in.g);
    auto& rows = sp.players[0].entries;
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const StrategyEntry& e) { return e.obs == std::vector<std::string>{"s_B", "s_B"}; }),
               rows.end());
    auto r = check_profile(in.g, sp);
    REQUIRE(r.status == CheckResult::Status::coverage_gap);
    REQUIRE_FALSE(r.stem.empty());
    const auto& last = in.g.vertex(r.stem.back());
    CHECK(last.turn == 2);
    CHECK(in.g.ks().state_names()[last.states[0]] == "s_B");
    CHECK(in.g.ks().state_names()[last.states[1]] == "s_B");
    CHECK(r.diagnostic.find("(s_B,s_B)") != std::string::npos);
}

TEST_CASE("single-row mutations of the copy strategy")
{
    // A mutation loses exactly when it sends copy 2 somewhere else than
    // copy 1 on a reachable row.
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    const auto base = copy_profile(in.g);
    const auto& ks = in.g.ks();
    for (std::size_t i = 0; i < base.players[0].entries.size(); ++i)
        for (const std::string dir : {"A", "B"}) {
            auto sp = base;
            auto& e = sp.players[0].entries[i];
            if (e.direction == dir)
                continue;
            e.direction = dir;
            const StateId from = *ks.find_state(e.obs[1]);
            const bool diverges = ks.state_names()[ks.step(from, *ks.find_direction(dir))] != e.obs[0];
            CAPTURE(export_profile(sp));
            CHECK(check_profile(in.g, sp).passed() == !diverges);
        }
}

TEST_CASE("every profile wins when the body is valid")
{
    auto in = make("forall p1. exists p2. G (a[p2] || !a[p2])");
    auto sp = copy_profile(in.g);
    for (auto& e : sp.players[0].entries)
        e.direction = "B";
    CHECK(check_profile(in.g, sp).passed());
}

TEST_CASE("check_profile rejects profiles for other games")
{
    auto in = make("forall p1. exists p2. G (a[p1] <-> a[p2])");
    auto other = make("forall p1. exists p2. F (a[p1] <-> a[p2])");
    CHECK_THROWS_AS(check_profile(other.g, copy_profile(in.g)), ValidationError);
}

TEST_CASE("the checker does not depend on the solvers")
{
    const std::string src = slurp(std::string(HG_SOURCE_DIR) + "/src/certificate.cpp");
    REQUIRE_FALSE(src.empty());
    CHECK(src.find("solver.hpp") == std::string::npos);
    CHECK(src.find("solve_") == std::string::npos);
    const std::string hdr = slurp(std::string(HG_SOURCE_DIR) + "/include/hypergame/certificate.hpp");
    CHECK(hdr.find("solver.hpp") == std::string::npos);
}
