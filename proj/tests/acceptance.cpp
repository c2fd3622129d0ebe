// One line per acceptance criterion: PASS/FAIL, name, measured values and
// the limits they are held to. Exit status 1 if any criterion fails.

#include "hypergame/prophecy.hpp"
#include "suites.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace hypergame;

namespace
{

const std::string fixtures = HG_FIXTURES;

KripkeStructure three_state() { return load_ks(fixtures + "/three_state.ks"); }
HyperLtlFormula fixture(const std::string& name) { return load_hyperltl(fixtures + "/" + name + ".hltl"); }

struct Outcome_
{
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what)
    {
        detail << (detail.tellp() > 0 ? "; " : "") << what << (cond ? "" : " [FAILED]");
        ok = ok && cond;
    }
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<void(Outcome_&)>& body)
{
    Outcome_ o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.expect(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream time;
    time.precision(2);
    time << std::fixed << s << " s";
    if (limit_s > 0) {
        time << " (limit " << limit_s << " s)";
        o.expect(s < limit_s, "time " + time.str());
    } else {
        o.detail << "; time " << time.str();
    }
    failures += !o.ok;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
}

int run_certify(const std::string& cert_text, const std::string& formula)
{
    const auto path = std::filesystem::temp_directory_path() / ("hypergame_accept_" + std::to_string(getpid()) + ".cert");
    std::ofstream(path) << cert_text;
    const std::string cmd = std::string(HG_CLI) + " certify " + fixtures + "/three_state.ks " + fixtures + "/" +
                            formula + ".hltl " + path.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    std::filesystem::remove(path);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<MpgGame> suite_games;

} // namespace

int main()
{
    criterion("unsoundness regression (lookahead)", 5.0, [](Outcome_& o) {
        auto ks = three_state();
        auto f = fixture("lookahead");
        auto dpa = ltl_to_dpa(f.body, game_alphabet(f));
        auto full = build_full_info_game(ks, f, dpa);
        o.expect(solve_zielonka(full).even_wins[full.initial()] == 1, "full-information game won by the existential side");
        o.expect(!oracle_check(ks, f, {4, 4}), "oracle 4/4 false");
        o.expect(!oracle_check(ks, f, {5, 5}), "oracle 5/5 false");
        auto v = solve(ks, f);
        o.expect(v.outcome == Outcome::disproven, "solve auto " + to_string(v.outcome));
    });

    criterion("incompleteness via negation (predict-next)", 10.0, [](Outcome_& o) {
        auto ks = three_state();
        auto f = fixture("predict_next");
        o.expect(oracle_check(ks, f, {4, 4}), "oracle 4/4 true");
        o.expect(oracle_check(ks, f, {5, 5}), "oracle 5/5 true");
        auto dpa = ltl_to_dpa(f.body, game_alphabet(f));
        auto two = build_two_player_game(ks, f, dpa);
        o.expect(solve_zielonka(two).even_wins[two.arena().initial] == 0, "verifier loses the two-player game");
        auto v = solve(ks, f);
        o.expect(v.outcome == Outcome::proven && v.guarantee == Guarantee::semantic,
                 "solve auto " + to_string(v.outcome) + " " + to_string(v.guarantee) + " via " + v.method);
    });

    criterion("prophecy certificate (predict-next, X a[p1])", 5.0, [](Outcome_& o) {
        auto ks = three_state();
        auto f = fixture("predict_next");
        auto fam = load_prophecy_family(fixtures + "/predict_next.proph", f);
        SolveOptions z;
        z.mode = Mode::zielonka;
        auto v = solve_with_prophecies(ks, f, fam, z);
        o.expect(v.outcome == Outcome::proven && v.method == "zielonka", "coalition {2} wins by Zielonka");
        o.expect(v.profile.has_value(), "certificate emitted");
        if (v.profile)
            o.expect(run_certify(export_profile(*v.profile), "predict_next") == 0, "certify exit 0");
    });

    criterion("four-player end to end (predict-and-agree)", 60.0, [](Outcome_& o) {
        auto ks = three_state();
        auto f = fixture("predict_and_agree");
        auto bare = solve_bounded_coalition(build_game(ks, f, {}), {});
        o.expect(bare.outcome != Outcome::proven, "bare game, memory <= 3: " + to_string(bare.outcome) +
                                                      (bare.game_lost ? " (coalition loses)" : ""));
        auto fam = load_prophecy_family(fixtures + "/predict_and_agree.proph", f);
        auto g = build_game(ks, f, fam);
        SearchOptions opts;
        opts.memory_bound = 2;
        auto v = solve_bounded_coalition(g, opts);
        o.expect(v.outcome == Outcome::proven, "with prophecies, memory <= 2: " + to_string(v.outcome) + " after " +
                                                   std::to_string(v.work) + " options");
        if (v.profile) {
            stamp_profile(*v.profile, g, f, fam);
            const auto text = export_profile(*v.profile);
            auto back = import_profile(text, g);
            o.expect(back == *v.profile && export_profile(back) == text, "certificate round trip");
            o.expect(check_profile(g, back).passed(), "re-imported certificate passes");
        }
        suite_games.push_back(std::move(g));
    });

    criterion("two-player vs multiplayer verdicts, 50 random forall-exists instances", 0, [](Outcome_& o) {
        auto r = testing::two_player_vs_multiplayer(3, 50);
        o.expect(r.ok(), std::to_string(r.mismatches) + " mismatches of " + std::to_string(r.instances) + " (" +
                             std::to_string(r.positive) + " won), tolerance 0");
        if (!r.first_failure.empty())
            o.detail << "; first: " << r.first_failure;
    });

    criterion("exists-forall solver vs oracle, 50 random instances", 0, [](Outcome_& o) {
        auto r = testing::exists_forall_vs_oracle(5, 50);
        o.expect(r.ok(), std::to_string(r.mismatches) + " mismatches of " + std::to_string(r.instances) + " (" +
                             std::to_string(r.positive) + " true), budgets |S|*|Q| capped at 6, tolerance 0");
        if (!r.first_failure.empty())
            o.detail << "; first: " << r.first_failure;
    });

    criterion("soundness sweep", 0, [](Outcome_& o) {
        std::size_t proven = 0, violations = 0;
        auto sweep = [&](const std::string& ks_name, const std::string& f_name, const std::string& proph, std::size_t b) {
            auto ks = load_ks(fixtures + "/" + ks_name);
            auto f = fixture(f_name);
            ProphecyFamily fam;
            if (!proph.empty())
                fam = load_prophecy_family(fixtures + "/" + proph, f);
            SolveOptions opts;
            opts.search.memory_bound = 2;
            auto v = solve_with_prophecies(ks, f, fam, opts);
            if (v.outcome != Outcome::proven || !v.profile)
                return;
            ++proven;
            violations += !oracle_check(ks, f, {b, b});
        };
        sweep("three_state.ks", "predict_next", "predict_next.proph", 5);
        sweep("three_state.ks", "predict_and_agree", "predict_and_agree.proph", 4);
        sweep("three_state.ks", "follow_unless", "", 4);
        sweep("agents.ks", "knows_goal", "", 5);
        sweep("agents.ks", "knows_other_unsure", "", 4);
        auto r = testing::soundness_sweep(7, 90);
        std::ostringstream methods;
        for (const auto& [m, c] : r.by_method)
            methods << " " << m << "=" << c;
        o.expect(violations == 0 && r.ok(), std::to_string(violations + r.mismatches) + " violations among " +
                                                std::to_string(proven) + " fixture and " + std::to_string(r.instances) +
                                                " random proofs (" + methods.str().substr(1) + "), tolerance 0");
        o.expect(proven == 5, "all five fixtures proven");
    });

    criterion("automata pipeline, 200 bodies x 20 lassos", 120.0, [](Outcome_& o) {
        auto r = testing::automata_vs_evaluator(13, 200, 20);
        o.expect(r.ok(), std::to_string(r.mismatches) + " mismatches (acceptance, complement duality, involution), tolerance 0");
    });

    criterion("hierarchy invariant", 0, [](Outcome_& o) {
        auto ks = three_state();
        for (const auto& name : {"lookahead", "predict_next", "predict_and_agree", "follow_unless"})
            suite_games.push_back(build_game(ks, fixture(name), {}));
        auto pn = fixture("predict_next");
        suite_games.push_back(build_game(ks, pn, load_prophecy_family(fixtures + "/predict_next.proph", pn)));
        auto agents = load_ks(fixtures + "/agents.ks");
        suite_games.push_back(build_game(agents, fixture("knows_other_unsure"), {}));
        std::mt19937_64 rng(17);
        for (int i = 0; i < 20; ++i) {
            const auto aps = testing::random_aps(rng);
            auto rks = testing::random_ks(rng, 1 + testing::pick(rng, 3), 2, aps);
            std::vector<Quantifier> prefix;
            for (std::size_t k = 0, n = 2 + testing::pick(rng, 3); k < n; ++k)
                prefix.push_back(testing::pick(rng, 2) == 0 ? Quantifier::Forall : Quantifier::Exists);
            suite_games.push_back(build_game(rks, testing::random_formula(rng, aps, prefix, 2), {}));
        }
        std::size_t bad_order = 0, bad_nesting = 0;
        for (const auto& g : suite_games) {
            bad_order += !testing::hierarchy_in_order(g);
            bad_nesting += !testing::projections_nest(g, rng, 1000);
        }
        o.expect(bad_order == 0, std::to_string(suite_games.size()) + " games, " + std::to_string(bad_order) +
                                     " not ordered 1 < ... < n");
        o.expect(bad_nesting == 0, std::to_string(bad_nesting) + " failing the nesting check on 1000 vertex pairs");
    });

    return failures == 0 ? 0 : 1;
}
