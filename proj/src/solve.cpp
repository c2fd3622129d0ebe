#include "hypergame/solver.hpp"

#include "hypergame/error.hpp"

namespace hypergame
{

std::string to_string(Outcome o)
{
    switch (o) {
    case Outcome::proven:
        return "proven";
    case Outcome::disproven:
        return "disproven";
    case Outcome::unknown:
        break;
    }
    return "unknown";
}

std::string to_string(Guarantee g)
{
    return g == Guarantee::semantic ? "semantic" : "game-level";
}

namespace
{

void stamp_profile_header(StrategyProfile& sp, const HyperLtlFormula& original, const ProphecyFamily& fam)
{
    sp.formula = to_string(original);
    sp.manifest.clear();
    const std::string text = render_manifest(fam);
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos)
            end = text.size();
        if (end > start)
            sp.manifest.push_back(text.substr(start, end - start));
        start = end + 1;
    }
}

} // namespace

void stamp_profile(StrategyProfile& sp, const MpgGame& g, const HyperLtlFormula& original, const ProphecyFamily& fam)
{
    sp.game_hash = g.hash_hex();
    stamp_profile_header(sp, original, fam);
}

namespace
{

bool is_forall_exists_pair(const HyperLtlFormula& f)
{
    return f.size() == 2 && f.prefix[0].quantifier == Quantifier::Forall &&
           f.prefix[1].quantifier == Quantifier::Exists;
}

Outcome flip(Outcome o)
{
    if (o == Outcome::proven)
        return Outcome::disproven;
    if (o == Outcome::disproven)
        return Outcome::proven;
    return o;
}

Verdict negation_route(const KripkeStructure& ks, const HyperLtlFormula& f)
{
    HyperLtlFormula nf = negate_hyperltl(f);
    Dpa a = ltl_to_dpa(nf.body, game_alphabet(nf));
    Verdict r = solve_exists_forall(ks, nf, a);
    Verdict v;
    v.outcome = flip(r.outcome);
    v.guarantee = Guarantee::semantic;
    v.method = "negation+exists-forall";
    if (r.profile)
        v.spoiler = std::move(r.profile);
    v.note = r.outcome == Outcome::proven ? "the negation holds: " + r.note : "the negation fails";
    return v;
}

// Two-player game and Zielonka. A won game gives a game-level proof with a
// strategy for the last player that tracks the automaton state.
std::optional<Verdict> zielonka_route(const KripkeStructure& ks, const HyperLtlFormula& f)
{
    Dpa a = ltl_to_dpa(f.body, game_alphabet(f));
    TwoPlayerGame two = build_two_player_game(ks, f, a);
    ParitySolution sol = solve_zielonka(two);
    if (sol.even_wins[two.arena().initial] == 0)
        return std::nullopt;

    MpgGame g = build_mpg(ks, f, a);
    ParitySolution lifted;
    lifted.even_wins.assign(g.size(), 0);
    lifted.strategy.assign(g.size(), 0);
    for (VertexId w = 0; w < g.size(); ++w) {
        auto t = two.find(g.vertex(w));
        if (!t)
            throw Error("internal: game vertex missing from the two-player game");
        lifted.even_wins[w] = sol.even_wins[*t];
        lifted.strategy[w] = sol.strategy[*t];
    }
    auto sp = q_tracking_profile(g, lifted);
    if (!sp)
        throw Error("internal: no automaton-tracking strategy for a won two-player game");
    stamp_profile(*sp, g, f, ProphecyFamily{});
    auto check = check_profile(g, *sp);
    if (!check.passed())
        throw Error("internal: two-player strategy fails the certificate check: " + check.diagnostic);
    Verdict v;
    v.outcome = Outcome::proven;
    v.guarantee = Guarantee::game_level;
    v.method = "zielonka";
    v.profile = std::move(sp);
    v.note = "the verifier wins the two-player game";
    return v;
}

Verdict bounded_route(const KripkeStructure& ks, const HyperLtlFormula& f, const SearchOptions& opts)
{
    Dpa a = ltl_to_dpa(f.body, game_alphabet(f));
    MpgGame g = build_mpg(ks, f, a);
    return solve_bounded_coalition(g, opts);
}

} // namespace

Verdict solve(const KripkeStructure& ks, const HyperLtlFormula& f, const SolveOptions& opts)
{
    switch (opts.mode) {
    case Mode::zielonka: {
        if (!is_forall_exists_pair(f))
            throw ValidationError("zielonka mode needs a prefix 'forall p1. exists p2.'; got '" + to_string(f) + "'");
        if (auto v = zielonka_route(ks, f))
            return *v;
        Verdict v;
        v.method = "zielonka";
        v.game_lost = true;
        v.note = "the verifier loses the two-player game";
        return v;
    }
    case Mode::exists_forall:
        return solve_exists_forall(ks, f, ltl_to_dpa(f.body, game_alphabet(f)));
    case Mode::bounded:
        return bounded_route(ks, f, opts.search);
    case Mode::automatic:
        break;
    }

    if (is_forall_exists_pair(f)) {
        if (auto v = zielonka_route(ks, f))
            return *v;
        Verdict v = negation_route(ks, f);
        v.game_lost = true;
        v.method = "zielonka+" + v.method;
        return v;
    }
    if (f.is_exists_forall())
        return solve_exists_forall(ks, f, ltl_to_dpa(f.body, game_alphabet(f)));
    if (f.is_forall_exists())
        return negation_route(ks, f);
    return bounded_route(ks, f, opts.search);
}

Verdict solve_with_prophecies(const KripkeStructure& ks,
                              const HyperLtlFormula& f,
                              const ProphecyFamily& fam,
                              const SolveOptions& opts)
{
    if (fam.empty())
        return solve(ks, f, opts);
    KripkeStructure kp = extend_ks(ks, fam);
    HyperLtlFormula fp = rewrite_formula(f, fam);
    Verdict v = solve(kp, fp, opts);
    // the game hash is already that of the extended game
    auto restamp = [&](StrategyProfile& sp, const HyperLtlFormula& original) {
        const std::string hash = sp.game_hash;
        stamp_profile_header(sp, original, fam);
        sp.game_hash = hash;
    };
    if (v.profile)
        restamp(*v.profile, f);
    if (v.spoiler)
        restamp(*v.spoiler, negate_hyperltl(f));
    return v;
}

} // namespace hypergame
