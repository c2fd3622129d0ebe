#pragma once

#include "hypergame/arena.hpp"
#include "hypergame/certificate.hpp"
#include "hypergame/prophecy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hypergame
{

// Winning regions of a perfect-information parity game (minimum colour seen
// infinitely often decides; even is good for the even player).
struct ParitySolution
{
    std::vector<char> even_wins;
    // direction for the owner of v when v lies in the owner's winning region
    std::vector<DirId> strategy;
};

ParitySolution solve_zielonka(const Arena& arena, const std::vector<char>& even_owned);

// Verifier (player 2) is the even player.
ParitySolution solve_zielonka(const TwoPlayerGame& g);
// The coalition plays as one even player with full information.
ParitySolution solve_zielonka(const MpgGame& g);

enum class Outcome
{
    proven,
    disproven,
    unknown
};

enum class Guarantee
{
    semantic,  // exact decision of K |= f
    game_level // a winning coalition strategy; implies K |= f
};

struct Verdict
{
    Outcome outcome = Outcome::unknown;
    Guarantee guarantee = Guarantee::game_level;
    std::string method;
    // the coalition provably loses the game (its perfect-information
    // relaxation is lost); says nothing about K |= f
    bool game_lost = false;
    std::size_t memory_bound = 0; // bounded search only
    std::uint64_t budget = 0;
    std::uint64_t work = 0; // table entries tried by the bounded search
    bool budget_exhausted = false;
    std::optional<StrategyProfile> profile; // coalition witness
    // winning strategy of the negated formula's coalition, i.e. of the
    // universal players of the original one
    std::optional<StrategyProfile> spoiler;
    std::string note;
};

std::string to_string(Outcome o);
std::string to_string(Guarantee g);

// Exact decision for prefixes exists^k forall^m. Proven verdicts carry the
// witness paths as an observation-independent profile on build_mpg(ks, f, a).
Verdict solve_exists_forall(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a);

struct SearchOptions
{
    std::size_t memory_bound = 3;
    std::uint64_t budget = 10'000'000;
    // prune with the perfect-information relaxation of the game
    bool relaxation_pruning = true;
    // when the coalition is only the last player, first try the strategy that
    // tracks the automaton state in memory
    bool seeded = true;
};

// Backtracking search over finite-memory, observation-based coalition
// strategies with at most memory_bound memory states per player. Proven or
// Unknown, never Disproven.
Verdict solve_bounded_coalition(const MpgGame& g, const SearchOptions& opts = {});

// When the coalition is the last player alone and wins the perfect-information
// game sol, a profile whose memory is the automaton state. nullopt otherwise.
std::optional<StrategyProfile> q_tracking_profile(const MpgGame& g, const ParitySolution& sol);

enum class Mode
{
    automatic,
    zielonka,
    exists_forall,
    bounded
};

struct SolveOptions
{
    Mode mode = Mode::automatic;
    SearchOptions search;
};

// Routes by prefix shape:
//   forall p1. exists p2.  two-player game and Zielonka; when the verifier
//                          loses, the negation is decided exactly
//   exists* forall*        solve_exists_forall
//   forall* exists*        negation, then solve_exists_forall
//   anything else          build_mpg and solve_bounded_coalition
Verdict solve(const KripkeStructure& ks, const HyperLtlFormula& f, const SolveOptions& opts = {});

// solve on the prophecy extension (extend_ks, rewrite_formula). Witnesses
// carry the original formula and the prophecy manifest.
Verdict solve_with_prophecies(const KripkeStructure& ks,
                              const HyperLtlFormula& f,
                              const ProphecyFamily& fam,
                              const SolveOptions& opts = {});

// Fills the provenance header of a profile for g.
void stamp_profile(StrategyProfile& sp, const MpgGame& g, const HyperLtlFormula& original, const ProphecyFamily& fam);

} // namespace hypergame
