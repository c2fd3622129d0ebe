#pragma once

#include "hypergame/arena.hpp"
#include "hypergame/prophecy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypergame
{

inline constexpr int certificate_format_version = 1;

// One row of a finite-memory strategy: in memory state `memory`, seeing
// `obs` on its own turn, the player moves along `direction` and continues in
// memory state `next`. Observations and directions are named so that a
// profile stays meaningful apart from the game it was computed on.
struct StrategyEntry
{
    std::uint32_t memory = 0;
    std::vector<std::string> obs;   // visible state names in copy order
    std::optional<AutState> obs_q;  // only when the player observes q
    std::string direction;
    std::uint32_t next = 0;

    friend bool operator==(const StrategyEntry&, const StrategyEntry&) = default;
};

// Memory states are 0..memory_size-1 and start in 0.
struct PlayerStrategy
{
    PlayerId player = 0;
    std::uint32_t memory_size = 1;
    std::vector<StrategyEntry> entries; // sorted by (memory, obs, obs_q)

    friend bool operator==(const PlayerStrategy&, const PlayerStrategy&) = default;
};

struct StrategyProfile
{
    std::string game_hash; // MpgGame::hash_hex of the game the profile is for
    std::string formula;   // the formula as given, before prophecy rewriting
    std::vector<std::string> manifest; // render_manifest lines
    std::vector<PlayerStrategy> players; // ascending player numbers

    friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

// Sorts entries and players into canonical order.
void canonicalize(StrategyProfile& sp);

std::string export_profile(const StrategyProfile& sp);
// Syntax only; throws ParseError.
StrategyProfile parse_profile(std::string_view text);
// parse_profile plus validation against g: hash, coalition, observations,
// directions, memory bounds. Throws ValidationError.
StrategyProfile import_profile(std::string_view text, const MpgGame& g);
void validate_profile(const StrategyProfile& sp, const MpgGame& g);

struct CheckResult
{
    enum class Status
    {
        pass,
        losing_cycle, // a reachable cycle of the product has odd minimum colour
        coverage_gap  // a reachable (memory, observation) pair has no row
    };
    Status status = Status::pass;
    std::string diagnostic;
    // game vertices of the offending lasso: stem from the initial vertex, then
    // the cycle; for coverage_gap the path to the uncovered vertex
    std::vector<VertexId> stem;
    std::vector<VertexId> cycle;

    [[nodiscard]] bool passed() const { return status == Status::pass; }
};

// Builds the product of g with the coalition memories, coalition moves fixed
// by the tables and every other move left open, and looks for a reachable
// cycle whose minimum colour is odd.
CheckResult check_profile(const MpgGame& g, const StrategyProfile& sp);

// The game a profile for (ks, f, fam) refers to: build_mpg on the prophecy
// extension with the automaton of the rewritten body. An empty family leaves
// ks and f as they are. f must be strictly alternating when fam is not empty.
MpgGame build_game(const KripkeStructure& ks, const HyperLtlFormula& f, const ProphecyFamily& fam);

} // namespace hypergame
