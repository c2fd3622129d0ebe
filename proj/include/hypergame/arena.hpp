#pragma once

#include "hypergame/automata.hpp"
#include "hypergame/logic.hpp"
#include "hypergame/model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hypergame
{

using VertexId = std::uint32_t;
using PlayerId = unsigned; // players are numbered from 1

// Turn-based game graph with total successor function. Owners are player
// numbers; two-player games use 1 for the refuter and 2 for the verifier.
struct Arena
{
    std::uint32_t directions = 0;
    VertexId initial = 0;
    std::vector<VertexId> succ; // succ[v * directions + d]
    std::vector<unsigned> color;
    std::vector<PlayerId> owner;

    [[nodiscard]] std::size_t size() const { return color.size(); }
    [[nodiscard]] VertexId next(VertexId v, DirId d) const { return succ[std::size_t{v} * directions + d]; }
};

struct GameVertex
{
    std::vector<StateId> states; // one per trace variable
    AutState q = 0;
    PlayerId turn = 1;

    friend auto operator<=>(const GameVertex&, const GameVertex&) = default;
};

enum class Materialization
{
    reachable, // vertices reachable from the initial vertex, breadth-first order
    full       // every tuple of the vertex set, mixed-radix order
};

enum class ObservationKind
{
    hierarchical, // player p sees copies 1..p
    full,         // every player sees everything, q included
    custom        // masks given in GameOptions
};

struct GameOptions
{
    Materialization materialization = Materialization::reachable;
    ObservationKind observation = ObservationKind::hierarchical;
    // custom only: visible[p-1][i] says whether player p sees copy i+1
    std::vector<std::vector<char>> visible;
    std::vector<char> sees_q;
};

struct ObsClass
{
    PlayerId turn = 1;
    std::vector<StateId> states; // visible copies in order
    std::optional<AutState> q;

    friend auto operator<=>(const ObsClass&, const ObsClass&) = default;
};

class TwoPlayerGame
{
public:
    static constexpr PlayerId refuter = 1;
    static constexpr PlayerId verifier = 2;

    TwoPlayerGame(Arena arena, std::vector<GameVertex> vertices);

    [[nodiscard]] const Arena& arena() const { return arena_; }
    [[nodiscard]] const GameVertex& vertex(VertexId v) const { return vertices_[v]; }
    [[nodiscard]] std::size_t size() const { return vertices_.size(); }
    [[nodiscard]] std::optional<VertexId> find(const GameVertex& v) const;

private:
    Arena arena_;
    std::vector<GameVertex> vertices_;
    std::vector<std::pair<std::uint64_t, VertexId>> lookup_; // (hash, id), sorted
};

class MpgGame
{
public:
    struct Parts
    {
        std::shared_ptr<const KripkeStructure> ks;
        std::shared_ptr<const HyperLtlFormula> formula;
        std::shared_ptr<const Dpa> dpa;
        Arena arena;
        std::vector<GameVertex> vertices;
        std::vector<std::vector<char>> visible;
        std::vector<char> sees_q;
    };

    explicit MpgGame(Parts parts);

    [[nodiscard]] std::size_t num_players() const { return visible_.size(); }
    [[nodiscard]] std::size_t size() const { return vertices_.size(); }
    [[nodiscard]] std::size_t num_directions() const { return arena_.directions; }
    [[nodiscard]] VertexId initial() const { return arena_.initial; }
    [[nodiscard]] const Arena& arena() const { return arena_; }
    [[nodiscard]] const GameVertex& vertex(VertexId v) const { return vertices_[v]; }
    [[nodiscard]] VertexId next(VertexId v, DirId d) const { return arena_.next(v, d); }
    [[nodiscard]] unsigned color(VertexId v) const { return arena_.color[v]; }
    [[nodiscard]] PlayerId owner(VertexId v) const { return arena_.owner[v]; }
    [[nodiscard]] std::optional<VertexId> find(const GameVertex& v) const;

    [[nodiscard]] const KripkeStructure& ks() const { return *ks_; }
    [[nodiscard]] const HyperLtlFormula& formula() const { return *formula_; }
    [[nodiscard]] const Dpa& dpa() const { return *dpa_; }

    // Players of existentially quantified copies, ascending.
    [[nodiscard]] const std::vector<PlayerId>& coalition() const { return coalition_; }
    [[nodiscard]] bool in_coalition(PlayerId p) const;

    [[nodiscard]] bool sees(PlayerId p, std::size_t copy) const { return visible_[p - 1][copy] != 0; }
    [[nodiscard]] bool sees_q(PlayerId p) const { return sees_q_[p - 1] != 0; }
    [[nodiscard]] ObsClass observation_class(VertexId v, PlayerId p) const;
    // Dense id of observation_class(v, p) among all classes of player p.
    [[nodiscard]] std::uint32_t obs_id(VertexId v, PlayerId p) const { return obs_[p - 1][v]; }
    [[nodiscard]] std::size_t num_obs(PlayerId p) const { return obs_classes_[p - 1].size(); }
    [[nodiscard]] const ObsClass& obs_class(PlayerId p, std::uint32_t id) const { return obs_classes_[p - 1][id]; }
    [[nodiscard]] std::optional<std::uint32_t> find_obs(PlayerId p, const ObsClass& c) const;

    // One line per vertex in id order:
    //   #id <state,...|q|turn> color c pN -> dir:#target ...
    [[nodiscard]] std::string dump() const;
    // FNV-1a digest of dump().
    [[nodiscard]] std::uint64_t hash() const { return hash_; }
    [[nodiscard]] std::string hash_hex() const;

    // The joint letter read by the automaton from the copies' labels.
    [[nodiscard]] Letter letter(const std::vector<StateId>& states) const;

private:
    std::shared_ptr<const KripkeStructure> ks_;
    std::shared_ptr<const HyperLtlFormula> formula_;
    std::shared_ptr<const Dpa> dpa_;
    Arena arena_;
    std::vector<GameVertex> vertices_;
    std::vector<std::vector<char>> visible_;
    std::vector<char> sees_q_;
    std::vector<PlayerId> coalition_;
    std::vector<std::vector<std::uint32_t>> obs_;
    std::vector<std::vector<ObsClass>> obs_classes_;
    std::vector<std::pair<std::size_t, std::size_t>> letter_sources_; // (copy, ap index)
    std::vector<std::pair<std::uint64_t, VertexId>> lookup_;         // (hash, id), sorted
    std::uint64_t hash_ = 0;
};

// Two-player game for `forall p1. exists p2. body`.
TwoPlayerGame build_two_player_game(const KripkeStructure& ks,
                                    const HyperLtlFormula& f,
                                    const Dpa& a,
                                    Materialization m = Materialization::reachable);

MpgGame build_mpg(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a, const GameOptions& opts = {});
MpgGame build_full_info_game(const KripkeStructure& ks,
                             const HyperLtlFormula& f,
                             const Dpa& a,
                             Materialization m = Materialization::reachable);

// Alphabet of indexed propositions a game for f reads: indexed_aps(f.body).
std::vector<IndexedAp> game_alphabet(const HyperLtlFormula& f);

// Observation partition of every player: obs[p-1][v] is a class id.
struct Observations
{
    std::size_t vertices = 0;
    std::vector<std::vector<std::uint32_t>> obs;
};

Observations observations_of(const MpgGame& g);

struct HierarchyWitness
{
    PlayerId p = 0, p2 = 0;
    // u ~p v but not u ~p2 v; x ~p2 y but not x ~p y
    VertexId u = 0, v = 0, x = 0, y = 0;
};

struct HierarchyResult
{
    // least informed first: for i < j, ~order[j] is contained in ~order[i]
    std::vector<PlayerId> order;
    std::optional<HierarchyWitness> witness;

    [[nodiscard]] bool hierarchical() const { return !witness.has_value(); }
};

// true iff u ~p v implies u ~p2 v for all vertices
bool refines(const Observations& o, PlayerId p, PlayerId p2);
HierarchyResult is_hierarchical(const Observations& o);
HierarchyResult is_hierarchical(const MpgGame& g);

std::string to_string(const GameVertex& v, const KripkeStructure& ks);
std::string to_string(const ObsClass& c, const KripkeStructure& ks);

} // namespace hypergame
