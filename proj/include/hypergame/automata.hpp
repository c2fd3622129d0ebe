#pragma once

#include "hypergame/logic.hpp"
#include "hypergame/word.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypergame
{

using AutState = std::uint32_t;

// Constructions abort with ResourceError beyond this many states.
inline constexpr std::size_t automaton_state_cap = 200000;

// Letters of an automaton alphabet are the integers [0, letters). When the
// alphabet comes from propositions, letters == 2^|aps| and bit i of a letter
// means aps[i] holds.
struct Nba
{
    std::vector<IndexedAp> aps;
    std::uint32_t letters = 1;
    std::vector<AutState> initial;
    // trans[s][letter] lists successors, sorted and unique
    std::vector<std::vector<std::vector<AutState>>> trans;
    std::vector<char> accepting;

    [[nodiscard]] std::size_t size() const { return trans.size(); }
    AutState add_state(bool accepting);
};

struct Dpa
{
    std::vector<IndexedAp> aps;
    std::uint32_t letters = 1;
    AutState initial = 0;
    std::vector<std::vector<AutState>> delta; // [state][letter]
    std::vector<unsigned> color;
    unsigned max_color = 0;

    [[nodiscard]] std::size_t size() const { return delta.size(); }
    [[nodiscard]] AutState step(AutState q, std::uint64_t letter) const;
};

// Büchi automaton for body over the letters 2^alphabet via a tableau on the
// negation normal form. indexed_aps(body) must be a subset of alphabet.
Nba ltl_to_nba(const FormulaPtr& body, const std::vector<IndexedAp>& alphabet);

// Safra-tree determinization in the compact form of Piterman, with colours
// compressed and the result minimized.
Dpa determinize_nba_to_dpa(const Nba& n);

Dpa ltl_to_dpa(const FormulaPtr& body, const std::vector<IndexedAp>& alphabet);

bool nba_lasso_accepts(const Nba& n, const UpWord& word);
bool dpa_lasso_accepts(const Dpa& a, const UpWord& word);
Dpa complement_dpa(const Dpa& a);

// Keeps reachable states, renumbers colours to the fewest needed and merges
// equivalent states. The language is unchanged.
Dpa simplify_dpa(const Dpa& a);

// Reachable state with a cycle whose minimum colour is even, as a lasso of
// letters; nullopt if the language is empty.
std::optional<UpWord> dpa_accepted_word(const Dpa& a);

// Subset of the HOA format: state-based parity min even acceptance,
// deterministic and complete, explicit labels.
std::string export_hoa(const Dpa& a);
Dpa import_hoa(std::string_view text);

} // namespace hypergame
