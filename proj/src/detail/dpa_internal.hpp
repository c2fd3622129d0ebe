#pragma once

#include "hypergame/automata.hpp"

namespace hypergame::detail
{

// Deterministic parity automaton with colours on transitions.
struct EdgeDpa
{
    std::uint32_t letters = 1;
    AutState initial = 0;
    std::vector<std::vector<AutState>> delta;
    std::vector<std::vector<unsigned>> color;
};

EdgeDpa determinize_edges(const Nba& n);
EdgeDpa compress_edges(const EdgeDpa& a);
EdgeDpa minimize_edges(const EdgeDpa& a);
// State (q, c) is entered by a c-coloured edge into q and carries colour c.
Dpa to_state_based(const EdgeDpa& a);

} // namespace hypergame::detail
