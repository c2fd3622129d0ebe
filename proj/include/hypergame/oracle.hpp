#pragma once

#include "hypergame/logic.hpp"
#include "hypergame/model.hpp"

#include <cstddef>
#include <vector>

namespace hypergame
{

struct LassoBudget
{
    std::size_t stem_bound = 4;
    std::size_t loop_bound = 4;
};

// Lassos of ks with 1 <= |stem| <= stem_bound (the stem includes the initial
// state) and 1 <= |loop| <= loop_bound, one per distinct trace, ordered by
// stem length, loop length, then state ids. Throws ValidationError when a
// bound is 0.
std::vector<Lasso> enumerate_lassos(const KripkeStructure& ks, const LassoBudget& b);

// Evaluates f with every quantifier ranging over the traces of
// enumerate_lassos(ks, b). Exact for that trace set, an approximation of
// K |= f otherwise.
bool oracle_check(const KripkeStructure& ks, const HyperLtlFormula& f, const LassoBudget& b);

} // namespace hypergame
