#pragma once

#include "hypergame/logic.hpp"
#include "hypergame/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hypergame
{

struct Prophecy
{
    std::string name;  // prophecy proposition, __p<k>
    std::size_t index; // 1-based odd prefix position of the trace it is attached to
    FormulaPtr formula;
};

struct ProphecyFamily
{
    std::vector<Prophecy> entries; // in declaration order, entries[k].name == "__p<k>"

    [[nodiscard]] bool empty() const { return entries.empty(); }
    [[nodiscard]] std::vector<std::string> names() const;
};

// True iff the prefix is forall, exists, forall, exists, ... of even length.
bool is_strictly_alternating(const HyperLtlFormula& f);

// Pads the prefix with quantifiers over fresh variables __v<k>, which the body
// does not mention, until it strictly alternates starting with forall.
HyperLtlFormula normalize_alternating(const HyperLtlFormula& f);

// Lines `at <odd index>: <ltl>`; `#` starts a comment line. The prophecy at
// index i may only mention the trace variables at positions 1..i of f.
ProphecyFamily parse_prophecy_family(std::string_view text, const HyperLtlFormula& f);
ProphecyFamily load_prophecy_family(const std::string& path, const HyperLtlFormula& f);

// States S x 2^P and directions D x 2^P; the chosen valuation of the prophecy
// propositions becomes part of the target state. Directions are ordered with
// the empty valuation first.
KripkeStructure extend_ks(const KripkeStructure& ks, const ProphecyFamily& fam);

// Same prefix, body (X G conj(p[pi_i] <-> xi)) -> body.
HyperLtlFormula rewrite_formula(const HyperLtlFormula& f, const ProphecyFamily& fam);

// One `prophecy <name> at <index>: <ltl>` line per entry.
std::string render_manifest(const ProphecyFamily& fam);
// Reads back render_manifest lines and validates them against f.
ProphecyFamily parse_manifest(const std::vector<std::string>& lines, const HyperLtlFormula& f);

} // namespace hypergame
