#pragma once

#include "hypergame/word.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hypergame
{

enum class Op
{
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Until,
    Release,
    Eventually,
    Globally
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// LTL over trace-indexed atomic propositions. Release is not part of the
// surface grammar's core but appears in negation normal form.
struct Formula
{
    Op op;
    std::string ap;  // Atom only
    std::string var; // Atom only
    FormulaPtr lhs;  // unary operand or left operand
    FormulaPtr rhs;
};

FormulaPtr make_true();
FormulaPtr make_false();
FormulaPtr atom(std::string ap, std::string var);
FormulaPtr lnot(FormulaPtr f);
FormulaPtr land(FormulaPtr a, FormulaPtr b);
FormulaPtr lor(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr iff(FormulaPtr a, FormulaPtr b);
FormulaPtr next(FormulaPtr f);
FormulaPtr until(FormulaPtr a, FormulaPtr b);
FormulaPtr release(FormulaPtr a, FormulaPtr b);
FormulaPtr eventually(FormulaPtr f);
FormulaPtr globally(FormulaPtr f);

// Conjunction of all entries; `true` when empty.
FormulaPtr conjunction(const std::vector<FormulaPtr>& fs);

bool is_unary(Op op);
bool is_binary(Op op);
bool same_formula(const FormulaPtr& a, const FormulaPtr& b);

// Fully parenthesized rendering that parse_ltl reads back.
std::string to_string(const FormulaPtr& f);

enum class Quantifier
{
    Forall,
    Exists
};

struct QuantifiedVar
{
    Quantifier quantifier;
    std::string var;

    friend bool operator==(const QuantifiedVar&, const QuantifiedVar&) = default;
};

struct HyperLtlFormula
{
    std::vector<QuantifiedVar> prefix;
    FormulaPtr body;

    [[nodiscard]] std::size_t size() const { return prefix.size(); }
    [[nodiscard]] std::vector<std::string> vars() const;
    // Position of var in the prefix; throws ValidationError if absent.
    [[nodiscard]] std::size_t var_index(std::string_view var) const;
    // True iff every existential precedes every universal.
    [[nodiscard]] bool is_exists_forall() const;
    // True iff every universal precedes every existential.
    [[nodiscard]] bool is_forall_exists() const;
};

std::string to_string(const HyperLtlFormula& f);

// Parses a quantifier-free body; trace variables are not checked.
FormulaPtr parse_ltl(std::string_view text);

// Parses `forall p1. exists p2. body`. Throws ParseError on syntax errors and
// ValidationError on unbound or duplicate trace variables.
HyperLtlFormula parse_hyperltl(std::string_view text);
HyperLtlFormula load_hyperltl(const std::string& path);

// Negation normal form: negation only on atoms, Implies/Iff eliminated,
// Eventually/Globally kept as they are self-dual via Until/Release.
FormulaPtr nnf(const FormulaPtr& f);
HyperLtlFormula negate_hyperltl(const HyperLtlFormula& f);

struct IndexedAp
{
    std::string ap;
    std::string var;

    friend auto operator<=>(const IndexedAp&, const IndexedAp&) = default;
};

std::string to_string(const IndexedAp& a);

// Indexed atoms in body, sorted by (ap, var) and without duplicates.
std::vector<IndexedAp> indexed_aps(const FormulaPtr& body);
std::vector<std::string> trace_vars(const FormulaPtr& body);

// Truth of body at position 0 of a word whose letter bit i means alphabet[i].
// Atoms outside the alphabet are false.
bool eval_on_word(const FormulaPtr& body, const std::vector<IndexedAp>& alphabet, const UpWord& word);

// Truth of body under a trace assignment. Traces are letters over aps; every
// trace variable of body must be assigned.
bool eval_body_on_lassos(const FormulaPtr& body,
                         const std::vector<std::string>& aps,
                         const std::map<std::string, UpWord>& assignment);

// Letter word over alphabet obtained by running all traces in lockstep; the
// stem is the longest stem and the loop has the lcm of the loop lengths.
UpWord zip_traces(const std::vector<IndexedAp>& alphabet,
                  const std::vector<std::string>& aps,
                  const std::map<std::string, UpWord>& assignment);

} // namespace hypergame
