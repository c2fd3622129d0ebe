#include "hypergame/logic.hpp"

#include "detail/lexer.hpp"
#include "hypergame/error.hpp"
#include "hypergame/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace hypergame
{

namespace
{

FormulaPtr make(Op op, FormulaPtr lhs = nullptr, FormulaPtr rhs = nullptr)
{
    return std::make_shared<const Formula>(Formula{op, {}, {}, std::move(lhs), std::move(rhs)});
}

const char* op_symbol(Op op)
{
    switch (op) {
    case Op::Not: return "!";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "->";
    case Op::Iff: return "<->";
    case Op::Next: return "X";
    case Op::Until: return "U";
    case Op::Release: return "R";
    case Op::Eventually: return "F";
    case Op::Globally: return "G";
    default: return "?";
    }
}

bool is_unary_chain(const detail::Token& t)
{
    return t.kind == detail::Token::Kind::ident &&
           std::all_of(t.text.begin(), t.text.end(), [](char c) { return c == 'X' || c == 'F' || c == 'G'; });
}

class Parser
{
public:
    explicit Parser(std::string_view text) : ts_(detail::tokenize(text)) {}

    HyperLtlFormula formula()
    {
        HyperLtlFormula f;
        while (!ts_.at_end() && (ts_.peek().text == "forall" || ts_.peek().text == "exists") &&
               ts_.peek(1).text != "[") {
            Quantifier q = ts_.next().text == "forall" ? Quantifier::Forall : Quantifier::Exists;
            std::string var = ts_.expect_ident("trace variable");
            ts_.expect(".");
            f.prefix.push_back({q, std::move(var)});
        }
        f.body = body();
        return f;
    }

    FormulaPtr body()
    {
        FormulaPtr f = parse_iff();
        if (!ts_.at_end())
            ts_.fail("unexpected token");
        return f;
    }

private:
    bool at_binary_ident(std::string_view name) const
    {
        const auto& t = ts_.peek();
        return t.kind == detail::Token::Kind::ident && t.text == name && ts_.peek(1).text != "[";
    }

    FormulaPtr parse_iff()
    {
        FormulaPtr l = parse_implies();
        if (ts_.accept("<->"))
            return iff(l, parse_iff());
        return l;
    }

    FormulaPtr parse_implies()
    {
        FormulaPtr l = parse_or();
        if (ts_.accept("->"))
            return implies(l, parse_implies());
        return l;
    }

    FormulaPtr parse_or()
    {
        FormulaPtr l = parse_and();
        while (ts_.accept("||"))
            l = lor(l, parse_and());
        return l;
    }

    FormulaPtr parse_and()
    {
        FormulaPtr l = parse_until();
        while (ts_.accept("&&"))
            l = land(l, parse_until());
        return l;
    }

    FormulaPtr parse_until()
    {
        FormulaPtr l = parse_unary();
        if (at_binary_ident("U")) {
            ts_.next();
            return until(l, parse_until());
        }
        if (at_binary_ident("R")) {
            ts_.next();
            return release(l, parse_until());
        }
        return l;
    }

    FormulaPtr parse_unary()
    {
        if (ts_.accept("!"))
            return lnot(parse_unary());
        const auto& t = ts_.peek();
        if (t.kind == detail::Token::Kind::ident && ts_.peek(1).text != "[") {
            if (is_unary_chain(t)) {
                std::string chain = ts_.next().text;
                FormulaPtr f = parse_unary();
                for (auto it = chain.rbegin(); it != chain.rend(); ++it)
                    f = *it == 'X' ? next(f) : *it == 'F' ? eventually(f) : globally(f);
                return f;
            }
            if (t.text == "true") {
                ts_.next();
                return make_true();
            }
            if (t.text == "false") {
                ts_.next();
                return make_false();
            }
        }
        if (ts_.accept("(")) {
            FormulaPtr f = parse_iff();
            ts_.expect(")");
            return f;
        }
        std::string ap = ts_.expect_ident("formula");
        ts_.expect("[");
        std::string var = ts_.expect_ident("trace variable");
        ts_.expect("]");
        return atom(std::move(ap), std::move(var));
    }

    detail::TokenStream ts_;
};

void collect_atoms(const FormulaPtr& f, std::set<IndexedAp>& out)
{
    if (!f)
        return;
    if (f->op == Op::Atom)
        out.insert({f->ap, f->var});
    collect_atoms(f->lhs, out);
    collect_atoms(f->rhs, out);
}

FormulaPtr nnf_rec(const FormulaPtr& f, bool neg)
{
    switch (f->op) {
    case Op::True: return neg ? make_false() : f;
    case Op::False: return neg ? make_true() : f;
    case Op::Atom: return neg ? lnot(f) : f;
    case Op::Not: return nnf_rec(f->lhs, !neg);
    case Op::And:
        return neg ? lor(nnf_rec(f->lhs, true), nnf_rec(f->rhs, true))
                   : land(nnf_rec(f->lhs, false), nnf_rec(f->rhs, false));
    case Op::Or:
        return neg ? land(nnf_rec(f->lhs, true), nnf_rec(f->rhs, true))
                   : lor(nnf_rec(f->lhs, false), nnf_rec(f->rhs, false));
    case Op::Implies: return nnf_rec(lor(lnot(f->lhs), f->rhs), neg);
    case Op::Iff: {
        auto a = nnf_rec(f->lhs, false), na = nnf_rec(f->lhs, true);
        auto b = nnf_rec(f->rhs, false), nb = nnf_rec(f->rhs, true);
        return neg ? lor(land(a, nb), land(na, b)) : lor(land(a, b), land(na, nb));
    }
    case Op::Next: return next(nnf_rec(f->lhs, neg));
    case Op::Until:
        return neg ? release(nnf_rec(f->lhs, true), nnf_rec(f->rhs, true))
                   : until(nnf_rec(f->lhs, false), nnf_rec(f->rhs, false));
    case Op::Release:
        return neg ? until(nnf_rec(f->lhs, true), nnf_rec(f->rhs, true))
                   : release(nnf_rec(f->lhs, false), nnf_rec(f->rhs, false));
    case Op::Eventually: return neg ? globally(nnf_rec(f->lhs, true)) : eventually(nnf_rec(f->lhs, false));
    case Op::Globally: return neg ? eventually(nnf_rec(f->lhs, true)) : globally(nnf_rec(f->lhs, false));
    }
    throw Error("corrupt formula");
}

using Valuation = std::vector<char>;

class WordEvaluator
{
public:
    WordEvaluator(const std::vector<IndexedAp>& alphabet, const UpWord& w) : alphabet_(alphabet), w_(w)
    {
        if (w.loop.empty())
            throw ValidationError("word has an empty loop");
        n_ = w.stem.size() + w.loop.size();
    }

    const Valuation& eval(const FormulaPtr& f)
    {
        auto it = memo_.find(f.get());
        if (it != memo_.end())
            return it->second;
        Valuation v(n_, 0);
        switch (f->op) {
        case Op::True: std::fill(v.begin(), v.end(), 1); break;
        case Op::False: break;
        case Op::Atom: {
            auto found = std::find(alphabet_.begin(), alphabet_.end(), IndexedAp{f->ap, f->var});
            if (found != alphabet_.end()) {
                auto bit = static_cast<std::size_t>(found - alphabet_.begin());
                for (std::size_t i = 0; i < n_; ++i)
                    v[i] = static_cast<char>((w_.at(i) >> bit) & 1U);
            }
            break;
        }
        case Op::Not: {
            const auto& a = eval(f->lhs);
            for (std::size_t i = 0; i < n_; ++i)
                v[i] = static_cast<char>(!a[i]);
            break;
        }
        case Op::And:
        case Op::Or:
        case Op::Implies:
        case Op::Iff: {
            const Valuation a = eval(f->lhs);
            const auto& b = eval(f->rhs);
            for (std::size_t i = 0; i < n_; ++i) {
                bool x = a[i] != 0, y = b[i] != 0;
                bool r = f->op == Op::And ? (x && y) : f->op == Op::Or ? (x || y) : f->op == Op::Implies ? (!x || y) : (x == y);
                v[i] = static_cast<char>(r);
            }
            break;
        }
        case Op::Next: {
            const auto& a = eval(f->lhs);
            for (std::size_t i = 0; i < n_; ++i)
                v[i] = a[succ(i)];
            break;
        }
        case Op::Until:
        case Op::Eventually: {
            Valuation a(n_, 1);
            if (f->op == Op::Until)
                a = eval(f->lhs);
            const auto& b = eval(f->op == Op::Until ? f->rhs : f->lhs);
            fixpoint(v, a, b, false);
            break;
        }
        case Op::Release:
        case Op::Globally: {
            Valuation a(n_, 0);
            if (f->op == Op::Release)
                a = eval(f->lhs);
            const auto& b = eval(f->op == Op::Release ? f->rhs : f->lhs);
            std::fill(v.begin(), v.end(), 1);
            fixpoint(v, a, b, true);
            break;
        }
        }
        return memo_.emplace(f.get(), std::move(v)).first->second;
    }

private:
    [[nodiscard]] std::size_t succ(std::size_t i) const { return i + 1 < n_ ? i + 1 : w_.stem.size(); }

    // Until:   v = b | (a & X v), least solution starting from all-false.
    // Release: v = b & (a | X v), greatest solution starting from all-true.
    void fixpoint(Valuation& v, const Valuation& a, const Valuation& b, bool release) const
    {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t k = n_; k-- > 0;) {
                bool nv = release ? (b[k] && (a[k] || v[succ(k)])) : (b[k] || (a[k] && v[succ(k)]));
                if (static_cast<char>(nv) != v[k]) {
                    v[k] = static_cast<char>(nv);
                    changed = true;
                }
            }
        }
    }

    const std::vector<IndexedAp>& alphabet_;
    const UpWord& w_;
    std::size_t n_;
    std::unordered_map<const Formula*, Valuation> memo_;
};

} // namespace

FormulaPtr make_true()
{
    static const FormulaPtr t = make(Op::True);
    return t;
}

FormulaPtr make_false()
{
    static const FormulaPtr f = make(Op::False);
    return f;
}

FormulaPtr atom(std::string ap, std::string var)
{
    return std::make_shared<const Formula>(Formula{Op::Atom, std::move(ap), std::move(var), nullptr, nullptr});
}

FormulaPtr lnot(FormulaPtr f) { return make(Op::Not, std::move(f)); }
FormulaPtr land(FormulaPtr a, FormulaPtr b) { return make(Op::And, std::move(a), std::move(b)); }
FormulaPtr lor(FormulaPtr a, FormulaPtr b) { return make(Op::Or, std::move(a), std::move(b)); }
FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return make(Op::Implies, std::move(a), std::move(b)); }
FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return make(Op::Iff, std::move(a), std::move(b)); }
FormulaPtr next(FormulaPtr f) { return make(Op::Next, std::move(f)); }
FormulaPtr until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, std::move(a), std::move(b)); }
FormulaPtr release(FormulaPtr a, FormulaPtr b) { return make(Op::Release, std::move(a), std::move(b)); }
FormulaPtr eventually(FormulaPtr f) { return make(Op::Eventually, std::move(f)); }
FormulaPtr globally(FormulaPtr f) { return make(Op::Globally, std::move(f)); }

FormulaPtr conjunction(const std::vector<FormulaPtr>& fs)
{
    if (fs.empty())
        return make_true();
    FormulaPtr out = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i)
        out = land(out, fs[i]);
    return out;
}

bool is_unary(Op op)
{
    return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Globally;
}

bool is_binary(Op op)
{
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Iff || op == Op::Until ||
           op == Op::Release;
}

bool same_formula(const FormulaPtr& a, const FormulaPtr& b)
{
    if (a == b)
        return true;
    if (!a || !b || a->op != b->op)
        return false;
    if (a->op == Op::Atom)
        return a->ap == b->ap && a->var == b->var;
    return same_formula(a->lhs, b->lhs) && same_formula(a->rhs, b->rhs);
}

std::string to_string(const FormulaPtr& f)
{
    switch (f->op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return f->ap + "[" + f->var + "]";
    default: break;
    }
    if (is_unary(f->op)) {
        std::string inner = to_string(f->lhs);
        return f->op == Op::Not ? "!" + inner : std::string(op_symbol(f->op)) + " " + inner;
    }
    return "(" + to_string(f->lhs) + " " + op_symbol(f->op) + " " + to_string(f->rhs) + ")";
}

std::vector<std::string> HyperLtlFormula::vars() const
{
    std::vector<std::string> out;
    for (const auto& q : prefix)
        out.push_back(q.var);
    return out;
}

std::size_t HyperLtlFormula::var_index(std::string_view var) const
{
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (prefix[i].var == var)
            return i;
    throw ValidationError("trace variable '" + std::string(var) + "' is not quantified");
}

bool HyperLtlFormula::is_exists_forall() const
{
    bool seen_forall = false;
    for (const auto& q : prefix) {
        if (q.quantifier == Quantifier::Forall)
            seen_forall = true;
        else if (seen_forall)
            return false;
    }
    return true;
}

bool HyperLtlFormula::is_forall_exists() const
{
    bool seen_exists = false;
    for (const auto& q : prefix) {
        if (q.quantifier == Quantifier::Exists)
            seen_exists = true;
        else if (seen_exists)
            return false;
    }
    return true;
}

std::string to_string(const HyperLtlFormula& f)
{
    std::string out;
    for (const auto& q : f.prefix)
        out += (q.quantifier == Quantifier::Forall ? "forall " : "exists ") + q.var + ". ";
    return out + to_string(f.body);
}

FormulaPtr parse_ltl(std::string_view text)
{
    return Parser(text).body();
}

HyperLtlFormula parse_hyperltl(std::string_view text)
{
    HyperLtlFormula f = Parser(text).formula();
    std::set<std::string> bound;
    for (const auto& q : f.prefix)
        if (!bound.insert(q.var).second)
            throw ValidationError("trace variable '" + q.var + "' is quantified twice");
    for (const auto& v : trace_vars(f.body))
        if (bound.count(v) == 0)
            throw ValidationError("trace variable '" + v + "' is not quantified");
    return f;
}

HyperLtlFormula load_hyperltl(const std::string& path)
{
    return parse_hyperltl(read_file(path));
}

FormulaPtr nnf(const FormulaPtr& f)
{
    return nnf_rec(f, false);
}

HyperLtlFormula negate_hyperltl(const HyperLtlFormula& f)
{
    HyperLtlFormula out;
    for (const auto& q : f.prefix)
        out.prefix.push_back(
            {q.quantifier == Quantifier::Forall ? Quantifier::Exists : Quantifier::Forall, q.var});
    out.body = nnf_rec(f.body, true);
    return out;
}

std::string to_string(const IndexedAp& a)
{
    return a.ap + "[" + a.var + "]";
}

std::vector<IndexedAp> indexed_aps(const FormulaPtr& body)
{
    std::set<IndexedAp> s;
    collect_atoms(body, s);
    return {s.begin(), s.end()};
}

std::vector<std::string> trace_vars(const FormulaPtr& body)
{
    std::set<std::string> s;
    for (const auto& a : indexed_aps(body))
        s.insert(a.var);
    return {s.begin(), s.end()};
}

bool eval_on_word(const FormulaPtr& body, const std::vector<IndexedAp>& alphabet, const UpWord& word)
{
    WordEvaluator ev(alphabet, word);
    return ev.eval(body)[0] != 0;
}

UpWord zip_traces(const std::vector<IndexedAp>& alphabet,
                  const std::vector<std::string>& aps,
                  const std::map<std::string, UpWord>& assignment)
{
    struct Source
    {
        const UpWord* trace;
        std::size_t bit;
    };
    std::vector<Source> sources;
    std::size_t stem = 0, loop = 1;
    for (const auto& a : alphabet) {
        auto it = assignment.find(a.var);
        if (it == assignment.end())
            throw ValidationError("trace variable '" + a.var + "' is not assigned");
        auto ap = std::find(aps.begin(), aps.end(), a.ap);
        if (ap == aps.end())
            throw ValidationError("atomic proposition '" + a.ap + "' is not declared");
        if (it->second.loop.empty())
            throw ValidationError("trace for '" + a.var + "' has an empty loop");
        sources.push_back({&it->second, static_cast<std::size_t>(ap - aps.begin())});
    }
    for (const auto& [var, t] : assignment) {
        stem = std::max(stem, t.stem.size());
        loop = std::lcm(loop, std::max<std::size_t>(t.loop.size(), 1));
    }
    UpWord w;
    auto letter = [&](std::size_t i) {
        Letter l = 0;
        for (std::size_t j = 0; j < sources.size(); ++j)
            if ((sources[j].trace->at(i) >> sources[j].bit) & 1U)
                l |= Letter{1} << j;
        return l;
    };
    for (std::size_t i = 0; i < stem; ++i)
        w.stem.push_back(letter(i));
    for (std::size_t i = 0; i < loop; ++i)
        w.loop.push_back(letter(stem + i));
    return w;
}

bool eval_body_on_lassos(const FormulaPtr& body,
                         const std::vector<std::string>& aps,
                         const std::map<std::string, UpWord>& assignment)
{
    auto alphabet = indexed_aps(body);
    return eval_on_word(body, alphabet, zip_traces(alphabet, aps, assignment));
}

} // namespace hypergame
