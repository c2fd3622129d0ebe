#include "hypergame/oracle.hpp"

#include "hypergame/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hypergame
{

namespace
{

std::vector<StateId> successors(const KripkeStructure& ks, StateId s)
{
    std::set<StateId> out;
    for (DirId d = 0; d < ks.num_directions(); ++d)
        out.insert(ks.step(s, d));
    return {out.begin(), out.end()};
}

struct Enumerator
{
    const KripkeStructure& ks;
    std::vector<std::vector<StateId>> succ;
    std::set<std::pair<std::vector<Letter>, std::vector<Letter>>> seen;
    std::vector<Lasso> out;

    void loops(const std::vector<StateId>& stem, std::vector<StateId>& loop, std::size_t len)
    {
        if (loop.size() == len) {
            const auto& back = succ[loop.back()];
            if (!std::binary_search(back.begin(), back.end(), loop.front()))
                return;
            Lasso l{stem, loop};
            auto w = canonical(lasso_trace(ks, l));
            if (seen.emplace(std::move(w.stem), std::move(w.loop)).second)
                out.push_back(std::move(l));
            return;
        }
        for (StateId t : succ[loop.empty() ? stem.back() : loop.back()]) {
            loop.push_back(t);
            loops(stem, loop, len);
            loop.pop_back();
        }
    }

    void stems(std::vector<StateId>& stem, std::size_t len, std::size_t loop_len)
    {
        if (stem.size() == len) {
            std::vector<StateId> loop;
            loops(stem, loop, loop_len);
            return;
        }
        for (StateId t : succ[stem.back()]) {
            stem.push_back(t);
            stems(stem, len, loop_len);
            stem.pop_back();
        }
    }
};

struct Evaluator
{
    const HyperLtlFormula& f;
    const std::vector<std::string>& aps;
    std::vector<IndexedAp> alphabet;
    std::vector<std::vector<UpWord>> domains; // per prefix position
    std::map<std::string, UpWord> assignment;

    bool run(std::size_t i)
    {
        if (i == f.prefix.size())
            return eval_on_word(f.body, alphabet, zip_traces(alphabet, aps, assignment));
        const bool exists = f.prefix[i].quantifier == Quantifier::Exists;
        for (const auto& t : domains[i]) {
            assignment[f.prefix[i].var] = t;
            if (run(i + 1) == exists)
                return exists;
        }
        return !exists;
    }
};

// The body only reads the propositions indexed by a variable, so traces that
// agree on those are interchangeable for it.
std::vector<UpWord> domain(const std::vector<UpWord>& traces, Letter mask)
{
    std::set<std::pair<std::vector<Letter>, std::vector<Letter>>> seen;
    std::vector<UpWord> out;
    for (auto w : traces) {
        for (auto& x : w.stem)
            x &= mask;
        for (auto& x : w.loop)
            x &= mask;
        w = canonical(std::move(w));
        if (seen.emplace(w.stem, w.loop).second)
            out.push_back(std::move(w));
    }
    return out;
}

} // namespace

std::vector<Lasso> enumerate_lassos(const KripkeStructure& ks, const LassoBudget& b)
{
    if (b.stem_bound == 0 || b.loop_bound == 0)
        throw ValidationError("lasso bounds must be at least 1");
    Enumerator e{ks, {}, {}, {}};
    for (StateId s = 0; s < ks.num_states(); ++s)
        e.succ.push_back(successors(ks, s));
    for (std::size_t sl = 1; sl <= b.stem_bound; ++sl)
        for (std::size_t ll = 1; ll <= b.loop_bound; ++ll) {
            std::vector<StateId> stem{ks.init()};
            e.stems(stem, sl, ll);
        }
    return std::move(e.out);
}

bool oracle_check(const KripkeStructure& ks, const HyperLtlFormula& f, const LassoBudget& b)
{
    std::vector<UpWord> traces;
    for (const auto& l : enumerate_lassos(ks, b))
        traces.push_back(lasso_trace(ks, l));
    Evaluator ev{f, ks.aps(), indexed_aps(f.body), {}, {}};
    for (const auto& q : f.prefix) {
        Letter mask = 0;
        for (const auto& a : ev.alphabet)
            if (a.var == q.var)
                for (std::size_t i = 0; i < ks.aps().size(); ++i)
                    if (ks.aps()[i] == a.ap)
                        mask |= Letter{1} << i;
        ev.domains.push_back(domain(traces, mask));
    }
    return ev.run(0);
}

} // namespace hypergame
