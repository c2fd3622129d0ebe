#include "hypergame/automata.hpp"

#include "detail/dpa_internal.hpp"
#include "detail/graph.hpp"
#include "hypergame/error.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace hypergame
{

namespace
{

constexpr unsigned unset = ~0U;

unsigned with_parity(unsigned lo, unsigned parity_of)
{
    return lo % 2 == parity_of % 2 ? lo : lo + 1;
}

// Partition refinement. sig(q, cls) produces the part of the signature that
// depends on the current classes; initial classes are given.
template <class Sig>
std::vector<std::uint32_t> refine(std::size_t n, std::vector<std::uint32_t> cls, Sig sig)
{
    std::size_t count = 0;
    {
        std::vector<std::uint32_t> sorted = cls;
        std::sort(sorted.begin(), sorted.end());
        count = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    }
    while (true) {
        std::map<std::vector<std::uint64_t>, std::uint32_t> ids;
        std::vector<std::uint32_t> next(n);
        for (std::size_t q = 0; q < n; ++q) {
            std::vector<std::uint64_t> key{cls[q]};
            sig(q, cls, key);
            auto [it, fresh] = ids.emplace(std::move(key), static_cast<std::uint32_t>(ids.size()));
            next[q] = it->second;
        }
        cls = std::move(next);
        if (ids.size() == count)
            return cls;
        count = ids.size();
    }
}

} // namespace

AutState Dpa::step(AutState q, std::uint64_t letter) const
{
    if (q >= delta.size())
        throw ValidationError("unknown automaton state");
    if (letter >= letters)
        throw ValidationError("letter outside the automaton alphabet");
    return delta[q][letter];
}

namespace detail
{

EdgeDpa compress_edges(const EdgeDpa& a)
{
    const std::size_t n = a.delta.size();
    const std::uint32_t L = a.letters;
    EdgeDpa out = a;
    for (auto& row : out.color)
        std::fill(row.begin(), row.end(), unset);

    struct Work
    {
        std::vector<std::uint32_t> nodes;
        long threshold; // edges with colour > threshold are kept
        unsigned lo;
    };
    std::vector<Work> work{{{}, -1, 0}};
    for (std::uint32_t q = 0; q < n; ++q)
        work.front().nodes.push_back(q);
    std::vector<char> in_set(n, 0);
    std::vector<std::uint32_t> local(n, 0);

    while (!work.empty()) {
        Work w = std::move(work.back());
        work.pop_back();
        for (std::uint32_t i = 0; i < w.nodes.size(); ++i) {
            in_set[w.nodes[i]] = 1;
            local[w.nodes[i]] = i;
        }
        auto kept = [&](std::uint32_t q, std::uint32_t l) {
            return in_set[a.delta[q][l]] != 0 && static_cast<long>(a.color[q][l]) > w.threshold;
        };
        Adjacency succ(w.nodes.size());
        for (std::uint32_t i = 0; i < w.nodes.size(); ++i)
            for (std::uint32_t l = 0; l < L; ++l)
                if (kept(w.nodes[i], l))
                    succ[i].push_back(local[a.delta[w.nodes[i]][l]]);
        auto sccs = tarjan(succ);
        std::vector<std::vector<std::uint32_t>> members(sccs.count);
        for (std::uint32_t i = 0; i < w.nodes.size(); ++i)
            members[sccs.component[i]].push_back(w.nodes[i]);
        std::vector<Work> children;
        for (std::uint32_t c = 0; c < sccs.count; ++c) {
            if (sccs.cyclic[c] == 0)
                continue;
            auto internal = [&](std::uint32_t q, std::uint32_t l) {
                return kept(q, l) && sccs.component[local[a.delta[q][l]]] == c;
            };
            unsigned m = unset;
            for (auto q : members[c])
                for (std::uint32_t l = 0; l < L; ++l)
                    if (internal(q, l))
                        m = std::min(m, a.color[q][l]);
            unsigned mine = with_parity(w.lo, m);
            for (auto q : members[c])
                for (std::uint32_t l = 0; l < L; ++l)
                    if (internal(q, l))
                        out.color[q][l] = mine;
            children.push_back({members[c], static_cast<long>(m), mine});
        }
        for (auto q : w.nodes)
            in_set[q] = 0;
        for (auto& c : children)
            work.push_back(std::move(c));
    }

    // Transient edges are seen finitely often; reuse a colour already
    // entering the target to keep state splitting small.
    std::vector<unsigned> entering(n, unset);
    for (std::size_t q = 0; q < n; ++q)
        for (std::uint32_t l = 0; l < L; ++l)
            if (out.color[q][l] != unset)
                entering[a.delta[q][l]] = std::min(entering[a.delta[q][l]], out.color[q][l]);
    for (std::size_t q = 0; q < n; ++q)
        for (std::uint32_t l = 0; l < L; ++l)
            if (out.color[q][l] == unset) {
                unsigned e = entering[a.delta[q][l]];
                out.color[q][l] = e == unset ? 0 : e;
            }
    return out;
}

EdgeDpa minimize_edges(const EdgeDpa& a)
{
    const std::size_t n = a.delta.size();
    const std::uint32_t L = a.letters;
    auto cls = refine(n, std::vector<std::uint32_t>(n, 0),
                      [&](std::size_t q, const std::vector<std::uint32_t>& c, std::vector<std::uint64_t>& key) {
                          for (std::uint32_t l = 0; l < L; ++l)
                              key.push_back((std::uint64_t{a.color[q][l]} << 32) | c[a.delta[q][l]]);
                      });
    // renumber classes in breadth-first order from the initial state
    std::vector<std::uint32_t> rep_of_class(n, unset), order;
    std::vector<std::uint32_t> new_id(n, unset);
    auto visit = [&](AutState q) {
        auto c = cls[q];
        if (new_id[c] == unset) {
            new_id[c] = static_cast<std::uint32_t>(order.size());
            order.push_back(static_cast<std::uint32_t>(q));
        }
        return new_id[c];
    };
    EdgeDpa out;
    out.letters = L;
    out.initial = visit(a.initial);
    for (std::size_t i = 0; i < order.size(); ++i) {
        AutState q = order[i];
        std::vector<AutState> row(L);
        std::vector<unsigned> col(L);
        for (std::uint32_t l = 0; l < L; ++l) {
            row[l] = visit(a.delta[q][l]);
            col[l] = a.color[q][l];
        }
        out.delta.push_back(std::move(row));
        out.color.push_back(std::move(col));
    }
    return out;
}

Dpa to_state_based(const EdgeDpa& a)
{
    const std::uint32_t L = a.letters;
    Dpa out;
    out.letters = L;
    std::map<std::pair<AutState, unsigned>, AutState> ids;
    std::vector<std::pair<AutState, unsigned>> queue;
    auto id_of = [&](AutState q, unsigned c) {
        auto [it, fresh] = ids.emplace(std::make_pair(q, c), static_cast<AutState>(queue.size()));
        if (fresh) {
            if (queue.size() >= automaton_state_cap)
                throw ResourceError("automaton exceeds " + std::to_string(automaton_state_cap) + " states");
            queue.emplace_back(q, c);
        }
        return it->second;
    };
    // The initial copy is never re-entered, so any colour works; reuse one
    // that enters the initial state if there is one.
    unsigned init_color = 0;
    bool found = false;
    for (std::size_t q = 0; q < a.delta.size() && !found; ++q)
        for (std::uint32_t l = 0; l < L && !found; ++l)
            if (a.delta[q][l] == a.initial) {
                init_color = a.color[q][l];
                found = true;
            }
    out.initial = id_of(a.initial, init_color);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [q, c] = queue[head];
        std::vector<AutState> row(L);
        for (std::uint32_t l = 0; l < L; ++l)
            row[l] = id_of(a.delta[q][l], a.color[q][l]);
        out.delta.push_back(std::move(row));
        out.color.push_back(c);
    }
    out.max_color = out.color.empty() ? 0 : *std::max_element(out.color.begin(), out.color.end());
    return out;
}

} // namespace detail

Dpa simplify_dpa(const Dpa& a)
{
    const std::uint32_t L = a.letters;
    // reachable part
    detail::Adjacency succ(a.size());
    for (std::size_t q = 0; q < a.size(); ++q)
        succ[q].assign(a.delta[q].begin(), a.delta[q].end());
    auto reach = detail::reachable(succ, {a.initial});

    // colour compression on states
    std::vector<unsigned> color(a.size(), unset);
    struct Work
    {
        std::vector<std::uint32_t> nodes;
        long threshold;
        unsigned lo;
    };
    std::vector<Work> work{{{}, -1, 0}};
    for (std::uint32_t q = 0; q < a.size(); ++q)
        if (reach[q] != 0)
            work.front().nodes.push_back(q);
    std::vector<char> alive(a.size(), 0);
    detail::Sccs top;
    bool first = true;
    while (!work.empty()) {
        Work w = std::move(work.back());
        work.pop_back();
        for (auto q : w.nodes)
            alive[q] = static_cast<long>(a.color[q]) > w.threshold ? 1 : 0;
        auto sccs = detail::tarjan(succ, &alive);
        if (first) {
            top = sccs;
            first = false;
        }
        std::map<std::uint32_t, std::vector<std::uint32_t>> members;
        for (auto q : w.nodes)
            if (alive[q] != 0 && sccs.cyclic[sccs.component[q]] != 0)
                members[sccs.component[q]].push_back(q);
        for (auto q : w.nodes)
            alive[q] = 0;
        for (auto& [c, qs] : members) {
            unsigned m = unset;
            for (auto q : qs)
                m = std::min(m, a.color[q]);
            unsigned mine = with_parity(w.lo, m);
            for (auto q : qs)
                color[q] = mine;
            work.push_back({qs, static_cast<long>(m), mine});
        }
    }
    // states outside every cycle copy the colour of a successor, processed
    // successors first
    {
        std::vector<std::vector<std::uint32_t>> by_comp(top.count);
        for (std::uint32_t q = 0; q < a.size(); ++q)
            if (reach[q] != 0)
                by_comp[top.component[q]].push_back(q);
        for (std::uint32_t c = 0; c < top.count; ++c)
            for (auto q : by_comp[c])
                if (color[q] == unset) {
                    unsigned s = color[a.delta[q][0]];
                    color[q] = s == unset ? 0 : s;
                }
    }

    std::vector<std::uint32_t> initial_cls(a.size(), 0);
    for (std::size_t q = 0; q < a.size(); ++q)
        initial_cls[q] = reach[q] != 0 ? color[q] : unset;
    auto cls = refine(a.size(), initial_cls,
                      [&](std::size_t q, const std::vector<std::uint32_t>& c, std::vector<std::uint64_t>& key) {
                          for (std::uint32_t l = 0; l < L; ++l)
                              key.push_back(c[a.delta[q][l]]);
                      });

    std::vector<std::uint32_t> new_id(a.size(), unset), order;
    auto visit = [&](AutState q) {
        auto c = cls[q];
        if (new_id[c] == unset) {
            new_id[c] = static_cast<std::uint32_t>(order.size());
            order.push_back(q);
        }
        return new_id[c];
    };
    Dpa out;
    out.aps = a.aps;
    out.letters = L;
    out.initial = visit(a.initial);
    for (std::size_t i = 0; i < order.size(); ++i) {
        AutState q = order[i];
        std::vector<AutState> row(L);
        for (std::uint32_t l = 0; l < L; ++l)
            row[l] = visit(a.delta[q][l]);
        out.delta.push_back(std::move(row));
        out.color.push_back(color[q]);
    }
    out.max_color = *std::max_element(out.color.begin(), out.color.end());
    return out;
}

bool dpa_lasso_accepts(const Dpa& a, const UpWord& word)
{
    if (word.loop.empty())
        throw ValidationError("word has an empty loop");
    AutState q = a.initial;
    for (Letter l : word.stem)
        q = a.step(q, l);
    const std::size_t p = word.loop.size();
    // first visit index of (state, loop position)
    std::unordered_map<std::uint64_t, std::size_t> seen;
    std::vector<AutState> run;
    for (std::size_t i = 0;; ++i) {
        std::uint64_t key = (std::uint64_t{q} << 32) | (i % p);
        auto [it, fresh] = seen.emplace(key, i);
        if (!fresh) {
            unsigned m = unset;
            for (std::size_t j = it->second; j < i; ++j)
                m = std::min(m, a.color[run[j]]);
            return m % 2 == 0;
        }
        run.push_back(q);
        q = a.step(q, word.loop[i % p]);
    }
}

Dpa complement_dpa(const Dpa& a)
{
    Dpa out = a;
    for (auto& c : out.color)
        ++c;
    out.max_color = a.max_color + 1;
    return out;
}

std::optional<UpWord> dpa_accepted_word(const Dpa& a)
{
    detail::Adjacency succ(a.size());
    for (std::size_t q = 0; q < a.size(); ++q)
        succ[q].assign(a.delta[q].begin(), a.delta[q].end());
    auto reach = detail::reachable(succ, {a.initial});

    // breadth-first path of letters from `from` to `to` inside `allowed`,
    // taking at least one step
    auto path = [&](AutState from, AutState to, const std::vector<char>& allowed) {
        std::vector<std::pair<AutState, Letter>> pred(a.size(), {unset, 0});
        std::vector<char> seen(a.size(), 0);
        std::vector<AutState> queue{from};
        std::vector<Letter> letters;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            AutState q = queue[h];
            for (std::uint32_t l = 0; l < a.letters; ++l) {
                AutState t = a.delta[q][l];
                if (allowed[t] == 0 || seen[t] != 0)
                    continue;
                seen[t] = 1;
                pred[t] = {q, l};
                if (t == to) {
                    for (AutState x = to;;) {
                        letters.push_back(pred[x].second);
                        x = pred[x].first;
                        if (x == from)
                            break;
                    }
                    std::reverse(letters.begin(), letters.end());
                    return letters;
                }
                queue.push_back(t);
            }
        }
        return letters;
    };

    for (unsigned e = 0; e <= a.max_color; e += 2) {
        std::vector<char> alive(a.size(), 0);
        for (std::size_t q = 0; q < a.size(); ++q)
            alive[q] = reach[q] != 0 && a.color[q] >= e ? 1 : 0;
        auto sccs = detail::tarjan(succ, &alive);
        for (AutState q = 0; q < a.size(); ++q) {
            if (alive[q] == 0 || a.color[q] != e || sccs.cyclic[sccs.component[q]] == 0)
                continue;
            std::vector<char> in_comp(a.size(), 0);
            for (std::size_t x = 0; x < a.size(); ++x)
                in_comp[x] = alive[x] != 0 && sccs.component[x] == sccs.component[q] ? 1 : 0;
            UpWord w;
            if (q != a.initial)
                w.stem = path(a.initial, q, reach);
            w.loop = path(q, q, in_comp);
            return w;
        }
    }
    return std::nullopt;
}

} // namespace hypergame
