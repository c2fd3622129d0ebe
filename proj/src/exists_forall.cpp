#include "hypergame/solver.hpp"

#include "detail/graph.hpp"
#include "hypergame/error.hpp"

#include <map>
#include <set>
#include <unordered_map>

namespace hypergame
{

namespace
{

// Universal parity automaton over joint existential directions, read as a
// nondeterministic one for the complement: state (copies, q), colour c(q)+1.
struct Product
{
    std::size_t k = 0; // existential copies, first in the prefix
    std::size_t n = 0;
    std::uint32_t letters = 1;
    std::vector<std::vector<StateId>> states;
    std::vector<AutState> q;
    std::vector<std::vector<std::vector<std::uint32_t>>> succ; // [x][letter]
    std::vector<unsigned> color;
};

Product build_product(const MpgGame& g)
{
    const auto& ks = g.ks();
    const auto& a = g.dpa();
    const auto& f = g.formula();
    Product p;
    p.n = f.size();
    while (p.k < p.n && f.prefix[p.k].quantifier == Quantifier::Exists)
        ++p.k;
    const std::size_t dirs = ks.num_directions();
    std::size_t univ = 1;
    for (std::size_t i = 0; i < p.k; ++i) {
        p.letters *= static_cast<std::uint32_t>(dirs);
        if (p.letters > 4096)
            throw ResourceError("too many joint existential directions");
    }
    for (std::size_t i = p.k; i < p.n; ++i)
        univ *= dirs;

    std::map<std::pair<std::vector<StateId>, AutState>, std::uint32_t> ids;
    auto intern = [&](std::vector<StateId> s, AutState q) {
        auto [it, fresh] = ids.emplace(std::make_pair(s, q), static_cast<std::uint32_t>(p.q.size()));
        if (fresh) {
            if (p.q.size() >= automaton_state_cap)
                throw ResourceError("product automaton exceeds " + std::to_string(automaton_state_cap) + " states");
            p.states.push_back(std::move(s));
            p.q.push_back(q);
            p.color.push_back(a.color[q] + 1);
        }
        return it->second;
    };
    intern(std::vector<StateId>(p.n, ks.init()), a.initial);
    for (std::uint32_t x = 0; x < p.q.size(); ++x) {
        const std::vector<StateId> s = p.states[x];
        const AutState q2 = a.step(p.q[x], g.letter(s));
        std::vector<std::vector<std::uint32_t>> out(p.letters);
        for (std::uint32_t e = 0; e < p.letters; ++e) {
            std::vector<StateId> t = s;
            std::uint32_t rest = e;
            for (std::size_t i = 0; i < p.k; ++i) {
                t[i] = ks.step(s[i], rest % dirs);
                rest /= static_cast<std::uint32_t>(dirs);
            }
            std::set<std::uint32_t> targets;
            for (std::size_t u = 0; u < univ; ++u) {
                std::size_t r = u;
                for (std::size_t i = p.k; i < p.n; ++i) {
                    t[i] = ks.step(s[i], static_cast<DirId>(r % dirs));
                    r /= dirs;
                }
                targets.insert(intern(t, q2));
            }
            out[e].assign(targets.begin(), targets.end());
        }
        p.succ.push_back(std::move(out));
    }
    return p;
}

// Büchi automaton for the parity condition: a guess of the even colour e
// that is the minimum seen infinitely often, after which colours below e
// are forbidden and e must recur.
Nba to_buchi(const Product& p)
{
    std::set<unsigned> evens;
    for (unsigned c : p.color)
        if (c % 2 == 0)
            evens.insert(c);
    std::vector<unsigned> modes(evens.begin(), evens.end());
    const std::size_t m = modes.size() + 1;
    const std::size_t size = p.q.size() * m;
    auto id = [&](std::uint32_t x, std::size_t mode) { return static_cast<std::uint32_t>(x * m + mode); };
    auto allowed = [&](std::uint32_t x, std::size_t mode) { return mode == 0 || p.color[x] >= modes[mode - 1]; };

    // prune states that cannot reach an accepting cycle
    detail::Adjacency adj(size);
    std::vector<char> alive(size, 0);
    for (std::uint32_t x = 0; x < p.q.size(); ++x)
        for (std::size_t mode = 0; mode < m; ++mode) {
            if (!allowed(x, mode))
                continue;
            alive[id(x, mode)] = 1;
            std::set<std::uint32_t> ts;
            for (const auto& targets : p.succ[x])
                for (auto y : targets) {
                    if (mode == 0)
                        for (std::size_t m2 = 0; m2 < m; ++m2)
                            if (allowed(y, m2))
                                ts.insert(id(y, m2));
                    if (mode != 0 && allowed(y, mode))
                        ts.insert(id(y, mode));
                }
            adj[id(x, mode)].assign(ts.begin(), ts.end());
        }
    auto accepting = [&](std::uint32_t v) {
        std::size_t mode = v % m;
        return mode != 0 && p.color[v / m] == modes[mode - 1];
    };
    auto scc = detail::tarjan(adj, &alive);
    std::vector<std::uint32_t> good;
    for (std::uint32_t v = 0; v < size; ++v)
        if (alive[v] != 0 && accepting(v) && scc.cyclic[scc.component[v]] != 0)
            good.push_back(v);
    // states reaching a good state
    detail::Adjacency rev(size);
    for (std::uint32_t v = 0; v < size; ++v)
        for (auto w : adj[v])
            rev[w].push_back(v);
    auto useful = detail::reachable(rev, good);

    Nba out;
    out.letters = p.letters;
    std::vector<std::int64_t> renum(size, -1);
    auto state = [&](std::uint32_t v) {
        if (renum[v] < 0)
            renum[v] = out.add_state(accepting(v));
        return static_cast<AutState>(renum[v]);
    };
    if (useful[id(0, 0)] == 0) {
        // empty language: a single rejecting sink
        auto s = out.add_state(false);
        for (std::uint32_t e = 0; e < out.letters; ++e)
            out.trans[s][e] = {s};
        out.initial = {s};
        return out;
    }
    out.initial = {state(id(0, 0))};
    // breadth-first over useful states so ids are deterministic
    std::vector<std::uint32_t> order{id(0, 0)};
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::uint32_t v = order[i];
        const std::uint32_t x = v / static_cast<std::uint32_t>(m);
        const std::size_t mode = v % m;
        const AutState from = state(v);
        for (std::uint32_t e = 0; e < p.letters; ++e) {
            std::set<AutState> ts;
            for (auto y : p.succ[x][e])
                for (std::size_t m2 = 0; m2 < m; ++m2) {
                    if ((mode != 0 && m2 != mode) || !allowed(y, m2) || useful[id(y, m2)] == 0)
                        continue;
                    const std::uint32_t w = id(y, m2);
                    bool fresh = renum[w] < 0;
                    ts.insert(state(w));
                    if (fresh)
                        order.push_back(w);
                }
            out.trans[from][e].assign(ts.begin(), ts.end());
        }
    }
    return out;
}

StrategyProfile path_profile(const MpgGame& g, std::size_t k, const UpWord& word)
{
    const std::size_t dirs = g.num_directions();
    const auto len = static_cast<std::uint32_t>(word.length());
    StrategyProfile sp;
    for (PlayerId p = 1; p <= k; ++p) {
        PlayerStrategy ps;
        ps.player = p;
        ps.memory_size = len;
        for (std::uint32_t m = 0; m < len; ++m) {
            std::uint64_t e = word.at(m);
            for (PlayerId i = 1; i < p; ++i)
                e /= dirs;
            const auto d = static_cast<DirId>(e % dirs);
            const std::uint32_t next = m + 1 < len ? m + 1 : static_cast<std::uint32_t>(word.stem.size());
            for (std::uint32_t o = 0; o < g.num_obs(p); ++o) {
                const ObsClass& c = g.obs_class(p, o);
                if (c.turn != p)
                    continue;
                StrategyEntry row;
                row.memory = m;
                for (auto s : c.states)
                    row.obs.push_back(g.ks().state_names()[s]);
                row.obs_q = c.q;
                row.direction = g.ks().directions()[d];
                row.next = next;
                ps.entries.push_back(std::move(row));
            }
        }
        sp.players.push_back(std::move(ps));
    }
    return sp;
}

} // namespace

Verdict solve_exists_forall(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a)
{
    if (!f.is_exists_forall())
        throw ValidationError("exists-forall solver needs a prefix exists* forall*; got '" + to_string(f) + "'");
    auto g = build_mpg(ks, f, a);
    auto product = build_product(g);
    // L(bad) = existential direction words against which some universal
    // choice violates the body
    Dpa bad = determinize_nba_to_dpa(to_buchi(product));
    auto good_word = dpa_accepted_word(complement_dpa(bad));

    Verdict v;
    v.guarantee = Guarantee::semantic;
    v.method = "exists-forall";
    if (!good_word) {
        v.outcome = Outcome::disproven;
        v.note = "every choice of existential paths is refuted by some universal choice";
        return v;
    }
    v.outcome = Outcome::proven;
    auto sp = path_profile(g, product.k, *good_word);
    stamp_profile(sp, g, f, ProphecyFamily{});
    auto check = check_profile(g, sp);
    if (!check.passed())
        throw Error("internal: exists-forall witness fails the certificate check: " + check.diagnostic);
    v.profile = std::move(sp);
    v.note = "witness paths of length " + std::to_string(good_word->stem.size()) + "+" +
             std::to_string(good_word->loop.size());
    return v;
}

} // namespace hypergame
