#include "hypergame/automata.hpp"

#include "detail/graph.hpp"
#include "hypergame/error.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace hypergame
{

namespace
{

struct Node
{
    Op op;
    int lhs = -1;
    int rhs = -1;
    int bit = -1;  // atoms
    int goal = -1; // index of the eventuality for Until/Eventually
};

// One disjunct of the expansion of a set of obligations: literals required
// now, obligations for the next position, eventualities postponed.
struct Term
{
    Letter pos = 0;
    Letter neg = 0;
    std::vector<int> next;
    std::uint64_t pending = 0;

    friend auto operator<=>(const Term&, const Term&) = default;
};

bool weaker(const Term& a, const Term& b)
{
    return (a.pos & ~b.pos) == 0 && (a.neg & ~b.neg) == 0 && (a.pending & ~b.pending) == 0 &&
           std::includes(b.next.begin(), b.next.end(), a.next.begin(), a.next.end());
}

std::vector<Term> normalize(std::vector<Term> ts)
{
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<Term> out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < ts.size() && !redundant; ++j)
            redundant = j != i && weaker(ts[j], ts[i]) && (ts[j] != ts[i]);
        if (!redundant)
            out.push_back(ts[i]);
    }
    return out;
}

std::vector<Term> product(const std::vector<Term>& a, const std::vector<Term>& b)
{
    std::vector<Term> out;
    for (const auto& x : a)
        for (const auto& y : b) {
            Term t;
            t.pos = x.pos | y.pos;
            t.neg = x.neg | y.neg;
            if ((t.pos & t.neg) != 0)
                continue;
            std::set_union(x.next.begin(), x.next.end(), y.next.begin(), y.next.end(), std::back_inserter(t.next));
            t.pending = x.pending | y.pending;
            out.push_back(std::move(t));
        }
    return normalize(std::move(out));
}

class Tableau
{
public:
    explicit Tableau(const std::vector<IndexedAp>& alphabet) : alphabet_(alphabet) {}

    int intern(const FormulaPtr& f)
    {
        Node n{f->op};
        std::string key;
        switch (f->op) {
        case Op::Atom: {
            auto it = std::find(alphabet_.begin(), alphabet_.end(), IndexedAp{f->ap, f->var});
            if (it == alphabet_.end())
                throw ValidationError("atom " + to_string(f) + " is not in the automaton alphabet");
            n.bit = static_cast<int>(it - alphabet_.begin());
            key = "a" + std::to_string(n.bit);
            break;
        }
        case Op::True: key = "t"; break;
        case Op::False: key = "f"; break;
        case Op::Implies:
        case Op::Iff: throw Error("tableau expects negation normal form");
        default:
            n.lhs = intern(f->lhs);
            if (f->rhs)
                n.rhs = intern(f->rhs);
            key = std::to_string(static_cast<int>(f->op)) + ":" + std::to_string(n.lhs) + ":" + std::to_string(n.rhs);
            break;
        }
        if (f->op == Op::Not && nodes_[static_cast<std::size_t>(n.lhs)].op != Op::Atom)
            throw Error("tableau expects negation normal form");
        auto [it, fresh] = ids_.emplace(key, static_cast<int>(nodes_.size()));
        if (fresh) {
            if (f->op == Op::Until || f->op == Op::Eventually) {
                n.goal = goals_++;
                if (goals_ > 64)
                    throw ResourceError("too many eventualities in formula");
            }
            nodes_.push_back(n);
        }
        return it->second;
    }

    [[nodiscard]] int goals() const { return goals_; }

    const std::vector<Term>& expand(int id)
    {
        auto found = memo_.find(id);
        if (found != memo_.end())
            return found->second;
        const Node n = nodes_[static_cast<std::size_t>(id)];
        std::vector<Term> out;
        auto defer = [&](int target, std::uint64_t pending) {
            Term t;
            t.next = {target};
            t.pending = pending;
            return std::vector<Term>{t};
        };
        switch (n.op) {
        case Op::True: out = {Term{}}; break;
        case Op::False: break;
        case Op::Atom: out = {Term{Letter{1} << n.bit, 0, {}, 0}}; break;
        case Op::Not: out = {Term{0, Letter{1} << nodes_[static_cast<std::size_t>(n.lhs)].bit, {}, 0}}; break;
        case Op::And: out = product(expand(n.lhs), expand(n.rhs)); break;
        case Op::Or: {
            out = expand(n.lhs);
            const auto& r = expand(n.rhs);
            out.insert(out.end(), r.begin(), r.end());
            out = normalize(std::move(out));
            break;
        }
        case Op::Next: {
            Op inner = nodes_[static_cast<std::size_t>(n.lhs)].op;
            if (inner == Op::True)
                out = {Term{}};
            else if (inner != Op::False)
                out = defer(n.lhs, 0);
            break;
        }
        case Op::Until: {
            out = expand(n.rhs);
            auto wait = product(expand(n.lhs), defer(id, std::uint64_t{1} << n.goal));
            out.insert(out.end(), wait.begin(), wait.end());
            out = normalize(std::move(out));
            break;
        }
        case Op::Eventually: {
            out = expand(n.lhs);
            auto wait = defer(id, std::uint64_t{1} << n.goal);
            out.insert(out.end(), wait.begin(), wait.end());
            out = normalize(std::move(out));
            break;
        }
        case Op::Release: {
            const auto& now = expand(n.rhs);
            out = product(now, expand(n.lhs));
            auto wait = product(now, defer(id, 0));
            out.insert(out.end(), wait.begin(), wait.end());
            out = normalize(std::move(out));
            break;
        }
        case Op::Globally: out = product(expand(n.lhs), defer(id, 0)); break;
        default: throw Error("tableau expects negation normal form");
        }
        return memo_.emplace(id, std::move(out)).first->second;
    }

    std::vector<Term> expand_set(const std::vector<int>& obligations)
    {
        std::vector<Term> out{Term{}};
        for (int f : obligations)
            out = product(out, expand(f));
        return out;
    }

    [[nodiscard]] bool is_true(int id) const { return nodes_[static_cast<std::size_t>(id)].op == Op::True; }

private:
    const std::vector<IndexedAp>& alphabet_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, int> ids_;
    std::unordered_map<int, std::vector<Term>> memo_;
    int goals_ = 0;
};

// Removes states that cannot reach an accepting cycle and renumbers.
Nba prune(const Nba& n)
{
    detail::Adjacency succ(n.size());
    for (std::size_t s = 0; s < n.size(); ++s) {
        for (const auto& ts : n.trans[s])
            succ[s].insert(succ[s].end(), ts.begin(), ts.end());
        std::sort(succ[s].begin(), succ[s].end());
        succ[s].erase(std::unique(succ[s].begin(), succ[s].end()), succ[s].end());
    }
    auto sccs = detail::tarjan(succ);
    std::vector<char> good_comp(sccs.count, 0);
    for (std::size_t s = 0; s < n.size(); ++s)
        if (n.accepting[s] != 0 && sccs.cyclic[sccs.component[s]] != 0)
            good_comp[sccs.component[s]] = 1;
    // components are in reverse topological order: successors come first
    std::vector<std::vector<std::uint32_t>> members(sccs.count);
    for (std::uint32_t s = 0; s < n.size(); ++s)
        members[sccs.component[s]].push_back(s);
    std::vector<char> live_comp(sccs.count, 0);
    for (std::uint32_t c = 0; c < sccs.count; ++c) {
        bool live = good_comp[c] != 0;
        for (auto s : members[c])
            for (auto t : succ[s])
                live = live || live_comp[sccs.component[t]] != 0;
        live_comp[c] = live ? 1 : 0;
    }
    std::vector<char> alive(n.size(), 0);
    for (std::size_t s = 0; s < n.size(); ++s)
        alive[s] = live_comp[sccs.component[s]];
    std::vector<AutState> init_alive;
    for (auto s : n.initial)
        if (alive[s] != 0)
            init_alive.push_back(s);
    auto reach = detail::reachable(succ, init_alive);

    Nba out;
    out.aps = n.aps;
    out.letters = n.letters;
    std::vector<AutState> id(n.size(), 0);
    for (std::size_t s = 0; s < n.size(); ++s)
        if (alive[s] != 0 && reach[s] != 0)
            id[s] = out.add_state(n.accepting[s] != 0);
    for (std::size_t s = 0; s < n.size(); ++s) {
        if (alive[s] == 0 || reach[s] == 0)
            continue;
        for (std::uint32_t l = 0; l < n.letters; ++l)
            for (auto t : n.trans[s][l])
                if (alive[t] != 0)
                    out.trans[id[s]][l].push_back(id[t]);
    }
    for (auto s : init_alive)
        out.initial.push_back(id[s]);
    return out;
}

} // namespace

AutState Nba::add_state(bool acc)
{
    if (trans.size() >= automaton_state_cap)
        throw ResourceError("automaton exceeds " + std::to_string(automaton_state_cap) + " states");
    trans.emplace_back(letters);
    accepting.push_back(acc ? 1 : 0);
    return static_cast<AutState>(trans.size() - 1);
}

Nba ltl_to_nba(const FormulaPtr& body, const std::vector<IndexedAp>& alphabet)
{
    if (alphabet.size() > 16)
        throw ValidationError("alphabets beyond 16 propositions are not supported");
    Tableau tab(alphabet);
    const int root = tab.intern(nnf(body));
    const auto goals = static_cast<unsigned>(tab.goals());
    const std::uint64_t all_goals = goals == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << goals) - 1;

    Nba n;
    n.aps = alphabet;
    n.letters = std::uint32_t{1} << alphabet.size();

    // NBA state = (obligation set, level). Level `goals` marks the moment the
    // last eventuality of a round has been fulfilled; it is the accepting level.
    std::map<std::pair<std::vector<int>, unsigned>, AutState> ids;
    std::vector<std::pair<std::vector<int>, unsigned>> queue;
    auto state_of = [&](std::vector<int> obligations, unsigned level) {
        std::erase_if(obligations, [&](int f) { return tab.is_true(f); });
        auto key = std::make_pair(std::move(obligations), level);
        auto it = ids.find(key);
        if (it != ids.end())
            return it->second;
        AutState s = n.add_state(level == goals);
        ids.emplace(key, s);
        queue.push_back(std::move(key));
        return s;
    };
    n.initial.push_back(state_of({root}, 0));

    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [obligations, level] = queue[head];
        const auto src = static_cast<AutState>(head);
        const unsigned start = level == goals ? 0 : level;
        for (const Term& t : tab.expand_set(obligations)) {
            const std::uint64_t done = all_goals & ~t.pending;
            unsigned lv = start;
            while (lv < goals && ((done >> lv) & 1U) != 0)
                ++lv;
            AutState dst = state_of(t.next, lv);
            for (std::uint32_t l = 0; l < n.letters; ++l)
                if ((l & t.pos) == t.pos && (l & t.neg) == 0)
                    n.trans[src][l].push_back(dst);
        }
    }
    for (auto& row : n.trans)
        for (auto& ts : row) {
            std::sort(ts.begin(), ts.end());
            ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        }
    return prune(n);
}

bool nba_lasso_accepts(const Nba& n, const UpWord& word)
{
    if (word.loop.empty())
        throw ValidationError("word has an empty loop");
    const std::size_t len = word.stem.size() + word.loop.size();
    for (std::size_t i = 0; i < len; ++i)
        if (word.at(i) >= n.letters)
            throw ValidationError("letter outside the automaton alphabet");
    // product node = state * len + position
    const std::size_t total = n.size() * len;
    detail::Adjacency succ(total);
    for (std::size_t s = 0; s < n.size(); ++s)
        for (std::size_t i = 0; i < len; ++i) {
            std::size_t j = i + 1 < len ? i + 1 : word.stem.size();
            for (auto t : n.trans[s][word.at(i)])
                succ[s * len + i].push_back(static_cast<std::uint32_t>(t * len + j));
        }
    std::vector<std::uint32_t> init;
    for (auto s : n.initial)
        init.push_back(static_cast<std::uint32_t>(s * len));
    auto reach = detail::reachable(succ, init);
    auto sccs = detail::tarjan(succ, &reach);
    for (std::size_t v = 0; v < total; ++v)
        if (reach[v] != 0 && n.accepting[v / len] != 0 && sccs.cyclic[sccs.component[v]] != 0)
            return true;
    return false;
}

} // namespace hypergame
