#include "hypergame/automata.hpp"

#include "detail/dpa_internal.hpp"
#include "hypergame/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace hypergame
{

namespace
{

// Safra tree in brace notation: every NBA state of the label sits in its
// innermost brace; braces[b] is the parent brace or -1, and parents always
// precede their children.
struct SafraTree
{
    std::vector<std::pair<AutState, std::uint32_t>> nodes; // sorted by state
    std::vector<std::int32_t> braces;

    friend bool operator==(const SafraTree&, const SafraTree&) = default;
};

struct SafraHash
{
    std::size_t operator()(const SafraTree& t) const
    {
        std::size_t h = 1469598103934665603ULL;
        auto mix = [&](std::uint64_t x) { h = (h ^ x) * 1099511628211ULL; };
        for (const auto& [s, b] : t.nodes) {
            mix(s);
            mix(b);
        }
        for (auto p : t.braces)
            mix(static_cast<std::uint64_t>(p + 1) << 32);
        return h;
    }
};

class Determinizer
{
public:
    explicit Determinizer(const Nba& n) : n_(n)
    {
        // A removed brace b emits 2b+1 and a brace whose states all moved to
        // descendants emits 2b+2, so removal beats acceptance at equal index.
        // Surviving braces always own a state and fresh ones are bounded by
        // the number of accepting sources, which bounds every event colour.
        none_color_ = static_cast<unsigned>(4 * n.size() + 5);
        best_.assign(n.size(), -1);
    }

    std::pair<SafraTree, unsigned> successor(const SafraTree& tree, std::uint32_t letter)
    {
        parent_.assign(tree.braces.begin(), tree.braces.end());
        patterns_.clear();
        touched_.clear();
        for (const auto& [s, b] : tree.nodes) {
            std::uint32_t target = b;
            if (n_.accepting[s] != 0) {
                target = static_cast<std::uint32_t>(parent_.size());
                parent_.push_back(static_cast<std::int32_t>(b));
            }
            for (AutState t : n_.trans[s][letter])
                offer(t, target);
        }

        const std::size_t nb = parent_.size();
        std::vector<std::uint32_t> direct(nb, 0);
        for (auto t : touched_)
            ++direct[static_cast<std::size_t>(best_[t])];
        std::vector<char> nonempty(nb, 0);
        for (std::size_t b = nb; b-- > 0;) {
            if (direct[b] > 0)
                nonempty[b] = 1;
            if (nonempty[b] != 0 && parent_[b] >= 0)
                nonempty[static_cast<std::size_t>(parent_[b])] = 1;
        }

        enum class Status : char
        {
            alive,
            green,
            absorbed,
            red
        };
        std::vector<Status> status(nb, Status::alive);
        std::vector<std::uint32_t> owner(nb, 0);
        unsigned color = none_color_;
        for (std::size_t b = 0; b < nb; ++b) {
            owner[b] = static_cast<std::uint32_t>(b);
            const std::int32_t p = parent_[b];
            if (p >= 0) {
                Status ps = status[static_cast<std::size_t>(p)];
                if (ps == Status::red) {
                    status[b] = Status::red;
                    continue;
                }
                if (ps == Status::green || ps == Status::absorbed) {
                    status[b] = Status::absorbed;
                    owner[b] = owner[static_cast<std::size_t>(p)];
                    continue;
                }
            }
            if (nonempty[b] == 0) {
                status[b] = Status::red;
                color = std::min(color, static_cast<unsigned>(2 * b + 1));
            } else if (direct[b] == 0) {
                status[b] = Status::green;
                color = std::min(color, static_cast<unsigned>(2 * b + 2));
            }
        }

        std::vector<std::int32_t> renamed(nb, -1);
        SafraTree out;
        for (std::size_t b = 0; b < nb; ++b) {
            if (status[b] != Status::alive && status[b] != Status::green)
                continue;
            renamed[b] = static_cast<std::int32_t>(out.braces.size());
            out.braces.push_back(parent_[b] < 0 ? -1 : renamed[static_cast<std::size_t>(parent_[b])]);
        }
        for (auto t : touched_) {
            auto b = static_cast<std::size_t>(best_[t]);
            out.nodes.emplace_back(t, static_cast<std::uint32_t>(renamed[owner[b]]));
            best_[t] = -1;
        }
        std::sort(out.nodes.begin(), out.nodes.end());
        return {std::move(out), color};
    }

    [[nodiscard]] unsigned none_color() const { return none_color_; }

private:
    const std::vector<std::int32_t>& pattern(std::uint32_t b)
    {
        auto it = patterns_.find(b);
        if (it != patterns_.end())
            return it->second;
        std::vector<std::int32_t> p;
        for (auto x = static_cast<std::int32_t>(b); x >= 0; x = parent_[static_cast<std::size_t>(x)])
            p.push_back(x);
        std::reverse(p.begin(), p.end());
        return patterns_.emplace(b, std::move(p)).first->second;
    }

    // At the first difference the older brace wins; if one path extends the
    // other, the deeper brace wins.
    bool better(std::uint32_t a, std::uint32_t b)
    {
        const auto& pa = pattern(a);
        const auto& pb = pattern(b);
        std::size_t m = std::min(pa.size(), pb.size());
        for (std::size_t i = 0; i < m; ++i)
            if (pa[i] != pb[i])
                return pa[i] < pb[i];
        return pa.size() > pb.size();
    }

    void offer(AutState t, std::uint32_t brace)
    {
        if (best_[t] < 0) {
            best_[t] = static_cast<std::int64_t>(brace);
            touched_.push_back(t);
        } else if (better(brace, static_cast<std::uint32_t>(best_[t]))) {
            best_[t] = static_cast<std::int64_t>(brace);
        }
    }

    const Nba& n_;
    unsigned none_color_;
    std::vector<std::int32_t> parent_;
    std::unordered_map<std::uint32_t, std::vector<std::int32_t>> patterns_;
    std::vector<std::int64_t> best_;
    std::vector<AutState> touched_;
};

} // namespace

namespace detail
{

EdgeDpa determinize_edges(const Nba& n)
{
    Determinizer det(n);
    EdgeDpa out;
    out.letters = n.letters;
    std::unordered_map<SafraTree, AutState, SafraHash> ids;
    std::vector<SafraTree> queue;
    auto id_of = [&](SafraTree t) {
        auto it = ids.find(t);
        if (it != ids.end())
            return it->second;
        if (queue.size() >= automaton_state_cap)
            throw ResourceError("determinization exceeds " + std::to_string(automaton_state_cap) + " states");
        auto id = static_cast<AutState>(queue.size());
        ids.emplace(t, id);
        queue.push_back(std::move(t));
        return id;
    };

    SafraTree init;
    if (!n.initial.empty()) {
        init.braces.push_back(-1);
        for (auto s : n.initial)
            init.nodes.emplace_back(s, 0);
        std::sort(init.nodes.begin(), init.nodes.end());
        init.nodes.erase(std::unique(init.nodes.begin(), init.nodes.end()), init.nodes.end());
    }
    out.initial = id_of(std::move(init));
    for (std::size_t head = 0; head < queue.size(); ++head) {
        std::vector<AutState> row(n.letters);
        std::vector<unsigned> colors(n.letters);
        for (std::uint32_t l = 0; l < n.letters; ++l) {
            auto [succ, color] = det.successor(queue[head], l);
            row[l] = id_of(std::move(succ));
            colors[l] = color;
        }
        out.delta.push_back(std::move(row));
        out.color.push_back(std::move(colors));
    }
    return out;
}

} // namespace detail

Dpa determinize_nba_to_dpa(const Nba& n)
{
    auto edges = detail::determinize_edges(n);
    Dpa out = detail::to_state_based(detail::minimize_edges(detail::compress_edges(edges)));
    out.aps = n.aps;
    return simplify_dpa(out);
}

Dpa ltl_to_dpa(const FormulaPtr& body, const std::vector<IndexedAp>& alphabet)
{
    return determinize_nba_to_dpa(ltl_to_nba(body, alphabet));
}

} // namespace hypergame
