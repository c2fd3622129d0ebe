#include "hypergame/solver.hpp"

#include <algorithm>
#include <limits>

namespace hypergame
{

namespace
{

class Zielonka
{
public:
    Zielonka(const Arena& a, const std::vector<char>& even_owned) : a_(a), even_(even_owned)
    {
        const std::size_t n = a.size();
        pred_start_.assign(n + 1, 0);
        for (VertexId w : a.succ)
            ++pred_start_[w + 1];
        for (std::size_t v = 0; v < n; ++v)
            pred_start_[v + 1] += pred_start_[v];
        pred_.resize(a.succ.size());
        std::vector<std::uint32_t> fill(pred_start_.begin(), pred_start_.end() - 1);
        for (VertexId v = 0; v < n; ++v)
            for (DirId d = 0; d < a.directions; ++d)
                pred_[fill[a.next(v, d)]++] = v;
        depth_.assign(n, 0);
        count_.assign(n, 0);
        in_attr_.assign(n, 0);
        result_.even_wins.assign(n, 0);
        result_.strategy.assign(n, 0);
    }

    ParitySolution run()
    {
        std::vector<VertexId> all(a_.size());
        for (VertexId v = 0; v < all.size(); ++v)
            all[v] = v;
        std::vector<VertexId> w[2];
        solve(all, 0, w);
        for (VertexId v : w[0])
            result_.even_wins[v] = 1;
        return std::move(result_);
    }

private:
    [[nodiscard]] int player(VertexId v) const { return even_[v] != 0 ? 0 : 1; }

    // Attractor for player p towards target inside the set at depth k.
    // Records attractor moves in the strategy.
    std::vector<VertexId> attractor(int p, const std::vector<VertexId>& target, std::uint32_t k)
    {
        std::vector<VertexId> out;
        for (VertexId v : target)
            if (in_attr_[v] == 0) {
                in_attr_[v] = 1;
                out.push_back(v);
            }
        std::vector<VertexId> touched;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const VertexId w = out[i];
            for (auto j = pred_start_[w]; j < pred_start_[w + 1]; ++j) {
                const VertexId v = pred_[j];
                if (depth_[v] < k || in_attr_[v] != 0)
                    continue;
                if (player(v) == p) {
                    in_attr_[v] = 1;
                    out.push_back(v);
                    for (DirId d = 0; d < a_.directions; ++d)
                        if (a_.next(v, d) == w) {
                            result_.strategy[v] = d;
                            break;
                        }
                    continue;
                }
                if (count_[v] == 0) {
                    for (DirId d = 0; d < a_.directions; ++d)
                        if (depth_[a_.next(v, d)] >= k)
                            ++count_[v];
                    touched.push_back(v);
                }
                // one predecessor entry per edge, so this counts edges into w
                if (--count_[v] == 0) {
                    in_attr_[v] = 1;
                    out.push_back(v);
                }
            }
        }
        for (VertexId v : touched)
            count_[v] = 0;
        for (VertexId v : out)
            in_attr_[v] = 0;
        return out;
    }

    // Solves the subgame of vertices at depth >= k (exactly `u`).
    void solve(const std::vector<VertexId>& u, std::uint32_t k, std::vector<VertexId> (&w)[2])
    {
        w[0].clear();
        w[1].clear();
        if (u.empty())
            return;
        unsigned c = std::numeric_limits<unsigned>::max();
        for (VertexId v : u)
            c = std::min(c, a_.color[v]);
        const int alpha = static_cast<int>(c % 2);
        std::vector<VertexId> top;
        for (VertexId v : u)
            if (a_.color[v] == c)
                top.push_back(v);
        // player alpha, when at a top vertex, may stay anywhere in u
        for (VertexId v : top)
            if (player(v) == alpha)
                for (DirId d = 0; d < a_.directions; ++d)
                    if (depth_[a_.next(v, d)] >= k) {
                        result_.strategy[v] = d;
                        break;
                    }
        auto attr = attractor(alpha, top, k);

        std::vector<VertexId> sub;
        mark_rest(u, attr, k, sub);
        std::vector<VertexId> w1[2];
        solve(sub, k + 1, w1);
        for (VertexId v : sub)
            depth_[v] = k;

        if (w1[1 - alpha].empty()) {
            w[alpha] = u;
            return;
        }
        auto battr = attractor(1 - alpha, w1[1 - alpha], k);
        std::vector<VertexId> rest;
        mark_rest(u, battr, k, rest);
        std::vector<VertexId> w2[2];
        solve(rest, k + 1, w2);
        for (VertexId v : rest)
            depth_[v] = k;
        w[alpha] = std::move(w2[alpha]);
        w[1 - alpha] = std::move(w2[1 - alpha]);
        w[1 - alpha].insert(w[1 - alpha].end(), battr.begin(), battr.end());
    }

    // rest := u minus removed, moved to depth k + 1
    void mark_rest(const std::vector<VertexId>& u,
                   const std::vector<VertexId>& removed,
                   std::uint32_t k,
                   std::vector<VertexId>& rest)
    {
        for (VertexId v : removed)
            in_attr_[v] = 1;
        for (VertexId v : u)
            if (in_attr_[v] == 0) {
                rest.push_back(v);
                depth_[v] = k + 1;
            }
        for (VertexId v : removed)
            in_attr_[v] = 0;
    }

    const Arena& a_;
    const std::vector<char>& even_;
    std::vector<std::uint32_t> pred_start_;
    std::vector<VertexId> pred_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::uint32_t> count_;
    std::vector<char> in_attr_;
    ParitySolution result_;
};

} // namespace

ParitySolution solve_zielonka(const Arena& arena, const std::vector<char>& even_owned)
{
    return Zielonka(arena, even_owned).run();
}

ParitySolution solve_zielonka(const TwoPlayerGame& g)
{
    std::vector<char> even(g.size());
    for (VertexId v = 0; v < g.size(); ++v)
        even[v] = g.arena().owner[v] == TwoPlayerGame::verifier ? 1 : 0;
    return solve_zielonka(g.arena(), even);
}

ParitySolution solve_zielonka(const MpgGame& g)
{
    std::vector<char> even(g.size());
    for (VertexId v = 0; v < g.size(); ++v)
        even[v] = g.in_coalition(g.owner(v)) ? 1 : 0;
    return solve_zielonka(g.arena(), even);
}

} // namespace hypergame
