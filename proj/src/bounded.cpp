#include "hypergame/solver.hpp"

#include "hypergame/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

namespace hypergame
{

namespace
{

constexpr std::size_t product_cap = 20000000;
// successor slots of the relaxed product; above this the search runs with the
// plain relaxation only
constexpr std::size_t relaxation_cap = 64000000;

// Coalition players with the most informed one last. Memory digits of the
// search follow this order, least significant first.
std::vector<PlayerId> search_order(const MpgGame& g)
{
    const auto& order = is_hierarchical(g).order;
    std::vector<PlayerId> out;
    for (PlayerId p : order)
        if (g.in_coalition(p))
            out.push_back(p);
    return out;
}

// Perfect-information relaxation of the game with the memories of all
// coalition players but the last. Those players move by their fixed table
// cells where fixed and freely (direction and next memory) elsewhere; the
// last coalition player moves freely with full information. Losing it
// refutes the fixed cells for every memory of the last player.
class Relaxation
{
public:
    Relaxation(const MpgGame& g, const std::vector<PlayerId>& players, std::uint32_t k) : g_(g), k_(k)
    {
        lower_.assign(players.begin(), players.end() - 1);
        index_of_.assign(g.num_players() + 1, -1);
        for (std::size_t i = 0; i < lower_.size(); ++i) {
            index_of_[lower_[i]] = static_cast<int>(i);
            radix_.push_back(combos_);
            combos_ *= k;
        }
        dirs_ = static_cast<std::uint32_t>(g.num_directions());
        slots_ = lower_.empty() ? dirs_ : dirs_ * k;
        const std::size_t n = g.size() * combos_;
        arena_.directions = slots_;
        arena_.initial = static_cast<VertexId>(std::size_t{g.initial()} * combos_);
        arena_.succ.resize(n * slots_);
        arena_.color.resize(n);
        arena_.owner.resize(n);
        even_.resize(n);
        for (std::size_t x = 0; x < n; ++x) {
            const auto v = static_cast<VertexId>(x / combos_);
            arena_.color[x] = g.color(v);
            arena_.owner[x] = g.owner(v);
            even_[x] = g.in_coalition(g.owner(v)) ? 1 : 0;
            for (std::uint32_t s = 0; s < slots_; ++s)
                arena_.succ[x * slots_ + s] = target(static_cast<std::uint32_t>(x), s);
        }
        // nodes of every cell of the lower players
        for (std::size_t i = 0; i < lower_.size(); ++i) {
            const PlayerId p = lower_[i];
            const std::size_t cells = std::size_t{k} * g.num_obs(p);
            std::vector<std::uint32_t> start(cells + 1, 0);
            std::vector<std::uint32_t> of(n, 0);
            for (std::size_t x = 0; x < n; ++x)
                if (arena_.owner[x] == p) {
                    of[x] = static_cast<std::uint32_t>(cell_of(static_cast<std::uint32_t>(x), i));
                    ++start[of[x] + 1];
                }
            for (std::size_t c = 0; c < cells; ++c)
                start[c + 1] += start[c];
            std::vector<std::uint32_t> nodes(start.back());
            std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
            for (std::size_t x = 0; x < n; ++x)
                if (arena_.owner[x] == p)
                    nodes[fill[of[x]]++] = static_cast<std::uint32_t>(x);
            cell_start_.push_back(std::move(start));
            cell_nodes_.push_back(std::move(nodes));
            fixed_.emplace_back(cells, -1);
        }
    }

    static bool fits(const MpgGame& g, const std::vector<PlayerId>& players, std::uint32_t k)
    {
        double n = static_cast<double>(g.size()) * static_cast<double>(g.num_directions());
        for (std::size_t i = 0; i + 1 < players.size(); ++i)
            n *= k;
        if (players.size() > 1)
            n *= k;
        return n <= static_cast<double>(relaxation_cap);
    }

    [[nodiscard]] std::size_t lower_count() const { return lower_.size(); }
    [[nodiscard]] std::size_t lower_combos() const { return combos_; }
    [[nodiscard]] const std::vector<std::int64_t>& fixed(std::size_t i) const { return fixed_[i]; }

    // value = dir * k + next
    void fix(std::size_t i, std::size_t cell, std::int64_t value)
    {
        fixed_[i][cell] = value;
        const auto s = static_cast<std::uint32_t>(value);
        for (auto j = cell_start_[i][cell]; j < cell_start_[i][cell + 1]; ++j) {
            const std::uint32_t x = cell_nodes_[i][j];
            const VertexId w = target(x, s);
            for (std::uint32_t t = 0; t < slots_; ++t)
                arena_.succ[std::size_t{x} * slots_ + t] = w;
        }
    }

    void unfix(std::size_t i, std::size_t cell)
    {
        fixed_[i][cell] = -1;
        for (auto j = cell_start_[i][cell]; j < cell_start_[i][cell + 1]; ++j) {
            const std::uint32_t x = cell_nodes_[i][j];
            for (std::uint32_t t = 0; t < slots_; ++t)
                arena_.succ[std::size_t{x} * slots_ + t] = target(x, t);
        }
    }

    void solve() { sol_ = solve_zielonka(arena_, even_); }
    [[nodiscard]] bool won() const { return sol_.even_wins[arena_.initial] != 0; }

    // index of a search product code whose lower digits come first
    [[nodiscard]] std::size_t node(VertexId v, std::uint64_t mem) const
    {
        return std::size_t{v} * combos_ + static_cast<std::size_t>(mem % combos_);
    }
    [[nodiscard]] bool wins(std::size_t x) const { return sol_.even_wins[x] != 0; }
    // direction of the relaxation's winning move at x
    [[nodiscard]] DirId hint(std::size_t x) const
    {
        const std::uint32_t s = sol_.strategy[x];
        return index_of_[arena_.owner[x]] >= 0 ? s / k_ : s % dirs_;
    }

    struct Open
    {
        std::size_t player; // index among the lower players
        std::size_t cell;
        std::uint32_t node;
    };

    // First node, breadth-first under the relaxation's winning strategy,
    // whose lower-player cell is not fixed.
    std::optional<Open> open_cell() const
    {
        std::vector<char> seen(arena_.size(), 0);
        std::vector<std::uint32_t> queue{arena_.initial};
        seen[arena_.initial] = 1;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const std::uint32_t x = queue[q];
            const PlayerId p = arena_.owner[x];
            const int i = index_of_[p];
            std::uint32_t first = 0, last = slots_;
            if (i >= 0) {
                const std::size_t c = cell_of(x, static_cast<std::size_t>(i));
                if (fixed_[static_cast<std::size_t>(i)][c] < 0)
                    return Open{static_cast<std::size_t>(i), c, x};
                last = 1;
            } else if (even_[x] != 0) {
                first = sol_.strategy[x];
                last = first + 1;
            }
            for (std::uint32_t s = first; s < last; ++s) {
                const VertexId w = arena_.succ[std::size_t{x} * slots_ + s];
                if (seen[w] == 0) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        return std::nullopt;
    }

    // Values for an open cell: the relaxation's move at its node first, then
    // moves that stay in the winning region, then the rest. Next memories
    // are limited to the states already in use plus one.
    std::vector<std::int64_t> options(const Open& o) const
    {
        std::uint32_t used = static_cast<std::uint32_t>(o.cell / g_.num_obs(lower_[o.player])) + 1;
        const auto& f = fixed_[o.player];
        for (std::size_t c = 0; c < f.size(); ++c)
            if (f[c] >= 0)
                used = std::max({used,
                                 static_cast<std::uint32_t>(c / g_.num_obs(lower_[o.player])) + 1,
                                 static_cast<std::uint32_t>(f[c] % k_) + 1});
        const std::uint32_t limit = std::min(k_, used + 1);
        std::vector<std::int64_t> good, bad;
        const std::uint32_t s0 = sol_.strategy[o.node];
        for (std::uint32_t s = 0; s < slots_; ++s) {
            if (s % k_ >= limit)
                continue;
            if (s == s0)
                continue;
            (wins(target(o.node, s)) ? good : bad).push_back(s);
        }
        std::vector<std::int64_t> out;
        if (s0 % k_ < limit)
            out.push_back(s0);
        out.insert(out.end(), good.begin(), good.end());
        out.insert(out.end(), bad.begin(), bad.end());
        return out;
    }

private:
    [[nodiscard]] std::size_t cell_of(std::uint32_t x, std::size_t i) const
    {
        const auto v = static_cast<VertexId>(x / combos_);
        const auto m = static_cast<std::uint32_t>((x % combos_ / radix_[i]) % k_);
        return std::size_t{m} * g_.num_obs(lower_[i]) + g_.obs_id(v, lower_[i]);
    }

    [[nodiscard]] VertexId target(std::uint32_t x, std::uint32_t s) const
    {
        const auto v = static_cast<VertexId>(x / combos_);
        std::size_t lm = x % combos_;
        const int i = index_of_[g_.owner(v)];
        DirId d = s % dirs_;
        if (i >= 0) {
            const auto ii = static_cast<std::size_t>(i);
            d = s / k_;
            const std::size_t m = (lm / radix_[ii]) % k_;
            lm = lm - m * radix_[ii] + (s % k_) * radix_[ii];
        }
        return static_cast<VertexId>(std::size_t{g_.next(v, d)} * combos_ + lm);
    }

    const MpgGame& g_;
    std::uint32_t k_;
    std::vector<PlayerId> lower_;
    std::vector<int> index_of_;
    std::vector<std::size_t> radix_;
    std::size_t combos_ = 1;
    std::uint32_t dirs_ = 0, slots_ = 0;
    Arena arena_;
    std::vector<char> even_;
    std::vector<std::vector<std::uint32_t>> cell_start_, cell_nodes_;
    std::vector<std::vector<std::int64_t>> fixed_;
    ParitySolution sol_;
};

enum class SearchResult
{
    found,
    exhausted,
    out_of_budget
};

// Depth-first search over partial strategy tables of a fixed memory size.
// The product of the game with the coalition memories is explored as far as
// the tables are defined; a coalition node whose table cell is still empty
// waits for a decision. A table is refuted when it lets the opponents leave
// the winning region of the relaxation or closes a reachable cycle whose
// minimum colour is odd; both stay refuted in every extension. Refutations
// name the decisions they depend on, and the search jumps back to the
// latest of them. Preset cells are never revised.
class Search
{
public:
    Search(const MpgGame& g,
           const std::vector<PlayerId>& players,
           std::uint32_t k,
           const std::vector<std::vector<std::int64_t>>& preset,
           const Relaxation* relaxation,
           std::uint64_t& work,
           std::uint64_t budget)
        : g_(g), relax_(relaxation), k_(k), work_(work), budget_(budget), players_(players)
    {
        index_of_.assign(g.num_players() + 1, -1);
        radix_.resize(players_.size());
        for (std::size_t i = 0; i < players_.size(); ++i) {
            index_of_[players_[i]] = static_cast<int>(i);
            radix_[i] = combos_;
            combos_ *= k;
            const std::size_t cells = std::size_t{k} * g.num_obs(players_[i]);
            cells_.push_back(i < preset.size() ? preset[i] : std::vector<std::int64_t>(cells, -1));
            cell_decision_.emplace_back(cells, -1);
            std::uint32_t used = 1;
            for (std::size_t c = 0; c < cells; ++c)
                if (cells_[i][c] >= 0)
                    used = std::max({used,
                                     static_cast<std::uint32_t>(c / g.num_obs(players_[i])) + 1,
                                     static_cast<std::uint32_t>(cells_[i][c] % k) + 1});
            preset_used_.push_back(used);
        }
        for (VertexId v = 0; v < g.size(); ++v)
            if (g.color(v) % 2 == 1)
                odd_colors_.push_back(g.color(v));
        std::sort(odd_colors_.begin(), odd_colors_.end());
        odd_colors_.erase(std::unique(odd_colors_.begin(), odd_colors_.end()), odd_colors_.end());
    }

    SearchResult run()
    {
        rebuild();
        bool conflict = explore_and_check();
        while (true) {
            if (conflict) {
                if (!backjump(conflict_))
                    return budget_hit_ ? SearchResult::out_of_budget : SearchResult::exhausted;
                conflict = false;
                continue;
            }
            const auto open = first_open();
            if (!open)
                return SearchResult::found;
            Decision d;
            d.player = open->player;
            d.memory = open->memory;
            d.obs = open->obs;
            d.code = code_[open->node];
            d.option = -1;
            // the cell is needed because its node is reachable, and the
            // admissible options depend on where it was reached
            d.conflicts = cheapest_path(open->node);
            if (memory_limit(decisions_.size(), d.player) < k_)
                for (std::size_t j = 0; j < decisions_.size(); ++j)
                    if (decisions_[j].player == d.player)
                        d.conflicts.push_back(static_cast<std::int64_t>(j));
            decisions_.push_back(std::move(d));
            if (!advance(decisions_.back())) {
                if (budget_hit_)
                    return SearchResult::out_of_budget;
                std::vector<std::int64_t> c = decisions_.back().conflicts;
                clear_top();
                if (!backjump(c))
                    return budget_hit_ ? SearchResult::out_of_budget : SearchResult::exhausted;
                continue;
            }
            assign(decisions_.size() - 1);
            resume_waiting();
            conflict = explore_and_check();
        }
    }

    StrategyProfile profile() const
    {
        StrategyProfile sp;
        for (std::size_t i = 0; i < players_.size(); ++i) {
            const PlayerId p = players_[i];
            PlayerStrategy ps;
            ps.player = p;
            std::uint32_t used = 0;
            for (std::uint32_t m = 0; m < k_; ++m)
                for (std::uint32_t o = 0; o < g_.num_obs(p); ++o) {
                    const std::int64_t c = cells_[i][std::size_t{m} * g_.num_obs(p) + o];
                    if (c < 0)
                        continue;
                    StrategyEntry e;
                    e.memory = m;
                    const ObsClass& oc = g_.obs_class(p, o);
                    for (auto s : oc.states)
                        e.obs.push_back(g_.ks().state_names()[s]);
                    e.obs_q = oc.q;
                    e.direction = g_.ks().directions()[static_cast<DirId>(c / k_)];
                    e.next = static_cast<std::uint32_t>(c % k_);
                    used = std::max({used, e.memory + 1, e.next + 1});
                    ps.entries.push_back(std::move(e));
                }
            ps.memory_size = std::max<std::uint32_t>(used, 1);
            sp.players.push_back(std::move(ps));
        }
        canonicalize(sp);
        return sp;
    }

private:
    struct Decision
    {
        std::size_t player; // index into players_
        std::uint32_t memory;
        std::uint32_t obs;
        std::uint64_t code;  // product node that first needed the cell
        std::int64_t option; // rank * k + next, ranks ordered by direction_at
        std::vector<std::int64_t> conflicts; // earlier decisions its failures depend on
    };

    struct Open
    {
        std::size_t player;
        std::uint32_t memory;
        std::uint32_t obs;
        std::uint32_t node;
    };

    [[nodiscard]] std::size_t cell_index(std::size_t i, std::uint32_t m, std::uint32_t obs) const
    {
        return std::size_t{m} * g_.num_obs(players_[i]) + obs;
    }

    [[nodiscard]] bool wins(std::uint64_t code) const
    {
        return relax_ == nullptr || relax_->wins(relax_->node(static_cast<VertexId>(code / combos_), code % combos_));
    }

    // Memory states that may appear as the next state of decision `upto`:
    // the ones used before it plus one fresh state.
    [[nodiscard]] std::uint32_t memory_limit(std::size_t upto, std::size_t player) const
    {
        std::uint32_t used = preset_used_[player];
        for (std::size_t j = 0; j < upto; ++j)
            if (decisions_[j].player == player) {
                used = std::max(used, static_cast<std::uint32_t>(decisions_[j].option % k_) + 1);
                used = std::max(used, decisions_[j].memory + 1);
            }
        if (upto < decisions_.size() && decisions_[upto].player == player)
            used = std::max(used, decisions_[upto].memory + 1);
        return std::min(k_, used + 1);
    }

    // Directions by rank: the relaxation's move first, then the others in
    // their natural order.
    [[nodiscard]] DirId direction_at(std::int64_t rank, std::uint64_t code) const
    {
        const auto r = static_cast<DirId>(rank);
        if (relax_ == nullptr)
            return r;
        const DirId h = relax_->hint(relax_->node(static_cast<VertexId>(code / combos_), code % combos_));
        if (r == 0)
            return h;
        return r - 1 < h ? r - 1 : r;
    }

    [[nodiscard]] std::int64_t cell_value(const Decision& d) const
    {
        return static_cast<std::int64_t>(direction_at(d.option / k_, d.code)) * k_ + d.option % k_;
    }

    [[nodiscard]] std::uint64_t successor(std::uint64_t code, std::size_t i, std::int64_t value) const
    {
        const auto v = static_cast<VertexId>(code / combos_);
        const std::uint64_t mem = code % combos_;
        const std::uint64_t m = (mem / radix_[i]) % k_;
        const auto next = static_cast<std::uint64_t>(value % k_);
        const VertexId w = g_.next(v, static_cast<DirId>(value / k_));
        return std::uint64_t{w} * combos_ + mem - m * radix_[i] + next * radix_[i];
    }

    // Moves d to its next admissible option; false when none is left.
    bool advance(Decision& d)
    {
        const std::size_t pos = static_cast<std::size_t>(&d - decisions_.data());
        const std::uint32_t limit = memory_limit(pos, d.player);
        const std::int64_t total = static_cast<std::int64_t>(g_.num_directions()) * k_;
        for (std::int64_t o = d.option + 1; o < total; ++o) {
            const auto next = static_cast<std::uint32_t>(o % k_);
            if (next >= limit)
                continue;
            const std::int64_t value = static_cast<std::int64_t>(direction_at(o / k_, d.code)) * k_ + next;
            if (!wins(successor(d.code, d.player, value)))
                continue;
            if (work_ >= budget_) {
                budget_hit_ = true;
                return false;
            }
            ++work_;
            d.option = o;
            return true;
        }
        return false;
    }

    void assign(std::size_t i)
    {
        const Decision& d = decisions_[i];
        const std::size_t c = cell_index(d.player, d.memory, d.obs);
        cells_[d.player][c] = cell_value(d);
        cell_decision_[d.player][c] = static_cast<std::int64_t>(i);
    }

    void clear_top()
    {
        const Decision& d = decisions_.back();
        const std::size_t c = cell_index(d.player, d.memory, d.obs);
        cells_[d.player][c] = -1;
        cell_decision_[d.player][c] = -1;
        decisions_.pop_back();
    }

    // Conflict-directed backjumping. c lists the decisions a refutation
    // depends on. Returns false when the refutation needs no decision at all,
    // i.e. no table of this memory size wins, or the budget ran out.
    bool backjump(std::vector<std::int64_t> c)
    {
        while (true) {
            if (c.empty())
                return false;
            const auto h = static_cast<std::size_t>(*std::max_element(c.begin(), c.end()));
            while (decisions_.size() > h + 1)
                clear_top();
            Decision& d = decisions_[h];
            for (auto j : c)
                if (static_cast<std::size_t>(j) != h)
                    d.conflicts.push_back(j);
            std::sort(d.conflicts.begin(), d.conflicts.end());
            d.conflicts.erase(std::unique(d.conflicts.begin(), d.conflicts.end()), d.conflicts.end());
            cells_[d.player][cell_index(d.player, d.memory, d.obs)] = -1;
            if (advance(d)) {
                assign(h);
                rebuild();
                if (!explore_and_check())
                    return true;
                c = conflict_;
                continue;
            }
            if (budget_hit_)
                return false;
            c = std::move(d.conflicts);
            clear_top();
        }
    }

    void rebuild()
    {
        ids_.clear();
        code_.clear();
        succ_.clear();
        expanded_.clear();
        waiting_.clear();
        work_list_.clear();
        intern(std::uint64_t{g_.initial()} * combos_);
    }

    std::uint32_t intern(std::uint64_t c)
    {
        auto [it, fresh] = ids_.emplace(c, static_cast<std::uint32_t>(code_.size()));
        if (fresh) {
            if (code_.size() >= product_cap)
                throw ResourceError("strategy search product exceeds " + std::to_string(product_cap) + " nodes");
            code_.push_back(c);
            succ_.emplace_back();
            expanded_.push_back(0);
            work_list_.push_back(it->second);
        }
        return it->second;
    }

    [[nodiscard]] VertexId vertex_of(std::uint32_t x) const { return static_cast<VertexId>(code_[x] / combos_); }

    [[nodiscard]] std::size_t cell_of(std::uint32_t x, std::size_t i) const
    {
        const auto m = static_cast<std::uint32_t>((code_[x] % combos_ / radix_[i]) % k_);
        return cell_index(i, m, g_.obs_id(vertex_of(x), players_[i]));
    }

    // Decision behind the move of node x, if one fixed it.
    void add_decision_of(std::uint32_t x, std::vector<std::int64_t>& out) const
    {
        const int i = index_of_[g_.owner(vertex_of(x))];
        if (i < 0)
            return;
        const auto ii = static_cast<std::size_t>(i);
        const std::int64_t j = cell_decision_[ii][cell_of(x, ii)];
        if (j >= 0)
            out.push_back(j);
    }

    // Decision behind node x: -1 for opponent nodes and preset cells, none
    // for nodes still waiting for their cell.
    [[nodiscard]] std::int64_t decision_at(std::uint32_t x) const
    {
        const int i = index_of_[g_.owner(vertex_of(x))];
        if (i < 0)
            return -1;
        const auto ii = static_cast<std::size_t>(i);
        const std::size_t c = cell_of(x, ii);
        if (cells_[ii][c] < 0)
            return std::numeric_limits<std::int64_t>::max();
        return cell_decision_[ii][c];
    }

    // Expands pending nodes. Returns true on a conflict.
    bool explore()
    {
        touched_.clear();
        while (!work_list_.empty()) {
            const std::uint32_t x = work_list_.back();
            work_list_.pop_back();
            if (expanded_[x] != 0)
                continue;
            const VertexId v = vertex_of(x);
            if (!wins(code_[x])) {
                conflict_ = cheapest_path(x);
                return true;
            }
            const std::uint64_t mem = code_[x] % combos_;
            const int i = index_of_[g_.owner(v)];
            if (i < 0) {
                for (DirId d = 0; d < g_.num_directions(); ++d) {
                    const std::uint64_t c = std::uint64_t{g_.next(v, d)} * combos_ + mem;
                    if (!wins(c)) {
                        conflict_ = cheapest_path(x);
                        return true;
                    }
                    const std::uint32_t y = intern(c);
                    succ_[x].push_back(y);
                }
            } else {
                const auto ii = static_cast<std::size_t>(i);
                const std::int64_t value = cells_[ii][cell_of(x, ii)];
                if (value < 0) {
                    waiting_.push_back(x);
                    continue;
                }
                const std::uint64_t c = successor(code_[x], ii, value);
                if (!wins(c)) {
                    conflict_ = cheapest_path(x);
                    add_decision_of(x, conflict_);
                    return true;
                }
                const std::uint32_t y = intern(c);
                succ_[x].push_back(y);
            }
            expanded_[x] = 1;
            touched_.push_back(x);
        }
        return false;
    }

    bool explore_and_check()
    {
        if (explore())
            return true;
        return odd_cycle(touched_);
    }

    // Waiting nodes whose cell got assigned go back to the work list.
    void resume_waiting()
    {
        std::vector<std::uint32_t> still;
        for (auto x : waiting_) {
            const auto ii = static_cast<std::size_t>(index_of_[g_.owner(vertex_of(x))]);
            if (cells_[ii][cell_of(x, ii)] >= 0)
                work_list_.push_back(x);
            else
                still.push_back(x);
        }
        waiting_ = std::move(still);
    }

    [[nodiscard]] std::optional<Open> first_open() const
    {
        for (auto x : waiting_) {
            const VertexId v = vertex_of(x);
            const PlayerId p = g_.owner(v);
            const auto ii = static_cast<std::size_t>(index_of_[p]);
            const auto m = static_cast<std::uint32_t>((code_[x] % combos_ / radix_[ii]) % k_);
            return Open{ii, m, g_.obs_id(v, p), x};
        }
        return std::nullopt;
    }

    // Decisions on a path from the initial node to x whose latest decision
    // is as early as possible.
    std::vector<std::int64_t> cheapest_path(std::uint32_t x) const
    {
        const std::size_t n = code_.size();
        std::vector<std::int64_t> cost(n, std::numeric_limits<std::int64_t>::max());
        std::vector<std::uint32_t> from(n, 0);
        using Item = std::pair<std::int64_t, std::uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        cost[0] = -1;
        queue.emplace(-1, 0);
        while (!queue.empty()) {
            auto [c, y] = queue.top();
            queue.pop();
            if (c != cost[y])
                continue;
            if (y == x)
                break;
            const std::int64_t through = std::max(c, decision_at(y));
            for (auto z : succ_[y])
                if (through < cost[z]) {
                    cost[z] = through;
                    from[z] = y;
                    queue.emplace(through, z);
                }
        }
        std::vector<std::int64_t> out;
        for (std::uint32_t y = x; y != 0;) {
            y = from[y];
            add_decision_of(y, out);
        }
        return out;
    }

    // Is there a cycle with odd minimum colour through one of the freshly
    // expanded nodes? Sets conflict_ from a lasso.
    bool odd_cycle(const std::vector<std::uint32_t>& fresh)
    {
        if (fresh.empty())
            return false;
        mark_.resize(code_.size(), 0);
        for (unsigned c : odd_colors_) {
            // region: nodes of colour >= c reachable from fresh ones
            std::vector<std::uint32_t> region;
            ++epoch_;
            for (auto x : fresh)
                if (g_.color(vertex_of(x)) >= c && mark_[x] != epoch_) {
                    mark_[x] = epoch_;
                    region.push_back(x);
                }
            for (std::size_t i = 0; i < region.size(); ++i)
                for (auto y : succ_[region[i]])
                    if (mark_[y] != epoch_ && g_.color(vertex_of(y)) >= c) {
                        mark_[y] = epoch_;
                        region.push_back(y);
                    }
            if (odd_component(region, c)) {
                explain_cycle();
                return true;
            }
        }
        return false;
    }

    // Sets conflict_ to the decisions of an odd lasso whose latest decision
    // is as early as possible.
    void explain_cycle()
    {
        std::vector<std::int64_t> levels{-1};
        for (const auto& d : cell_decision_)
            for (auto j : d)
                if (j >= 0)
                    levels.push_back(j);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        std::size_t lo = 0, hi = levels.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (odd_lasso_below(levels[mid], false))
                hi = mid;
            else
                lo = mid + 1;
        }
        odd_lasso_below(levels[lo], true);
    }

    // Is there a reachable cycle with odd minimum colour using only nodes
    // whose decision is at most h? With record set, stores its decisions.
    bool odd_lasso_below(std::int64_t h, bool record)
    {
        const std::size_t n = code_.size();
        std::vector<std::uint32_t> from(n, 0);
        std::vector<char> reach(n, 0);
        std::vector<std::uint32_t> order{0};
        reach[0] = decision_at(0) <= h ? 1 : 2;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::uint32_t y = order[i];
            if (reach[y] != 1)
                continue;
            for (auto z : succ_[y])
                if (reach[z] == 0) {
                    reach[z] = decision_at(z) <= h ? 1 : 2;
                    from[z] = y;
                    order.push_back(z);
                }
        }
        mark_.resize(n, 0);
        for (unsigned c : odd_colors_) {
            ++epoch_;
            std::vector<std::uint32_t> region;
            for (auto y : order)
                if (reach[y] == 1 && g_.color(vertex_of(y)) >= c) {
                    mark_[y] = epoch_;
                    region.push_back(y);
                }
            auto comp = odd_component(region, c);
            if (!comp)
                continue;
            if (record) {
                const std::uint32_t u = cycle_through(*comp, c);
                for (std::uint32_t y = u; y != 0;) {
                    y = from[y];
                    add_decision_of(y, conflict_);
                }
            }
            return true;
        }
        return false;
    }

    // A cyclic strongly connected component of the region (nodes marked with
    // the current epoch) that contains a node of colour c.
    std::optional<std::vector<std::uint32_t>> odd_component(const std::vector<std::uint32_t>& region, unsigned c)
    {
        constexpr std::uint32_t none = ~std::uint32_t{0};
        index_.resize(code_.size());
        low_.resize(code_.size());
        on_stack_.resize(code_.size(), 0);
        for (auto x : region)
            index_[x] = none;
        std::uint32_t counter = 0;
        std::vector<std::uint32_t> stack;
        struct Frame
        {
            std::uint32_t v;
            std::size_t next;
        };
        std::vector<Frame> call;
        auto in_region = [&](std::uint32_t y) { return mark_[y] == epoch_; };
        for (auto root : region) {
            if (index_[root] != none)
                continue;
            call.push_back({root, 0});
            index_[root] = low_[root] = counter++;
            stack.push_back(root);
            on_stack_[root] = 1;
            while (!call.empty()) {
                Frame& f = call.back();
                if (f.next < succ_[f.v].size()) {
                    const std::uint32_t w = succ_[f.v][f.next++];
                    if (!in_region(w))
                        continue;
                    if (index_[w] == none) {
                        index_[w] = low_[w] = counter++;
                        stack.push_back(w);
                        on_stack_[w] = 1;
                        call.push_back({w, 0});
                    } else if (on_stack_[w] != 0) {
                        low_[f.v] = std::min(low_[f.v], index_[w]);
                    }
                    continue;
                }
                const std::uint32_t v = f.v;
                call.pop_back();
                if (!call.empty())
                    low_[call.back().v] = std::min(low_[call.back().v], low_[v]);
                if (low_[v] != index_[v])
                    continue;
                std::vector<std::uint32_t> comp;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack_[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                bool has_c = false;
                for (auto y : comp)
                    if (g_.color(vertex_of(y)) == c)
                        has_c = true;
                if (!has_c)
                    continue;
                bool cyclic = comp.size() > 1;
                if (!cyclic)
                    for (auto y : succ_[v])
                        if (y == v)
                            cyclic = true;
                if (cyclic) {
                    for (auto y : stack)
                        on_stack_[y] = 0;
                    return comp;
                }
            }
        }
        return std::nullopt;
    }

    // Sets conflict_ to the decisions on a shortest cycle inside comp through
    // a node of colour c and returns that node.
    std::uint32_t cycle_through(const std::vector<std::uint32_t>& comp, unsigned c)
    {
        std::uint32_t u = comp.front();
        for (auto y : comp)
            if (g_.color(vertex_of(y)) == c) {
                u = y;
                break;
            }
        ++comp_epoch_;
        comp_mark_.resize(code_.size(), 0);
        for (auto y : comp)
            comp_mark_[y] = comp_epoch_;
        std::unordered_map<std::uint32_t, std::uint32_t> from;
        std::vector<std::uint32_t> queue{u};
        bool closed = false;
        for (std::size_t i = 0; i < queue.size() && !closed; ++i)
            for (auto y : succ_[queue[i]]) {
                if (comp_mark_[y] != comp_epoch_)
                    continue;
                if (y == u) {
                    from[u] = queue[i];
                    closed = true;
                    break;
                }
                if (from.emplace(y, queue[i]).second)
                    queue.push_back(y);
            }
        conflict_.clear();
        std::uint32_t y = u;
        do {
            y = from.at(y);
            add_decision_of(y, conflict_);
        } while (y != u);
        return u;
    }

    const MpgGame& g_;
    const Relaxation* relax_;
    std::uint32_t k_;
    std::uint64_t& work_;
    std::uint64_t budget_;
    bool budget_hit_ = false;

    std::vector<PlayerId> players_;
    std::vector<int> index_of_;
    std::vector<std::uint64_t> radix_;
    std::uint64_t combos_ = 1;
    std::vector<std::vector<std::int64_t>> cells_;         // dir * k + next, or -1
    std::vector<std::vector<std::int64_t>> cell_decision_; // decision that set the cell, or -1
    std::vector<std::uint32_t> preset_used_;
    std::vector<unsigned> odd_colors_;
    std::vector<Decision> decisions_;
    std::vector<std::int64_t> conflict_;

    std::unordered_map<std::uint64_t, std::uint32_t> ids_;
    std::vector<std::uint64_t> code_;
    std::vector<std::vector<std::uint32_t>> succ_;
    std::vector<char> expanded_;
    std::vector<std::uint32_t> waiting_;
    std::vector<std::uint32_t> work_list_;
    std::vector<std::uint32_t> touched_;

    std::vector<std::uint32_t> mark_, comp_mark_;
    std::uint32_t epoch_ = 0, comp_epoch_ = 0;
    std::vector<std::uint32_t> index_, low_;
    std::vector<char> on_stack_;
};

struct Attempt
{
    SearchResult result = SearchResult::exhausted;
    std::optional<StrategyProfile> profile;
};

// Fixes the cells of all coalition players but the most informed one, in
// the order the relaxation's winning strategy reaches them, and re-solves
// the relaxation after every choice. Once no open cell is reachable, the
// table search completes the profile; its failure undoes the latest choice.
Attempt guided_search(const MpgGame& g,
                      const std::vector<PlayerId>& players,
                      std::uint32_t k,
                      std::uint64_t& work,
                      std::uint64_t budget)
{
    Relaxation r(g, players, k);
    struct Choice
    {
        Relaxation::Open cell;
        std::vector<std::int64_t> options;
        std::size_t next = 0;
    };
    std::vector<Choice> stack;
    Attempt out;

    // moves the latest choice to its next option; false when all are used up
    auto backtrack = [&]() {
        while (!stack.empty()) {
            Choice& c = stack.back();
            r.unfix(c.cell.player, c.cell.cell);
            if (c.next < c.options.size()) {
                if (work >= budget) {
                    out.result = SearchResult::out_of_budget;
                    return false;
                }
                ++work;
                r.fix(c.cell.player, c.cell.cell, c.options[c.next++]);
                return true;
            }
            stack.pop_back();
        }
        return false;
    };

    while (true) {
        r.solve();
        if (!r.won()) {
            if (!backtrack())
                return out;
            continue;
        }
        if (auto open = r.open_cell()) {
            Choice c;
            c.cell = *open;
            c.options = r.options(*open);
            stack.push_back(std::move(c));
            if (!backtrack())
                return out;
            continue;
        }
        std::vector<std::vector<std::int64_t>> preset;
        for (std::size_t i = 0; i < r.lower_count(); ++i)
            preset.push_back(r.fixed(i));
        Search s(g, players, k, preset, &r, work, budget);
        const auto result = s.run();
        if (result == SearchResult::found) {
            out.result = result;
            out.profile = s.profile();
            return out;
        }
        if (result == SearchResult::out_of_budget) {
            out.result = result;
            return out;
        }
        if (!backtrack())
            return out;
    }
}

} // namespace

// Memory tracks the automaton state, so the last player, who sees every
// copy, can follow a positional strategy of the perfect-information game.
std::optional<StrategyProfile> q_tracking_profile(const MpgGame& g, const ParitySolution& sol)
{
    const auto n = static_cast<PlayerId>(g.num_players());
    if (g.coalition() != std::vector<PlayerId>{n} || sol.even_wins[g.initial()] == 0)
        return std::nullopt;
    const auto& a = g.dpa();
    std::unordered_map<AutState, std::uint32_t> mem;
    std::vector<char> seen(g.size(), 0);
    std::vector<VertexId> stack{g.initial()};
    seen[g.initial()] = 1;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<DirId, std::uint32_t>> rows;
    auto memory_of = [&](AutState q) {
        auto [it, fresh] = mem.emplace(q, static_cast<std::uint32_t>(mem.size()));
        (void)fresh;
        return it->second;
    };
    {
        const auto& init = g.vertex(g.initial());
        memory_of(n == 1 ? init.q : a.step(init.q, g.letter(init.states)));
    }
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        std::vector<DirId> moves;
        if (g.owner(v) == n) {
            const auto& x = g.vertex(v);
            const DirId d = sol.strategy[v];
            std::vector<StateId> after = x.states;
            after[n - 1] = g.ks().step(after[n - 1], d);
            const AutState q2 = a.step(x.q, g.letter(n == 1 ? x.states : after));
            const std::uint32_t m = memory_of(x.q);
            auto row = std::make_pair(d, memory_of(q2));
            auto [it, fresh] = rows.emplace(std::make_pair(m, g.obs_id(v, n)), row);
            if (!fresh && it->second != row)
                return std::nullopt;
            moves.push_back(d);
        } else {
            for (DirId d = 0; d < g.num_directions(); ++d)
                moves.push_back(d);
        }
        for (DirId d : moves) {
            const VertexId w = g.next(v, d);
            if (seen[w] == 0) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    StrategyProfile sp;
    PlayerStrategy ps;
    ps.player = n;
    ps.memory_size = static_cast<std::uint32_t>(mem.size());
    for (const auto& [key, row] : rows) {
        StrategyEntry e;
        e.memory = key.first;
        const ObsClass& oc = g.obs_class(n, key.second);
        for (auto s : oc.states)
            e.obs.push_back(g.ks().state_names()[s]);
        e.obs_q = oc.q;
        e.direction = g.ks().directions()[row.first];
        e.next = row.second;
        ps.entries.push_back(std::move(e));
    }
    sp.players.push_back(std::move(ps));
    canonicalize(sp);
    return sp;
}

Verdict solve_bounded_coalition(const MpgGame& g, const SearchOptions& opts)
{
    if (!is_hierarchical(g).hierarchical())
        throw ValidationError("bounded coalition search needs hierarchical observations");
    Verdict v;
    v.method = "bounded-search";
    v.memory_bound = opts.memory_bound;
    v.budget = opts.budget;

    if (opts.relaxation_pruning || opts.seeded) {
        const auto sol = solve_zielonka(g);
        if (sol.even_wins[g.initial()] == 0) {
            v.game_lost = true;
            v.note = "the coalition loses even with full information";
            return v;
        }
        if (opts.seeded) {
            auto seed = q_tracking_profile(g, sol);
            if (seed && seed->players[0].memory_size <= opts.memory_bound) {
                stamp_profile(*seed, g, g.formula(), ProphecyFamily{});
                if (check_profile(g, *seed).passed()) {
                    v.outcome = Outcome::proven;
                    v.profile = std::move(seed);
                    v.note = "strategy tracking the automaton state";
                    return v;
                }
            }
        }
    }

    const auto players = search_order(g);
    for (std::uint32_t k = 1; k <= opts.memory_bound; ++k) {
        Attempt a;
        if (opts.relaxation_pruning && Relaxation::fits(g, players, k)) {
            a = guided_search(g, players, k, v.work, opts.budget);
        } else {
            Search s(g, players, k, {}, nullptr, v.work, opts.budget);
            a.result = s.run();
            if (a.result == SearchResult::found)
                a.profile = s.profile();
        }
        if (a.result == SearchResult::found) {
            auto sp = std::move(*a.profile);
            stamp_profile(sp, g, g.formula(), ProphecyFamily{});
            auto check = check_profile(g, sp);
            if (!check.passed())
                throw Error("internal: search result fails the certificate check: " + check.diagnostic);
            v.outcome = Outcome::proven;
            v.profile = std::move(sp);
            v.note = "found with " + std::to_string(k) + " memory state" + (k == 1 ? "" : "s");
            return v;
        }
        if (a.result == SearchResult::out_of_budget) {
            v.budget_exhausted = true;
            v.note = "search budget exhausted at memory " + std::to_string(k);
            return v;
        }
    }
    v.note = "no winning strategy with at most " + std::to_string(opts.memory_bound) + " memory states";
    return v;
}

} // namespace hypergame
