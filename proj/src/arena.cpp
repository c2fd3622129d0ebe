#include "hypergame/arena.hpp"

#include "hypergame/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace hypergame
{

namespace
{

constexpr std::size_t vertex_cap = 4000000;

// Mixed-radix code of a vertex: (turn, s_1 .. s_n, q).
class VertexCoder
{
public:
    VertexCoder(std::size_t players, std::size_t states, std::size_t qs) : n_(players), s_(states), q_(qs)
    {
        long double total = static_cast<long double>(players) * static_cast<long double>(qs);
        for (std::size_t i = 0; i < players; ++i)
            total *= static_cast<long double>(states);
        if (total >= static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 2))
            throw ResourceError("game vertex space is too large to index");
        total_ = static_cast<std::uint64_t>(total);
    }

    [[nodiscard]] std::uint64_t encode(const GameVertex& v) const
    {
        std::uint64_t k = v.turn - 1;
        for (auto s : v.states)
            k = k * s_ + s;
        return k * q_ + v.q;
    }

    [[nodiscard]] GameVertex decode(std::uint64_t k) const
    {
        GameVertex v;
        v.q = static_cast<AutState>(k % q_);
        k /= q_;
        v.states.resize(n_);
        for (std::size_t i = n_; i-- > 0;) {
            v.states[i] = static_cast<StateId>(k % s_);
            k /= s_;
        }
        v.turn = static_cast<PlayerId>(k + 1);
        return v;
    }

    [[nodiscard]] std::uint64_t total() const { return total_; }

private:
    std::size_t n_, s_, q_;
    std::uint64_t total_ = 0;
};

struct LetterSource
{
    std::size_t copy;
    std::size_t ap;
};

std::vector<LetterSource> letter_sources(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a)
{
    for (const auto& atom : indexed_aps(f.body))
        if (std::find(a.aps.begin(), a.aps.end(), atom) == a.aps.end())
            throw ValidationError("automaton alphabet lacks " + to_string(atom));
    std::vector<LetterSource> out;
    for (const auto& atom : a.aps) {
        auto ap = ks.find_ap(atom.ap);
        if (!ap)
            throw ValidationError("proposition '" + atom.ap + "' is not declared by the structure");
        out.push_back({f.var_index(atom.var), *ap});
    }
    if (a.letters != (std::uint64_t{1} << a.aps.size()))
        throw ValidationError("automaton alphabet is not a proposition alphabet");
    return out;
}

Letter letter_of(const KripkeStructure& ks, const std::vector<LetterSource>& src, const std::vector<StateId>& states)
{
    Letter l = 0;
    for (std::size_t i = 0; i < src.size(); ++i)
        if ((ks.label(states[src[i].copy]) >> src[i].ap) & 1U)
            l |= Letter{1} << i;
    return l;
}

GameVertex step(const KripkeStructure& ks,
                const Dpa& a,
                const std::vector<LetterSource>& src,
                const GameVertex& v,
                DirId d)
{
    GameVertex w = v;
    const std::size_t n = v.states.size();
    if (v.turn == 1)
        w.q = a.step(v.q, letter_of(ks, src, v.states));
    w.states[v.turn - 1] = ks.step(v.states[v.turn - 1], d);
    w.turn = v.turn < n ? v.turn + 1 : 1;
    return w;
}

struct Built
{
    Arena arena;
    std::vector<GameVertex> vertices;
    std::unordered_map<std::uint64_t, VertexId> index;
};

Built build_arena(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a, Materialization m)
{
    if (f.size() == 0)
        throw ValidationError("formula has no quantifiers");
    const auto src = letter_sources(ks, f, a);
    const std::size_t n = f.size();
    const auto dirs = static_cast<std::uint32_t>(ks.num_directions());
    VertexCoder coder(n, ks.num_states(), a.size());

    Built b;
    b.arena.directions = dirs;
    GameVertex init{std::vector<StateId>(n, ks.init()), a.initial, 1};

    auto add = [&](const GameVertex& v) {
        auto [it, fresh] = b.index.emplace(coder.encode(v), static_cast<VertexId>(b.vertices.size()));
        if (fresh) {
            if (b.vertices.size() >= vertex_cap)
                throw ResourceError("game exceeds " + std::to_string(vertex_cap) + " vertices");
            b.vertices.push_back(v);
        }
        return it->second;
    };

    if (m == Materialization::full) {
        if (coder.total() > vertex_cap)
            throw ResourceError("game exceeds " + std::to_string(vertex_cap) + " vertices");
        for (std::uint64_t k = 0; k < coder.total(); ++k)
            add(coder.decode(k));
        b.arena.initial = b.index.at(coder.encode(init));
        for (const auto& v : b.vertices)
            for (DirId d = 0; d < dirs; ++d)
                b.arena.succ.push_back(b.index.at(coder.encode(step(ks, a, src, v, d))));
    } else {
        b.arena.initial = add(init);
        for (std::size_t head = 0; head < b.vertices.size(); ++head) {
            const GameVertex v = b.vertices[head];
            for (DirId d = 0; d < dirs; ++d)
                b.arena.succ.push_back(add(step(ks, a, src, v, d)));
        }
    }
    for (const auto& v : b.vertices) {
        b.arena.color.push_back(a.color[v.q]);
        b.arena.owner.push_back(v.turn);
    }
    return b;
}

std::uint64_t vertex_hash(const GameVertex& v)
{
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t x) { h = (h ^ x) * 1099511628211ULL; };
    for (auto s : v.states)
        mix(s);
    mix(v.q);
    mix(v.turn);
    return h;
}

std::vector<std::pair<std::uint64_t, VertexId>> make_lookup(const std::vector<GameVertex>& vs)
{
    std::vector<std::pair<std::uint64_t, VertexId>> out;
    out.reserve(vs.size());
    for (VertexId v = 0; v < vs.size(); ++v)
        out.emplace_back(vertex_hash(vs[v]), v);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<VertexId> lookup(const std::vector<std::pair<std::uint64_t, VertexId>>& table,
                               const std::vector<GameVertex>& vs,
                               const GameVertex& v)
{
    const auto h = vertex_hash(v);
    for (auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(h, VertexId{0}));
         it != table.end() && it->first == h; ++it)
        if (vs[it->second] == v)
            return it->second;
    return std::nullopt;
}

} // namespace

TwoPlayerGame::TwoPlayerGame(Arena arena, std::vector<GameVertex> vertices)
    : arena_(std::move(arena)), vertices_(std::move(vertices)), lookup_(make_lookup(vertices_))
{
}

std::optional<VertexId> TwoPlayerGame::find(const GameVertex& v) const
{
    return lookup(lookup_, vertices_, v);
}

MpgGame::MpgGame(Parts parts)
    : ks_(std::move(parts.ks)), formula_(std::move(parts.formula)), dpa_(std::move(parts.dpa)),
      arena_(std::move(parts.arena)), vertices_(std::move(parts.vertices)), visible_(std::move(parts.visible)),
      sees_q_(std::move(parts.sees_q))
{
    const std::size_t n = formula_->size();
    if (visible_.size() != n || sees_q_.size() != n)
        throw ValidationError("observation model does not cover every player");
    for (const auto& row : visible_)
        if (row.size() != n)
            throw ValidationError("observation mask has the wrong width");
    for (std::size_t i = 0; i < n; ++i)
        if (formula_->prefix[i].quantifier == Quantifier::Exists)
            coalition_.push_back(static_cast<PlayerId>(i + 1));
    for (const auto& s : letter_sources(*ks_, *formula_, *dpa_))
        letter_sources_.emplace_back(s.copy, s.ap);
    lookup_ = make_lookup(vertices_);

    obs_.assign(n, std::vector<std::uint32_t>(vertices_.size()));
    obs_classes_.assign(n, {});
    for (PlayerId p = 1; p <= n; ++p) {
        std::map<ObsClass, std::uint32_t> ids;
        for (VertexId v = 0; v < vertices_.size(); ++v) {
            ObsClass c = observation_class(v, p);
            auto [it, fresh] = ids.emplace(c, static_cast<std::uint32_t>(obs_classes_[p - 1].size()));
            if (fresh)
                obs_classes_[p - 1].push_back(std::move(c));
            obs_[p - 1][v] = it->second;
        }
    }

    std::uint64_t h = 1469598103934665603ULL;
    for (char c : dump())
        h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    hash_ = h;
}

bool MpgGame::in_coalition(PlayerId p) const
{
    return std::binary_search(coalition_.begin(), coalition_.end(), p);
}

std::optional<VertexId> MpgGame::find(const GameVertex& v) const
{
    return lookup(lookup_, vertices_, v);
}

ObsClass MpgGame::observation_class(VertexId v, PlayerId p) const
{
    if (p == 0 || p > num_players())
        throw ValidationError("unknown player " + std::to_string(p));
    if (v >= vertices_.size())
        throw ValidationError("unknown vertex " + std::to_string(v));
    const GameVertex& x = vertices_[v];
    ObsClass c;
    c.turn = x.turn;
    for (std::size_t i = 0; i < x.states.size(); ++i)
        if (visible_[p - 1][i] != 0)
            c.states.push_back(x.states[i]);
    if (sees_q_[p - 1] != 0)
        c.q = x.q;
    return c;
}

std::optional<std::uint32_t> MpgGame::find_obs(PlayerId p, const ObsClass& c) const
{
    const auto& classes = obs_classes_[p - 1];
    auto it = std::find(classes.begin(), classes.end(), c);
    if (it == classes.end())
        return std::nullopt;
    return static_cast<std::uint32_t>(it - classes.begin());
}

std::string MpgGame::dump() const
{
    std::ostringstream out;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
        out << "#" << v << " " << to_string(vertices_[v], *ks_) << " color " << color(v) << " p" << owner(v) << " ->";
        for (DirId d = 0; d < num_directions(); ++d)
            out << " " << ks_->directions()[d] << ":#" << next(v, d);
        out << "\n";
    }
    return out.str();
}

std::string MpgGame::hash_hex() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
}

Letter MpgGame::letter(const std::vector<StateId>& states) const
{
    Letter l = 0;
    for (std::size_t i = 0; i < letter_sources_.size(); ++i)
        if ((ks_->label(states[letter_sources_[i].first]) >> letter_sources_[i].second) & 1U)
            l |= Letter{1} << i;
    return l;
}

std::vector<IndexedAp> game_alphabet(const HyperLtlFormula& f)
{
    return indexed_aps(f.body);
}

TwoPlayerGame build_two_player_game(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a, Materialization m)
{
    if (f.size() != 2 || f.prefix[0].quantifier != Quantifier::Forall || f.prefix[1].quantifier != Quantifier::Exists)
        throw ValidationError("two-player game needs a prefix of the form forall p1. exists p2.");
    auto b = build_arena(ks, f, a, m);
    return TwoPlayerGame(std::move(b.arena), std::move(b.vertices));
}

MpgGame build_mpg(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a, const GameOptions& opts)
{
    auto b = build_arena(ks, f, a, opts.materialization);
    const std::size_t n = f.size();
    MpgGame::Parts parts;
    parts.ks = std::make_shared<const KripkeStructure>(ks);
    parts.formula = std::make_shared<const HyperLtlFormula>(f);
    parts.dpa = std::make_shared<const Dpa>(a);
    parts.arena = std::move(b.arena);
    parts.vertices = std::move(b.vertices);
    switch (opts.observation) {
    case ObservationKind::hierarchical:
        for (std::size_t p = 1; p <= n; ++p) {
            std::vector<char> row(n, 0);
            std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(p), 1);
            parts.visible.push_back(row);
        }
        parts.sees_q.assign(n, 0);
        break;
    case ObservationKind::full:
        parts.visible.assign(n, std::vector<char>(n, 1));
        parts.sees_q.assign(n, 1);
        break;
    case ObservationKind::custom:
        parts.visible = opts.visible;
        parts.sees_q = opts.sees_q;
        break;
    }
    return MpgGame(std::move(parts));
}

MpgGame build_full_info_game(const KripkeStructure& ks, const HyperLtlFormula& f, const Dpa& a, Materialization m)
{
    GameOptions opts;
    opts.materialization = m;
    opts.observation = ObservationKind::full;
    return build_mpg(ks, f, a, opts);
}

Observations observations_of(const MpgGame& g)
{
    Observations o;
    o.vertices = g.size();
    for (PlayerId p = 1; p <= g.num_players(); ++p) {
        std::vector<std::uint32_t> row(g.size());
        for (VertexId v = 0; v < g.size(); ++v)
            row[v] = g.obs_id(v, p);
        o.obs.push_back(std::move(row));
    }
    return o;
}

namespace
{

// Some pair u ~p v with u !~p2 v, if any.
std::optional<std::pair<VertexId, VertexId>> refinement_gap(const Observations& o, PlayerId p, PlayerId p2)
{
    std::unordered_map<std::uint32_t, VertexId> first;
    for (VertexId v = 0; v < o.vertices; ++v) {
        auto [it, fresh] = first.emplace(o.obs[p - 1][v], v);
        if (!fresh && o.obs[p2 - 1][it->second] != o.obs[p2 - 1][v])
            return std::make_pair(it->second, v);
    }
    return std::nullopt;
}

std::size_t class_count(const Observations& o, PlayerId p)
{
    std::vector<std::uint32_t> ids = o.obs[p - 1];
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

} // namespace

bool refines(const Observations& o, PlayerId p, PlayerId p2)
{
    return !refinement_gap(o, p, p2).has_value();
}

HierarchyResult is_hierarchical(const Observations& o)
{
    HierarchyResult r;
    const auto n = static_cast<PlayerId>(o.obs.size());
    std::vector<std::size_t> counts(n + 1, 0);
    for (PlayerId p = 1; p <= n; ++p) {
        r.order.push_back(p);
        counts[p] = class_count(o, p);
    }
    // A finer partition has at least as many classes, with equality only
    // for equal partitions; so any valid order sorts by class count.
    std::stable_sort(r.order.begin(), r.order.end(), [&](PlayerId a, PlayerId b) { return counts[a] < counts[b]; });
    for (std::size_t i = 0; i < r.order.size(); ++i)
        for (std::size_t j = i + 1; j < r.order.size(); ++j) {
            PlayerId lo = r.order[i], hi = r.order[j];
            auto gap = refinement_gap(o, hi, lo);
            if (!gap)
                continue;
            auto back = refinement_gap(o, lo, hi);
            HierarchyWitness w;
            w.p = hi;
            w.p2 = lo;
            w.u = gap->first;
            w.v = gap->second;
            if (back) {
                w.x = back->first;
                w.y = back->second;
            }
            r.witness = w;
            return r;
        }
    return r;
}

HierarchyResult is_hierarchical(const MpgGame& g)
{
    return is_hierarchical(observations_of(g));
}

std::string to_string(const GameVertex& v, const KripkeStructure& ks)
{
    std::string out = "<";
    for (std::size_t i = 0; i < v.states.size(); ++i)
        out += (i ? "," : "") + ks.state_names()[v.states[i]];
    return out + "|q" + std::to_string(v.q) + "|" + std::to_string(v.turn) + ">";
}

std::string to_string(const ObsClass& c, const KripkeStructure& ks)
{
    std::string out = "(";
    for (std::size_t i = 0; i < c.states.size(); ++i)
        out += (i ? "," : "") + ks.state_names()[c.states[i]];
    out += ")";
    if (c.q)
        out += " q" + std::to_string(*c.q);
    return out + " turn " + std::to_string(c.turn);
}

} // namespace hypergame
