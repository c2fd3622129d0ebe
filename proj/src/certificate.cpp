#include "hypergame/certificate.hpp"

#include "detail/graph.hpp"
#include "hypergame/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hypergame
{

namespace
{

constexpr std::size_t product_cap = 20000000;

auto entry_key(const StrategyEntry& e)
{
    return std::tie(e.memory, e.obs, e.obs_q);
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string obs_text(const StrategyEntry& e)
{
    std::string out = "(";
    for (const auto& s : e.obs)
        out += " " + s;
    if (e.obs_q)
        out += " q:" + std::to_string(*e.obs_q);
    return out + " )";
}

std::uint32_t parse_uint(const std::string& tok, std::size_t line, const char* what)
{
    try {
        std::size_t used = 0;
        unsigned long v = std::stoul(tok, &used);
        if (used == tok.size() && v <= 0xffffffffUL)
            return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
    }
    throw ParseError(std::string("expected ") + what + ", got '" + tok + "'", line, 1);
}

// Dense lookup of a player's table by (memory, observation id).
struct Table
{
    PlayerId player = 0;
    std::uint32_t memory_size = 1;
    std::size_t num_obs = 0;
    std::vector<std::int64_t> cell; // dir * 2^32 + next, or -1

    [[nodiscard]] std::int64_t at(std::uint32_t m, std::uint32_t obs) const { return cell[m * num_obs + obs]; }
};

std::vector<Table> build_tables(const MpgGame& g, const StrategyProfile& sp)
{
    std::vector<Table> out;
    for (const auto& ps : sp.players) {
        const PlayerId p = ps.player;
        std::map<ObsClass, std::uint32_t> ids;
        for (std::uint32_t i = 0; i < g.num_obs(p); ++i)
            ids.emplace(g.obs_class(p, i), i);
        Table t;
        t.player = p;
        t.memory_size = ps.memory_size;
        t.num_obs = g.num_obs(p);
        t.cell.assign(std::size_t{ps.memory_size} * t.num_obs, -1);
        for (const auto& e : ps.entries) {
            ObsClass c;
            c.turn = p;
            for (const auto& name : e.obs) {
                auto s = g.ks().find_state(name);
                if (!s)
                    throw ValidationError("player " + std::to_string(p) + ": unknown state " + name);
                c.states.push_back(*s);
            }
            c.q = e.obs_q;
            auto it = ids.find(c);
            if (it == ids.end())
                throw ValidationError("player " + std::to_string(p) + ": observation " + obs_text(e) +
                                      " does not occur in the game");
            auto d = g.ks().find_direction(e.direction);
            if (!d)
                throw ValidationError("player " + std::to_string(p) + ": unknown direction " + e.direction);
            if (e.memory >= ps.memory_size || e.next >= ps.memory_size)
                throw ValidationError("player " + std::to_string(p) + ": memory state out of range");
            auto& cell = t.cell[std::size_t{e.memory} * t.num_obs + it->second];
            if (cell != -1)
                throw ValidationError("player " + std::to_string(p) + ": duplicate row for memory " +
                                      std::to_string(e.memory) + " " + obs_text(e));
            cell = (static_cast<std::int64_t>(*d) << 32) | e.next;
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace

void canonicalize(StrategyProfile& sp)
{
    for (auto& ps : sp.players)
        std::sort(ps.entries.begin(), ps.entries.end(),
                  [](const StrategyEntry& a, const StrategyEntry& b) { return entry_key(a) < entry_key(b); });
    std::sort(sp.players.begin(), sp.players.end(),
              [](const PlayerStrategy& a, const PlayerStrategy& b) { return a.player < b.player; });
}

std::string export_profile(const StrategyProfile& sp)
{
    StrategyProfile c = sp;
    canonicalize(c);
    std::ostringstream out;
    out << "hypergame-certificate " << certificate_format_version << "\n";
    out << "game " << c.game_hash << "\n";
    out << "formula " << c.formula << "\n";
    for (const auto& m : c.manifest)
        out << m << "\n";
    for (const auto& ps : c.players) {
        out << "player " << ps.player << " memory " << ps.memory_size << "\n";
        for (const auto& e : ps.entries)
            out << "m " << e.memory << " obs " << obs_text(e) << " -> " << e.direction << " " << e.next << "\n";
    }
    out << "end\n";
    return out.str();
}

StrategyProfile parse_profile(std::string_view text)
{
    StrategyProfile sp;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    enum class Stage
    {
        version,
        game,
        formula,
        body,
        done
    } stage = Stage::version;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty())
            continue;
        std::istringstream toks(s);
        std::string kw;
        toks >> kw;
        switch (stage) {
        case Stage::version: {
            std::string v;
            toks >> v;
            if (kw != "hypergame-certificate")
                throw ParseError("not a certificate", line, 1);
            if (v != std::to_string(certificate_format_version))
                throw ParseError("unsupported certificate version '" + v + "'", line, 1);
            stage = Stage::game;
            break;
        }
        case Stage::game:
            if (kw != "game" || !(toks >> sp.game_hash))
                throw ParseError("expected 'game <hash>'", line, 1);
            stage = Stage::formula;
            break;
        case Stage::formula:
            if (kw != "formula")
                throw ParseError("expected 'formula <text>'", line, 1);
            sp.formula = trim(s.substr(7));
            stage = Stage::body;
            break;
        case Stage::body:
            if (kw == "prophecy") {
                if (!sp.players.empty())
                    throw ParseError("prophecy lines must precede the strategy tables", line, 1);
                sp.manifest.push_back(s);
            } else if (kw == "player") {
                PlayerStrategy ps;
                std::string p, mkw, m;
                toks >> p >> mkw >> m;
                if (mkw != "memory")
                    throw ParseError("expected 'player <n> memory <k>'", line, 1);
                ps.player = parse_uint(p, line, "a player number");
                ps.memory_size = parse_uint(m, line, "a memory size");
                if (ps.memory_size == 0)
                    throw ParseError("memory size must be positive", line, 1);
                sp.players.push_back(std::move(ps));
            } else if (kw == "m") {
                if (sp.players.empty())
                    throw ParseError("row before any 'player' line", line, 1);
                StrategyEntry e;
                std::string tok;
                toks >> tok;
                e.memory = parse_uint(tok, line, "a memory state");
                toks >> tok;
                if (tok != "obs")
                    throw ParseError("expected 'obs'", line, 1);
                toks >> tok;
                if (tok != "(")
                    throw ParseError("expected '('", line, 1);
                while (toks >> tok && tok != ")") {
                    if (tok.rfind("q:", 0) == 0)
                        e.obs_q = parse_uint(tok.substr(2), line, "an automaton state");
                    else
                        e.obs.push_back(tok);
                }
                if (tok != ")")
                    throw ParseError("unterminated observation", line, 1);
                toks >> tok;
                if (tok != "->")
                    throw ParseError("expected '->'", line, 1);
                if (!(toks >> e.direction))
                    throw ParseError("expected a direction", line, 1);
                if (!(toks >> tok))
                    throw ParseError("expected a memory state", line, 1);
                e.next = parse_uint(tok, line, "a memory state");
                if (toks >> tok)
                    throw ParseError("trailing text '" + tok + "'", line, 1);
                sp.players.back().entries.push_back(std::move(e));
            } else if (kw == "end") {
                stage = Stage::done;
            } else {
                throw ParseError("unexpected '" + kw + "'", line, 1);
            }
            break;
        case Stage::done:
            throw ParseError("text after 'end'", line, 1);
        }
    }
    if (stage != Stage::done)
        throw ParseError("truncated certificate", line, 1);
    canonicalize(sp);
    return sp;
}

void validate_profile(const StrategyProfile& sp, const MpgGame& g)
{
    if (sp.game_hash != g.hash_hex())
        throw ValidationError("certificate is for game " + sp.game_hash + ", not " + g.hash_hex());
    std::vector<PlayerId> players;
    for (const auto& ps : sp.players)
        players.push_back(ps.player);
    if (players != g.coalition())
        throw ValidationError("certificate does not cover exactly the existential players");
    build_tables(g, sp);
}

StrategyProfile import_profile(std::string_view text, const MpgGame& g)
{
    auto sp = parse_profile(text);
    validate_profile(sp, g);
    return sp;
}

CheckResult check_profile(const MpgGame& g, const StrategyProfile& sp)
{
    validate_profile(sp, g);
    const auto tables = build_tables(g, sp);
    std::vector<int> table_of(g.num_players() + 1, -1);
    std::vector<std::uint64_t> radix(tables.size());
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        table_of[tables[i].player] = static_cast<int>(i);
        radix[i] = combos;
        combos *= tables[i].memory_size;
    }

    // product nodes: (vertex, memory of each coalition player)
    std::unordered_map<std::uint64_t, std::uint32_t> id;
    std::vector<std::uint64_t> code;
    std::vector<std::uint32_t> parent;
    detail::Adjacency succ;
    auto intern = [&](std::uint64_t c, std::uint32_t from) {
        auto [it, fresh] = id.emplace(c, static_cast<std::uint32_t>(code.size()));
        if (fresh) {
            if (code.size() >= product_cap)
                throw ResourceError("product graph exceeds " + std::to_string(product_cap) + " nodes");
            code.push_back(c);
            parent.push_back(from);
            succ.emplace_back();
        }
        return it->second;
    };
    auto vertex_of = [&](std::uint32_t x) { return static_cast<VertexId>(code[x] / combos); };
    auto path_to = [&](std::uint32_t x) {
        std::vector<VertexId> path;
        for (std::uint32_t y = x;; y = parent[y]) {
            path.push_back(vertex_of(y));
            if (parent[y] == y)
                break;
        }
        std::reverse(path.begin(), path.end());
        return path;
    };

    intern(std::uint64_t{g.initial()} * combos, 0);
    for (std::uint32_t x = 0; x < code.size(); ++x) {
        const VertexId v = vertex_of(x);
        const std::uint64_t mem = code[x] % combos;
        const PlayerId p = g.owner(v);
        if (table_of[p] < 0) {
            for (DirId d = 0; d < g.num_directions(); ++d) {
                const std::uint32_t y = intern(std::uint64_t{g.next(v, d)} * combos + mem, x);
                succ[x].push_back(y);
            }
        } else {
            const auto ti = static_cast<std::size_t>(table_of[p]);
            const Table& t = tables[ti];
            const auto m = static_cast<std::uint32_t>((mem / radix[ti]) % t.memory_size);
            const std::int64_t cell = t.at(m, g.obs_id(v, p));
            if (cell < 0) {
                CheckResult r;
                r.status = CheckResult::Status::coverage_gap;
                r.stem = path_to(x);
                r.diagnostic = "player " + std::to_string(p) + " has no row for memory " + std::to_string(m) +
                               " and observation " + to_string(g.observation_class(v, p), g.ks()) +
                               ", reached at " + to_string(g.vertex(v), g.ks());
                return r;
            }
            const auto d = static_cast<DirId>(cell >> 32);
            const auto next = static_cast<std::uint64_t>(cell & 0xffffffff);
            const std::uint64_t mem2 = mem + (next - m) * radix[ti];
            const std::uint32_t y = intern(std::uint64_t{g.next(v, d)} * combos + mem2, x);
            succ[x].push_back(y);
        }
    }
    parent[0] = 0;

    std::set<unsigned> odd;
    for (std::uint32_t x = 0; x < code.size(); ++x)
        if (g.color(vertex_of(x)) % 2 == 1)
            odd.insert(g.color(vertex_of(x)));
    for (unsigned c : odd) {
        std::vector<char> alive(code.size());
        for (std::uint32_t x = 0; x < code.size(); ++x)
            alive[x] = g.color(vertex_of(x)) >= c ? 1 : 0;
        auto scc = detail::tarjan(succ, &alive);
        for (std::uint32_t x = 0; x < code.size(); ++x) {
            if (alive[x] == 0 || g.color(vertex_of(x)) != c || scc.cyclic[scc.component[x]] == 0)
                continue;
            // shortest way back to x inside its component
            const auto comp = scc.component[x];
            std::unordered_map<std::uint32_t, std::uint32_t> back;
            std::deque<std::uint32_t> queue{x};
            back[x] = x;
            std::uint32_t last = x;
            bool closed = false;
            while (!queue.empty() && !closed) {
                auto y = queue.front();
                queue.pop_front();
                for (auto z : succ[y]) {
                    if (alive[z] == 0 || scc.component[z] != comp)
                        continue;
                    if (z == x) {
                        last = y;
                        closed = true;
                        break;
                    }
                    if (back.emplace(z, y).second)
                        queue.push_back(z);
                }
            }
            CheckResult r;
            r.status = CheckResult::Status::losing_cycle;
            r.stem = path_to(x);
            for (std::uint32_t y = last;; y = back[y]) {
                r.cycle.push_back(vertex_of(y));
                if (y == x)
                    break;
            }
            std::reverse(r.cycle.begin(), r.cycle.end());
            r.stem.pop_back();
            r.diagnostic = "the opponents can force a cycle of minimum colour " + std::to_string(c) + " through " +
                           to_string(g.vertex(vertex_of(x)), g.ks()) + " after " + std::to_string(r.stem.size()) +
                           " moves";
            return r;
        }
    }
    return {};
}

MpgGame build_game(const KripkeStructure& ks, const HyperLtlFormula& f, const ProphecyFamily& fam)
{
    if (fam.empty()) {
        Dpa a = ltl_to_dpa(f.body, game_alphabet(f));
        return build_mpg(ks, f, a);
    }
    KripkeStructure kp = extend_ks(ks, fam);
    HyperLtlFormula fp = rewrite_formula(f, fam);
    Dpa a = ltl_to_dpa(fp.body, game_alphabet(fp));
    return build_mpg(kp, fp, a);
}

} // namespace hypergame
