#include "hypergame/service.hpp"

#include "hypergame/prophecy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hypergame
{

using nlohmann::json;

int SessionError::http_status() const
{
    switch (kind_) {
    case Kind::bad_input: return 400;
    case Kind::forbidden: return 403;
    case Kind::not_found: return 404;
    }
    return 500;
}

namespace
{

SessionError bad_input(const std::string& what) { return {SessionError::Kind::bad_input, what}; }
SessionError forbidden(const std::string& what) { return {SessionError::Kind::forbidden, what}; }

std::string read_fixture(const std::string& dir, const std::string& name)
{
    if (dir.empty())
        throw bad_input("this server has no fixture directory; send '" + name + "' inline");
    const bool plain = !name.empty() && name[0] != '.' &&
                       std::all_of(name.begin(), name.end(), [](char c) {
                           return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
                       });
    if (!plain)
        throw bad_input("fixture names may not contain paths: '" + name + "'");
    std::ifstream in(dir + "/" + name);
    if (!in)
        throw bad_input("no fixture named '" + name + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
T field(const json& body, const char* key, T fallback)
{
    if (!body.contains(key))
        return fallback;
    try {
        return body.at(key).get<T>();
    } catch (const json::exception&) {
        throw bad_input(std::string("field '") + key + "' has the wrong type");
    }
}

// Inline text under `key`, or the contents of the fixture named by `key_file`.
std::string text_field(const json& body, const std::string& key, const std::string& dir)
{
    const std::string file = key + "_file";
    if (body.contains(key) && body.contains(file))
        throw bad_input("give either '" + key + "' or '" + file + "'");
    if (body.contains(file))
        return read_fixture(dir, field<std::string>(body, file.c_str(), ""));
    return field<std::string>(body, key.c_str(), "");
}

} // namespace

SessionRequest SessionRequest::from_json(const json& body, const std::string& fixture_dir)
{
    if (!body.is_object())
        throw bad_input("request body must be a JSON object");
    SessionRequest r;
    r.ks = text_field(body, "ks", fixture_dir);
    r.formula = text_field(body, "formula", fixture_dir);
    r.prophecies = text_field(body, "prophecies", fixture_dir);
    r.certificate = text_field(body, "certificate", fixture_dir);
    if (r.ks.empty() || r.formula.empty())
        throw bad_input("'ks' and 'formula' are required");
    for (auto p : field<std::vector<int>>(body, "humans", {})) {
        if (p < 1)
            throw bad_input("players are numbered from 1");
        r.humans.insert(static_cast<PlayerId>(p));
    }
    r.opponent = field<std::string>(body, "opponent", r.opponent);
    r.assist = field<std::string>(body, "assist", r.assist);
    r.seed = field<std::uint64_t>(body, "seed", r.seed);
    r.horizon = field<std::size_t>(body, "horizon", r.horizon);
    return r;
}

Session::Session(std::string id, const SessionRequest& req)
    : id_(std::move(id)), humans_(req.humans), opponent_(req.opponent), assist_(req.assist), rng_(req.seed),
      horizon_(req.horizon)
{
    auto ks = parse_ks(req.ks);
    auto f = parse_hyperltl(req.formula);
    ProphecyFamily fam;
    if (!req.prophecies.empty()) {
        if (!is_strictly_alternating(f))
            f = normalize_alternating(f);
        fam = parse_prophecy_family(req.prophecies, f);
    }
    original_aps_ = ks.aps().size();
    game_ = std::make_shared<const MpgGame>(build_game(ks, f, fam));
    const auto& g = *game_;

    for (PlayerId p : humans_)
        if (p > g.num_players() || !g.in_coalition(p))
            throw bad_input("player " + std::to_string(p) + " is not an existential player of this game");
    if (opponent_ != "random" && opponent_ != "adversarial")
        throw bad_input("unknown opponent policy '" + opponent_ + "'");
    if (!assist_.empty() && assist_ != "random" && assist_ != "certificate")
        throw bad_input("unknown assist policy '" + assist_ + "'");
    if (horizon_ == 0)
        throw bad_input("horizon must be positive");

    if (!req.certificate.empty()) {
        profile_ = import_profile(req.certificate, g);
        for (const auto& ps : profile_->players)
            for (const auto& e : ps.entries) {
                ObsClass c;
                c.turn = ps.player;
                for (const auto& s : e.obs)
                    c.states.push_back(*g.ks().find_state(s));
                c.q = e.obs_q;
                if (auto o = g.find_obs(ps.player, c))
                    table_[{ps.player, e.memory, *o}] = {*g.ks().find_direction(e.direction), e.next};
            }
    } else if (assist_ == "certificate") {
        throw bad_input("the certificate policy needs a certificate");
    }
    if (opponent_ == "adversarial")
        adversary_ = solve_zielonka(g);

    current_ = g.initial();
    history_.push_back(current_);
    min_color_ = g.color(current_);
    advance();
}

void Session::check_human(PlayerId p) const
{
    if (p == 0 || p > game_->num_players())
        throw bad_input("unknown player " + std::to_string(p));
    if (humans_.count(p) == 0)
        throw forbidden("player " + std::to_string(p) + " is not played by a human in this session");
}

std::optional<std::pair<DirId, std::uint32_t>> Session::certificate_choice(PlayerId p) const
{
    auto m = memory_.find(p);
    const std::uint32_t mem = m == memory_.end() ? 0 : m->second;
    auto it = table_.find({p, mem, game_->obs_id(current_, p)});
    if (it == table_.end())
        return std::nullopt;
    return it->second;
}

DirId Session::engine_choice(PlayerId p, const std::string& policy)
{
    const auto& g = *game_;
    if (policy == "certificate") {
        if (auto c = certificate_choice(p))
            return c->first;
        throw bad_input("the certificate has no row for this observation");
    }
    if (policy == "adversarial" && adversary_ && adversary_->even_wins[current_] == 0)
        return adversary_->strategy[current_];
    return static_cast<DirId>(std::uniform_int_distribution<std::size_t>(0, g.num_directions() - 1)(rng_));
}

void Session::play(DirId d, bool human, bool engine)
{
    const auto& g = *game_;
    const PlayerId p = g.owner(current_);
    if (profile_ && g.in_coalition(p))
        if (auto c = certificate_choice(p))
            memory_[p] = c->second;
    rows_.push_back({rows_.size() / g.num_players() + 1, p, current_, d, human, engine});
    current_ = g.next(current_, d);
    history_.push_back(current_);
    min_color_ = std::min(min_color_, g.color(current_));
    if (rows_.size() >= horizon_)
        closed_ = true;
}

void Session::advance()
{
    const auto& g = *game_;
    while (!closed_) {
        const PlayerId p = g.owner(current_);
        if (humans_.count(p) != 0)
            return;
        std::string policy = opponent_;
        if (g.in_coalition(p))
            policy = profile_ && certificate_choice(p) ? "certificate" : "random";
        play(engine_choice(p, policy), false, false);
    }
}

json Session::copy_json(std::size_t copy, StateId s) const
{
    const auto& ks = game_->ks();
    json c;
    c["copy"] = copy + 1;
    c["var"] = game_->formula().prefix[copy].var;
    c["state"] = ks.state_names()[s];
    json labels = json::array(), prophecies = json::object();
    const Letter l = ks.label(s);
    for (std::size_t i = 0; i < ks.aps().size(); ++i) {
        const bool on = ((l >> i) & 1) != 0;
        if (i < original_aps_) {
            if (on)
                labels.push_back(ks.aps()[i]);
        } else {
            prophecies[ks.aps()[i]] = on;
        }
    }
    c["labels"] = labels;
    c["prophecies"] = prophecies;
    return c;
}

json Session::row_json(const TranscriptRow& r, bool full) const
{
    const auto& g = *game_;
    const auto& x = g.vertex(r.from);
    json j;
    j["round"] = r.round;
    j["player"] = r.player;
    j["direction"] = g.ks().directions()[r.direction];
    j["human"] = r.human;
    j["engine"] = r.engine;
    json seen = json::array();
    for (std::size_t i = 0; i < x.states.size(); ++i)
        if (full || g.sees(r.player, i))
            seen.push_back(g.ks().state_names()[x.states[i]]);
    j["observation"] = seen;
    if (full) {
        j["q"] = x.q;
        j["color"] = g.color(r.from);
    }
    return j;
}

json Session::view(PlayerId p) const
{
    check_human(p);
    const auto& g = *game_;
    const auto& x = g.vertex(current_);
    json v;
    v["player"] = p;
    v["round"] = rows_.size() / g.num_players() + 1;
    v["turn"] = x.turn;
    const bool mine = !closed_ && x.turn == p;
    v["your_turn"] = mine;
    v["closed"] = closed_;
    json copies = json::array();
    for (std::size_t i = 0; i < x.states.size(); ++i)
        if (g.sees(p, i))
            copies.push_back(copy_json(i, x.states[i]));
    v["copies"] = copies;
    json legal = json::array();
    if (mine)
        for (const auto& d : g.ks().directions())
            legal.push_back(d);
    v["legal"] = legal;
    json own = json::array();
    for (const auto& r : rows_)
        if (r.player == p)
            own.push_back(row_json(r, false));
    v["transcript"] = own;
    return v;
}

json Session::move(PlayerId p, const std::string& direction)
{
    check_human(p);
    if (closed_)
        throw forbidden("the session is closed");
    if (game_->owner(current_) != p)
        throw forbidden("not your turn");
    auto d = game_->ks().find_direction(direction);
    if (!d)
        throw bad_input("unknown direction '" + direction + "'");
    play(*d, true, false);
    advance();
    return {{"view", view(p)}, {"closed", closed_}};
}

json Session::auto_move(PlayerId p)
{
    check_human(p);
    if (closed_)
        throw forbidden("the session is closed");
    if (game_->owner(current_) != p)
        throw forbidden("not your turn");
    if (assist_.empty())
        throw bad_input("no assist policy configured for this session");
    play(engine_choice(p, assist_), true, true);
    advance();
    return {{"view", view(p)}, {"closed", closed_}};
}

std::optional<std::pair<std::size_t, unsigned>> Session::final_cycle() const
{
    for (std::size_t j = history_.size() - 1; j-- > 0;)
        if (history_[j] == current_) {
            unsigned c = game_->color(history_[j]);
            for (std::size_t k = j; k + 1 < history_.size(); ++k)
                c = std::min(c, game_->color(history_[k]));
            return std::pair{history_.size() - 1 - j, c};
        }
    return std::nullopt;
}

json Session::transcript_json(std::optional<PlayerId> p) const
{
    json t;
    json rows = json::array();
    if (p) {
        check_human(*p);
        t["player"] = *p;
        for (const auto& r : rows_)
            if (r.player == *p)
                rows.push_back(row_json(r, false));
        t["rows"] = rows;
        return t;
    }
    if (!closed_)
        throw forbidden("the full transcript is hidden until the play is over");
    for (const auto& r : rows_)
        rows.push_back(row_json(r, true));
    t["rows"] = rows;
    t["final"] = to_string(game_->vertex(current_), game_->ks());
    t["dominant_color_so_far"] = min_color_;
    if (auto c = final_cycle())
        t["cycle"] = {{"length", c->first}, {"dominant_color", c->second}, {"coalition_wins", c->second % 2 == 0}};
    else
        t["cycle"] = nullptr;
    return t;
}

json Session::summary() const
{
    const auto& g = *game_;
    json s;
    s["id"] = id_;
    s["players"] = g.num_players();
    s["coalition"] = g.coalition();
    s["humans"] = humans_;
    s["directions"] = g.ks().directions();
    json vars = json::array();
    for (const auto& q : g.formula().prefix)
        vars.push_back(q.var);
    s["vars"] = vars;
    s["horizon"] = horizon_;
    s["game"] = g.hash_hex();
    return s;
}

json SessionManager::create(const json& body)
{
    return create(SessionRequest::from_json(body, fixture_dir_));
}

json SessionManager::create(const SessionRequest& req)
{
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "s" + std::to_string(next_id_++);
    }
    std::shared_ptr<Session> s;
    try {
        s = std::make_shared<Session>(id, req);
    } catch (const SessionError&) {
        throw;
    } catch (const Error& e) {
        throw bad_input(e.what());
    }
    json out = s->summary();
    json views = json::object();
    for (PlayerId p : s->humans())
        views[std::to_string(p)] = s->view(p);
    out["views"] = views;
    std::lock_guard lock(mutex_);
    sessions_[id] = std::move(s);
    return out;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end())
        throw SessionError(SessionError::Kind::not_found, "no session '" + id + "'");
    return it->second;
}

std::size_t SessionManager::size() const
{
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

} // namespace hypergame
