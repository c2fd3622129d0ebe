#pragma once

#include "hypergame/arena.hpp"
#include "hypergame/certificate.hpp"
#include "hypergame/error.hpp"
#include "hypergame/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace hypergame
{

// Errors of the session layer, mapped to HTTP 400 / 403 / 404.
class SessionError : public Error
{
public:
    enum class Kind
    {
        bad_input,
        forbidden,
        not_found
    };
    SessionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int http_status() const;

private:
    Kind kind_;
};

struct SessionRequest
{
    std::string ks;         // structure text
    std::string formula;    // formula text
    std::string prophecies; // prophecy file text, may be empty
    std::set<PlayerId> humans;
    std::string opponent = "random"; // universal players: random | adversarial
    std::string assist;              // auto moves for humans: "" | random | certificate
    std::string certificate;         // profile text, drives non-human coalition players
    std::uint64_t seed = 1;
    std::size_t horizon = 200; // plies before the play is cut off

    // Fields of a POST /sessions body; files named in it are read from
    // fixture_dir, which must be set for that.
    static SessionRequest from_json(const nlohmann::json& body, const std::string& fixture_dir = {});
};

struct TranscriptRow
{
    std::size_t round = 0;
    PlayerId player = 0;
    VertexId from = 0;
    DirId direction = 0;
    bool human = false;
    bool engine = false; // chosen by the engine on a human's request
};

class Session
{
public:
    Session(std::string id, const SessionRequest& req);

    [[nodiscard]] const std::string& id() const { return id_; }
    [[nodiscard]] const MpgGame& game() const { return *game_; }
    [[nodiscard]] VertexId current() const { return current_; }
    [[nodiscard]] bool closed() const { return closed_; }
    [[nodiscard]] const std::vector<TranscriptRow>& transcript() const { return rows_; }
    [[nodiscard]] const std::set<PlayerId>& humans() const { return humans_; }
    // minimum colour over the play so far
    [[nodiscard]] unsigned dominant_color_so_far() const { return min_color_; }

    // Only what player p may know: its observation, its legal moves, the
    // round, its own rows and the prophecy values of copies it sees.
    [[nodiscard]] nlohmann::json view(PlayerId p) const;
    nlohmann::json move(PlayerId p, const std::string& direction);
    nlohmann::json auto_move(PlayerId p);
    // Rows of player p, or the whole play with automaton states once closed.
    [[nodiscard]] nlohmann::json transcript_json(std::optional<PlayerId> p) const;
    [[nodiscard]] nlohmann::json summary() const;

    std::mutex mutex; // serializes requests on this session

private:
    void check_human(PlayerId p) const;
    void play(DirId d, bool human, bool engine);
    void advance();
    DirId engine_choice(PlayerId p, const std::string& policy);
    [[nodiscard]] std::optional<std::pair<DirId, std::uint32_t>> certificate_choice(PlayerId p) const;
    [[nodiscard]] nlohmann::json copy_json(std::size_t copy, StateId s) const;
    [[nodiscard]] nlohmann::json row_json(const TranscriptRow& r, bool full) const;
    [[nodiscard]] std::optional<std::pair<std::size_t, unsigned>> final_cycle() const;

    std::string id_;
    std::shared_ptr<const MpgGame> game_;
    std::size_t original_aps_ = 0;
    std::set<PlayerId> humans_;
    std::string opponent_, assist_;
    std::optional<StrategyProfile> profile_;
    // (player, memory, obs id) -> (direction, next memory)
    std::map<std::tuple<PlayerId, std::uint32_t, std::uint32_t>, std::pair<DirId, std::uint32_t>> table_;
    std::map<PlayerId, std::uint32_t> memory_;
    std::optional<ParitySolution> adversary_;
    std::mt19937_64 rng_;
    std::size_t horizon_;
    VertexId current_ = 0;
    std::vector<VertexId> history_;
    std::vector<TranscriptRow> rows_;
    unsigned min_color_ = 0;
    bool closed_ = false;
};

class SessionManager
{
public:
    explicit SessionManager(std::string fixture_dir = {}) : fixture_dir_(std::move(fixture_dir)) {}

    // Returns {"id", "players", "coalition", "humans", "views": {p: view}}.
    nlohmann::json create(const nlohmann::json& body);
    nlohmann::json create(const SessionRequest& req);
    // Throws SessionError(not_found).
    std::shared_ptr<Session> get(const std::string& id) const;
    [[nodiscard]] std::size_t size() const;

private:
    std::string fixture_dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

// HTTP front end. Endpoints: GET /healthz, POST /sessions,
// GET /sessions/{id}/view?player=p, POST /sessions/{id}/move,
// POST /sessions/{id}/auto, GET /sessions/{id}/transcript[?player=p].
class Server
{
public:
    explicit Server(SessionManager& sessions);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Returns the bound port (an ephemeral one for port 0); throws Error when
    // the address cannot be bound.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace hypergame
