#include "hypergame/service.hpp"

#include <httplib.h>

namespace hypergame
{

using nlohmann::json;

struct Server::Impl
{
    SessionManager& sessions;
    httplib::Server http;

    explicit Impl(SessionManager& s) : sessions(s) {}
};

namespace
{

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f)
{
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            reply(res, 200, f(req));
        } catch (const SessionError& e) {
            reply(res, e.http_status(), {{"error", e.what()}});
        } catch (const json::exception& e) {
            reply(res, 400, {{"error", std::string("malformed JSON: ") + e.what()}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", e.what()}});
        }
    };
}

PlayerId player_number(const json& j)
{
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw SessionError(SessionError::Kind::bad_input, "'player' must be a positive integer");
    return static_cast<PlayerId>(j.get<long long>());
}

PlayerId player_param(const httplib::Request& req)
{
    if (!req.has_param("player"))
        throw SessionError(SessionError::Kind::bad_input, "missing query parameter 'player'");
    const std::string p = req.get_param_value("player");
    if (p.empty() || p.size() > 6 || p.find_first_not_of("0123456789") != std::string::npos)
        throw SessionError(SessionError::Kind::bad_input, "'player' must be a positive integer");
    return player_number(json(std::stoll(p)));
}

json body_of(const httplib::Request& req)
{
    auto b = json::parse(req.body);
    if (!b.is_object())
        throw SessionError(SessionError::Kind::bad_input, "request body must be a JSON object");
    return b;
}

} // namespace

Server::Server(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions))
{
    auto& http = impl_->http;
    auto& m = impl_->sessions;

    http.Get("/healthz", guarded([](const httplib::Request&) { return json{{"status", "ok"}}; }));

    http.Post("/sessions", guarded([&m](const httplib::Request& req) { return m.create(body_of(req)); }));

    http.Get(R"(/sessions/([^/]+))", guarded([&m](const httplib::Request& req) {
                 auto s = m.get(req.matches[1]);
                 std::lock_guard lock(s->mutex);
                 return s->summary();
             }));

    http.Get(R"(/sessions/([^/]+)/view)", guarded([&m](const httplib::Request& req) {
                 auto s = m.get(req.matches[1]);
                 const PlayerId p = player_param(req);
                 std::lock_guard lock(s->mutex);
                 return s->view(p);
             }));

    http.Post(R"(/sessions/([^/]+)/move)", guarded([&m](const httplib::Request& req) {
                  auto s = m.get(req.matches[1]);
                  const auto b = body_of(req);
                  if (!b.contains("direction") || !b["direction"].is_string())
                      throw SessionError(SessionError::Kind::bad_input, "'direction' must be a string");
                  const PlayerId p = player_number(b.value("player", json()));
                  std::lock_guard lock(s->mutex);
                  return s->move(p, b["direction"].get<std::string>());
              }));

    http.Post(R"(/sessions/([^/]+)/auto)", guarded([&m](const httplib::Request& req) {
                  auto s = m.get(req.matches[1]);
                  const PlayerId p = player_number(body_of(req).value("player", json()));
                  std::lock_guard lock(s->mutex);
                  return s->auto_move(p);
              }));

    http.Get(R"(/sessions/([^/]+)/transcript)", guarded([&m](const httplib::Request& req) {
                 auto s = m.get(req.matches[1]);
                 std::optional<PlayerId> p;
                 if (req.has_param("player"))
                     p = player_param(req);
                 std::lock_guard lock(s->mutex);
                 return s->transcript_json(p);
             }));
}

Server::~Server() = default;

int Server::bind(const std::string& host, int port)
{
    if (port == 0) {
        const int chosen = impl_->http.bind_to_any_port(host);
        if (chosen <= 0)
            throw Error("cannot bind to " + host);
        return chosen;
    }
    if (!impl_->http.bind_to_port(host, port))
        throw Error("cannot bind to " + host + ":" + std::to_string(port));
    return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

} // namespace hypergame
