#include "envforge/service.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>
#include <vector>

#include "envforge/episode.hpp"
#include "envforge/error.hpp"
#include "envforge/trajectory_io.hpp"

namespace envforge::service {

using nlohmann::json;
using nlohmann::ordered_json;

struct Server::Session {
    std::mutex mutex;
    Episode episode;

    Session(EnvId id, std::uint64_t seed, EpisodeConfig cfg, std::optional<AugmentSpec> aug)
        : episode(id, seed, cfg, aug) {}
};

namespace {

ordered_json error_response(const json& id, std::string_view code, const std::string& message) {
    ordered_json r;
    r["id"] = id;
    r["ok"] = false;
    r["error"] = {{"code", std::string(code)}, {"message", message}};
    return r;
}

ordered_json admissible_json(const Observation& obs) {
    ordered_json a = ordered_json::array();
    for (const auto& s : obs.admissible_actions) {
        a.push_back(s);
    }
    return a;
}

std::string require_string(const json& request, const char* key) {
    const auto it = request.find(key);
    if (it == request.end() || !it->is_string()) {
        throw Error(ErrorCode::BadRequest, std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

EpisodeConfig apply_overrides(EpisodeConfig cfg, const json& overrides) {
    if (!overrides.is_object()) {
        throw Error(ErrorCode::BadConfig, "config must be an object");
    }
    try {
        cfg.max_steps = overrides.value("max_steps", cfg.max_steps);
        cfg.success_reward = overrides.value("success_reward", cfg.success_reward);
        cfg.failure_reward = overrides.value("failure_reward", cfg.failure_reward);
        cfg.invalid_penalty = overrides.value("invalid_penalty", cfg.invalid_penalty);
        cfg.thinking_required = overrides.value("thinking_required", cfg.thinking_required);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadConfig, std::string("bad config field: ") + e.what());
    }
    return cfg;
}

}  // namespace

double wire_float(double x) {
    if (!std::isfinite(x) || x == 0.0) {
        return x == 0.0 ? 0.0 : x;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    double out = 0.0;
    std::from_chars(buf, buf + std::strlen(buf), out);
    return out;
}

ordered_json round_floats(const ordered_json& j) {
    if (j.is_number_float()) {
        return wire_float(j.get<double>());
    }
    if (j.is_array() || j.is_object()) {
        ordered_json out = j;
        for (auto& v : out) {
            v = round_floats(v);
        }
        return out;
    }
    return j;
}

Server::Server(ServerOptions options) : options_(options) {}

Server::~Server() = default;

std::size_t Server::live_sessions() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
}

std::string Server::handle_line(std::string_view line) {
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_response(nullptr, to_string(ErrorCode::BadRequest),
                              std::string("malformed JSON: ") + e.what())
            .dump();
    }
    if (!request.is_object()) {
        return error_response(nullptr, to_string(ErrorCode::BadRequest), "request must be an object")
            .dump();
    }
    const json id = request.contains("id") ? request.at("id") : json(nullptr);
    try {
        ordered_json r;
        r["id"] = id;
        r["ok"] = true;
        r["payload"] = round_floats(dispatch(request));
        return r.dump();
    } catch (const Error& e) {
        return error_response(id, to_string(e.code()), e.what()).dump();
    } catch (const std::exception& e) {
        return error_response(id, to_string(ErrorCode::BadRequest), e.what()).dump();
    }
}

ordered_json Server::dispatch(const json& request) {
    const std::string op = require_string(request, "op");
    if (op == "spec") return op_spec();
    if (op == "reset") return op_reset(request);
    if (op == "step") return op_step(request);
    if (op == "close") return op_close(request);
    throw Error(ErrorCode::BadRequest, "unknown op '" + op + "'");
}

ordered_json Server::op_spec() const {
    ordered_json envs = ordered_json::array();
    for (const auto id : {EnvId::sokoban, EnvId::house, EnvId::shop}) {
        ordered_json e;
        e["env"] = std::string(to_string(id));
        e["config"] = config_to_json(default_config(id));
        envs.push_back(std::move(e));
    }
    ordered_json p;
    p["protocol_version"] = std::string(kProtocolVersion);
    p["version"] = ENVFORGE_VERSION;
    p["envs"] = std::move(envs);
    p["max_sessions"] = options_.max_sessions;
    return p;
}

ordered_json Server::op_reset(const json& request) {
    const EnvId env = env_id_from_string(require_string(request, "env"));
    std::uint64_t seed = options_.default_seed;
    if (request.contains("seed")) {
        if (!request.at("seed").is_number_unsigned()) {
            throw Error(ErrorCode::BadConfig, "seed must be a non-negative integer");
        }
        seed = request.at("seed").get<std::uint64_t>();
    }
    EpisodeConfig cfg = default_config(env);
    if (request.contains("config") && !request.at("config").is_null()) {
        cfg = apply_overrides(cfg, request.at("config"));
    }
    if (request.contains("thinking")) {
        if (!request.at("thinking").is_boolean()) {
            throw Error(ErrorCode::BadConfig, "thinking must be a boolean");
        }
        cfg.thinking_required = request.at("thinking").get<bool>();
    }
    std::optional<AugmentSpec> augment;
    if (request.contains("augment") && !request.at("augment").is_null()) {
        if (!request.at("augment").is_object()) {
            throw Error(ErrorCode::BadConfig, "augment must be an object or null");
        }
        try {
            augment = augment_from_json(request.at("augment"));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::BadConfig, std::string("bad augment field: ") + e.what());
        }
    }

    {
        std::lock_guard lock(registry_mutex_);
        if (sessions_.size() >= options_.max_sessions) {
            throw Error(ErrorCode::Busy, "session limit reached");
        }
    }
    // Generation happens outside the registry lock.
    auto session = std::make_shared<Session>(env, seed, cfg, augment);
    std::string name;
    {
        std::lock_guard lock(registry_mutex_);
        if (sessions_.size() >= options_.max_sessions) {
            throw Error(ErrorCode::Busy, "session limit reached");
        }
        name = "s" + std::to_string(next_session_++);
        sessions_.emplace(name, session);
    }
    const Observation& obs = session->episode.observation();
    ordered_json p;
    p["session"] = name;
    p["task"] = obs.task;
    p["observation"] = obs.text;
    p["admissible_actions"] = admissible_json(obs);
    return p;
}

std::shared_ptr<Server::Session> Server::find_session(const json& request) const {
    const std::string name = require_string(request, "session");
    std::lock_guard lock(registry_mutex_);
    const auto it = sessions_.find(name);
    if (it == sessions_.end()) {
        throw Error(ErrorCode::UnknownSession, "no session '" + name + "'");
    }
    return it->second;
}

ordered_json Server::op_step(const json& request) {
    const auto session = find_session(request);
    const std::string response = require_string(request, "response");
    std::lock_guard lock(session->mutex);
    const StepRecord& rec = session->episode.step(response);
    const Observation& next = session->episode.observation();
    ordered_json p;
    p["observation"] = next.text;
    p["reward"] = rec.reward;
    p["done"] = rec.done;
    p["truncated"] = rec.truncated;
    p["parsed_action"] = rec.parsed_action ? ordered_json(*rec.parsed_action) : ordered_json(nullptr);
    p["invalid"] = rec.invalid;
    p["admissible_actions"] = admissible_json(next);
    return p;
}

ordered_json Server::op_close(const json& request) {
    const auto session = find_session(request);
    const std::string name = require_string(request, "session");
    {
        std::lock_guard lock(registry_mutex_);
        sessions_.erase(name);
    }
    std::lock_guard lock(session->mutex);
    ordered_json p;
    p["session"] = name;
    p["trajectory"] = trajectory_to_json(session->episode.trajectory());
    return p;
}

void Server::serve_stream(std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        out << handle_line(line) << '\n' << std::flush;
    }
}

namespace {

bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

void Server::serve_tcp(const std::string& host, std::uint16_t port,
                       const std::function<void(std::uint16_t)>& on_listening,
                       const std::atomic<bool>& stop) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string port_text = std::to_string(port);
    if (::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res) != 0 || !res) {
        throw Error(ErrorCode::BadConfig, "cannot resolve host '" + host + "'");
    }
    const int listener = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (listener < 0) {
        ::freeaddrinfo(res);
        throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    }
    const int yes = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    if (::bind(listener, res->ai_addr, res->ai_addrlen) != 0 || ::listen(listener, 64) != 0) {
        const std::string why = std::strerror(errno);
        ::freeaddrinfo(res);
        ::close(listener);
        throw std::runtime_error("bind/listen: " + why);
    }
    ::freeaddrinfo(res);

    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&bound), &len);
    if (on_listening) {
        on_listening(ntohs(bound.sin_port));
    }

    std::vector<std::thread> workers;
    while (!stop.load()) {
        pollfd pfd{listener, POLLIN, 0};
        if (::poll(&pfd, 1, 100) <= 0) {
            continue;
        }
        const int fd = ::accept(listener, nullptr, nullptr);
        if (fd < 0) {
            continue;
        }
        workers.emplace_back([this, fd, &stop] {
            std::string buffer;
            char chunk[4096];
            while (!stop.load()) {
                pollfd cfd{fd, POLLIN, 0};
                const int ready = ::poll(&cfd, 1, 100);
                if (ready == 0) {
                    continue;
                }
                if (ready < 0) {
                    break;
                }
                const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
                if (n <= 0) {
                    break;
                }
                buffer.append(chunk, static_cast<std::size_t>(n));
                std::size_t nl;
                bool alive = true;
                while (alive && (nl = buffer.find('\n')) != std::string::npos) {
                    std::string line = buffer.substr(0, nl);
                    buffer.erase(0, nl + 1);
                    if (!line.empty() && line.back() == '\r') {
                        line.pop_back();
                    }
                    if (!line.empty()) {
                        alive = send_all(fd, handle_line(line) + "\n");
                    }
                }
                if (!alive) {
                    break;
                }
            }
            ::close(fd);
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    ::close(listener);
}

std::pair<std::string, std::uint16_t> parse_tcp_address(std::string_view transport) {
    constexpr std::string_view kPrefix = "tcp:";
    if (transport.substr(0, kPrefix.size()) != kPrefix) {
        throw Error(ErrorCode::BadConfig, "transport must be stdio or tcp:HOST:PORT");
    }
    const std::string_view rest = transport.substr(kPrefix.size());
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw Error(ErrorCode::BadConfig, "transport must be tcp:HOST:PORT");
    }
    unsigned port = 0;
    const auto port_text = rest.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
        throw Error(ErrorCode::BadConfig, "bad port in '" + std::string(transport) + "'");
    }
    return {std::string(rest.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

}  // namespace envforge::service
