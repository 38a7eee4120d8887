#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

// Line-delimited JSON rollout protocol. Each request is one JSON object
// {id, op, ...} on its own line and gets exactly one response line
// {id, ok, payload} or {id, ok:false, error:{code, message}}.
namespace envforge::service {

inline constexpr std::string_view kProtocolVersion = "1";
inline constexpr std::size_t kDefaultMaxSessions = 1024;

struct ServerOptions {
    std::size_t max_sessions = kDefaultMaxSessions;
    std::uint64_t default_seed = 0;  // used by reset requests without a seed
};

/// Rounds to 6 significant digits, the precision of every protocol float.
double wire_float(double x);

/// Copy of `j` with every floating-point number passed through wire_float.
nlohmann::ordered_json round_floats(const nlohmann::ordered_json& j);

class Server {
public:
    explicit Server(ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Handles one request line and returns the response line (no newline).
    /// Safe to call from several threads; calls for one session serialize.
    std::string handle_line(std::string_view line);

    /// Reads requests until EOF, writing one response per line.
    void serve_stream(std::istream& in, std::ostream& out);

    /// Listens on host:port (port 0 picks a free one) and serves each
    /// connection on its own thread until `stop` becomes true.
    /// `on_listening` receives the bound port.
    void serve_tcp(const std::string& host, std::uint16_t port,
                   const std::function<void(std::uint16_t)>& on_listening,
                   const std::atomic<bool>& stop);

    std::size_t live_sessions() const;

private:
    struct Session;

    nlohmann::ordered_json dispatch(const nlohmann::json& request);
    nlohmann::ordered_json op_spec() const;
    nlohmann::ordered_json op_reset(const nlohmann::json& request);
    nlohmann::ordered_json op_step(const nlohmann::json& request);
    nlohmann::ordered_json op_close(const nlohmann::json& request);
    std::shared_ptr<Session> find_session(const nlohmann::json& request) const;

    ServerOptions options_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_session_ = 1;
};

/// Parses "tcp:HOST:PORT"; throws Error(BadConfig).
std::pair<std::string, std::uint16_t> parse_tcp_address(std::string_view transport);

}  // namespace envforge::service
