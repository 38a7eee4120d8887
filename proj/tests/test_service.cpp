#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "envforge/error.hpp"
#include "envforge/rollout.hpp"
#include "envforge/service.hpp"

using namespace envforge;
using namespace envforge::service;
using nlohmann::json;

namespace {

json call(Server& server, const json& request) {
    return json::parse(server.handle_line(request.dump()));
}

std::string error_code(const json& response) {
    EXPECT_FALSE(response.at("ok").get<bool>()) << response.dump();
    return response.at("error").at("code").get<std::string>();
}

std::string act(const std::string& a) {
    return "<think>t</think><action>" + a + "</action>";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string run_command(const std::string& cmd) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    pclose(pipe);
    return out;
}

// Fixed per-session request script.
struct Script {
    std::string env;
    std::uint64_t seed;
    std::vector<std::string> responses;
};

Script make_script(int k) {
    const char* envs[] = {"sokoban", "house", "shop"};
    Script s{envs[k % 3], static_cast<std::uint64_t>(100 + k), {}};
    Rng rng(static_cast<std::uint64_t>(k));
    const char* moves[] = {"up", "down", "left", "right", "look", "search[shirt]", "click[next >]"};
    for (int i = 0; i < 12; ++i) s.responses.push_back(act(moves[rng.below(7)]));
    return s;
}

json reset_request(const Script& s, int id) {
    return {{"id", id}, {"op", "reset"}, {"env", s.env}, {"seed", s.seed}, {"augment", {{"epsilon", 80}}}};
}

}  // namespace

TEST(ServiceProtocol, SpecListsEnvironments) {
    Server server;
    const auto r = call(server, {{"id", 1}, {"op", "spec"}});
    ASSERT_TRUE(r.at("ok").get<bool>());
    const auto& p = r.at("payload");
    EXPECT_EQ(p.at("protocol_version"), "1");
    EXPECT_EQ(p.at("envs").size(), 3u);
    EXPECT_EQ(p.at("envs")[2].at("config").at("max_steps"), 15);
    EXPECT_EQ(p.at("envs")[1].at("config").at("max_steps"), 50);
}

TEST(ServiceProtocol, ResetStepClose) {
    Server server;
    const auto reset = call(server, {{"id", "a"}, {"op", "reset"}, {"env", "sokoban"}, {"seed", 3}});
    ASSERT_TRUE(reset.at("ok").get<bool>()) << reset.dump();
    EXPECT_EQ(reset.at("id"), "a");
    const std::string session = reset.at("payload").at("session");
    EXPECT_EQ(reset.at("payload").at("admissible_actions"), json({"up", "down", "left", "right"}));

    const auto bad = call(server, {{"id", 2}, {"op", "step"}, {"session", session}, {"response", act("fly")}});
    ASSERT_TRUE(bad.at("ok").get<bool>());
    EXPECT_TRUE(bad.at("payload").at("invalid").get<bool>());
    EXPECT_DOUBLE_EQ(bad.at("payload").at("reward").get<double>(), -0.1);
    EXPECT_EQ(bad.at("payload").at("parsed_action"), "fly");

    const auto garbled = call(server, {{"id", 3}, {"op", "step"}, {"session", session}, {"response", "up"}});
    EXPECT_TRUE(garbled.at("payload").at("parsed_action").is_null());

    const auto closed = call(server, {{"id", 4}, {"op", "close"}, {"session", session}});
    ASSERT_TRUE(closed.at("ok").get<bool>());
    EXPECT_EQ(closed.at("payload").at("trajectory").at("steps").size(), 2u);
    EXPECT_EQ(server.live_sessions(), 0u);
    EXPECT_EQ(error_code(call(server, {{"id", 5}, {"op", "close"}, {"session", session}})), "UnknownSession");
}

TEST(ServiceProtocol, ErrorsAreTyped) {
    Server server;
    EXPECT_EQ(error_code(call(server, {{"id", 1}, {"op", "dance"}})), "BadRequest");
    EXPECT_EQ(error_code(call(server, {{"id", 1}, {"op", "reset"}, {"env", "sciworld"}})), "BadConfig");
    EXPECT_EQ(error_code(call(server, {{"id", 1}, {"op", "reset"}, {"env", "sokoban"}, {"seed", -1}})),
              "BadConfig");
    EXPECT_EQ(error_code(call(server, {{"id", 1},
                                       {"op", "reset"},
                                       {"env", "sokoban"},
                                       {"config", {{"max_steps", 0}}}})),
              "BadConfig");
    EXPECT_EQ(error_code(call(server, {{"id", 1},
                                       {"op", "reset"},
                                       {"env", "sokoban"},
                                       {"augment", {{"prob", 3}}}})),
              "BadConfig");
    EXPECT_EQ(error_code(call(server, {{"id", 1}, {"op", "step"}, {"session", "s99"}, {"response", "x"}})),
              "UnknownSession");
}

TEST(ServiceProtocol, MalformedJsonGetsNullId) {
    Server server;
    for (const char* line : {"{not json", "[1,2]", "\"op\""}) {
        const auto r = json::parse(server.handle_line(line));
        EXPECT_TRUE(r.at("id").is_null());
        EXPECT_EQ(error_code(r), "BadRequest");
    }
}

TEST(ServiceProtocol, StepAfterEndIsTerminated) {
    Server server;
    const auto reset = call(server, {{"id", 1},
                                     {"op", "reset"},
                                     {"env", "sokoban"},
                                     {"seed", 1},
                                     {"config", {{"max_steps", 1}}}});
    const std::string session = reset.at("payload").at("session");
    const auto first = call(server, {{"id", 2}, {"op", "step"}, {"session", session}, {"response", act("fly")}});
    EXPECT_TRUE(first.at("payload").at("truncated").get<bool>());
    EXPECT_EQ(error_code(call(server, {{"id", 3}, {"op", "step"}, {"session", session}, {"response", act("up")}})),
              "SessionTerminated");
}

TEST(ServiceProtocol, SessionCapIsBusy) {
    ServerOptions options;
    options.max_sessions = 2;
    Server server(options);
    for (int i = 0; i < 2; ++i) {
        ASSERT_TRUE(call(server, {{"id", i}, {"op", "reset"}, {"env", "sokoban"}}).at("ok").get<bool>());
    }
    EXPECT_EQ(error_code(call(server, {{"id", 9}, {"op", "reset"}, {"env", "sokoban"}})), "Busy");
    call(server, {{"id", 10}, {"op", "close"}, {"session", "s1"}});
    EXPECT_TRUE(call(server, {{"id", 11}, {"op", "reset"}, {"env", "sokoban"}}).at("ok").get<bool>());
}

TEST(ServiceProtocol, ThinkingFlagRelaxesFormat) {
    Server server;
    const auto reset = call(server, {{"id", 1}, {"op", "reset"}, {"env", "sokoban"}, {"thinking", false}});
    const std::string session = reset.at("payload").at("session");
    const auto r = call(server, {{"id", 2}, {"op", "step"}, {"session", session}, {"response", "<action>up</action>"}});
    EXPECT_FALSE(r.at("payload").at("invalid").get<bool>());
}

TEST(ServiceProtocol, FloatsUseSixSignificantDigits) {
    EXPECT_DOUBLE_EQ(wire_float(-0.1), -0.1);
    EXPECT_DOUBLE_EQ(wire_float(1.0 / 3.0), 0.333333);
    EXPECT_DOUBLE_EQ(wire_float(123456789.0), 123457000.0);
    const auto j = round_floats(nlohmann::ordered_json::parse(R"({"a":[0.1234567,{"b":2}]})"));
    EXPECT_EQ(j.dump(), R"({"a":[0.123457,{"b":2}]})");
}

TEST(ServiceConcurrency, InterleavedSessionsMatchSerialRuns) {
    constexpr int kSessions = 16;
    // Serial reference: a fresh server per session.
    std::vector<std::vector<std::string>> serial(kSessions);
    for (int k = 0; k < kSessions; ++k) {
        Server server;
        const auto s = make_script(k);
        const auto reset = call(server, reset_request(s, 0));
        serial[k].push_back(reset.at("payload").at("observation").dump());
        for (const auto& resp : s.responses) {
            const auto r = call(server, {{"id", 1}, {"op", "step"}, {"session", "s1"}, {"response", resp}});
            serial[k].push_back((r.at("ok").get<bool>() ? r.at("payload") : r.at("error").at("code")).dump());
        }
    }

    Server shared;
    std::vector<std::string> names(kSessions);
    std::vector<std::vector<std::string>> parallel(kSessions);
    for (int k = 0; k < kSessions; ++k) {
        const auto reset = call(shared, reset_request(make_script(k), k));
        names[k] = reset.at("payload").at("session");
        parallel[k].push_back(reset.at("payload").at("observation").dump());
    }
    std::vector<std::thread> workers;
    for (int k = 0; k < kSessions; ++k) {
        workers.emplace_back([&, k] {
            const auto s = make_script(k);
            Server& srv = shared;
            for (const auto& resp : s.responses) {
                const auto r = call(srv, {{"id", k}, {"op", "step"}, {"session", names[k]}, {"response", resp}});
                parallel[k].push_back(
                    (r.at("ok").get<bool>() ? r.at("payload") : r.at("error").at("code")).dump());
                std::this_thread::yield();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (int k = 0; k < kSessions; ++k) {
        EXPECT_EQ(parallel[k], serial[k]) << "session " << k;
    }
}

TEST(ServiceTransport, ParsesTcpAddress) {
    EXPECT_EQ(parse_tcp_address("tcp:127.0.0.1:9000"), (std::pair<std::string, std::uint16_t>{"127.0.0.1", 9000}));
    EXPECT_THROW(parse_tcp_address("tcp:host"), Error);
    EXPECT_THROW(parse_tcp_address("udp:1.2.3.4:5"), Error);
    EXPECT_THROW(parse_tcp_address("tcp:h:70000"), Error);
}

TEST(ServiceTransport, StreamAnswersEveryLine) {
    Server server;
    std::istringstream in("{\"id\":1,\"op\":\"spec\"}\n\n{bad\n");
    std::ostringstream out;
    server.serve_stream(in, out);
    std::istringstream lines(out.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) ++n;
    EXPECT_EQ(n, 2);
}

TEST(ServiceTransport, TcpRoundTrip) {
    Server server;
    std::atomic<bool> stop{false};
    std::promise<std::uint16_t> bound;
    std::thread t([&] { server.serve_tcp("127.0.0.1", 0, [&](std::uint16_t p) { bound.set_value(p); }, stop); });
    const auto port = bound.get_future().get();

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    ASSERT_GE(fd, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
    const std::string req = "{\"id\":7,\"op\":\"spec\"}\n";
    ASSERT_EQ(::write(fd, req.data(), req.size()), static_cast<ssize_t>(req.size()));
    std::string reply;
    char c;
    while (::read(fd, &c, 1) == 1 && c != '\n') reply += c;
    ::close(fd);
    stop = true;
    t.join();

    const auto r = json::parse(reply);
    EXPECT_EQ(r.at("id"), 7);
    EXPECT_TRUE(r.at("ok").get<bool>());
}

TEST(ServiceGolden, TranscriptsReplayByteIdentically) {
    for (const std::string env : {"sokoban", "house", "shop"}) {
        const std::string dir = ENVFORGE_GOLDEN_DIR;
        const std::string expected = read_file(dir + "/" + env + ".responses.jsonl");
        ASSERT_FALSE(expected.empty()) << env;
        const std::string got = run_command(std::string("ENVFORGE_SEED=0 '") + ENVFORGE_CLI_PATH +
                                            "' serve --transport stdio < '" + dir + "/" + env +
                                            ".requests.jsonl'");
        EXPECT_EQ(got, expected) << env;
    }
}
