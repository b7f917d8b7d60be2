#include "paraprobe/error.hpp"
#include "paraprobe/external_scorer.hpp"

#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>

#include "stub_protocol.hpp"

using namespace paraprobe;

namespace {

std::string stub_cmd(const std::string& args = {}) {
  return std::string(PARAPROBE_STUB_SCORER) + (args.empty() ? "" : " " + args);
}

std::vector<SentencePair> make_pairs(std::size_t n) {
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    pairs.push_back({"id" + std::to_string(i), "sentence " + std::to_string(i),
                     "other " + std::to_string(i * 7 % 13), {}});
  }
  return pairs;
}

}  // namespace

TEST_SUITE("external") {

TEST_CASE("request encoding") {
  auto line = wire::encode_request("7", "a \"q\"", "b\tc");
  CHECK(line == R"({"id":"7","s1":"a \"q\"","s2":"b\tc"})");
  CHECK(line.find('\n') == std::string::npos);
  CHECK(wire::encode_ping() == R"({"cmd":"ping"})");
}

TEST_CASE("response decoding") {
  auto r = wire::decode_response(R"({"id":"x","score":0.42})");
  CHECK(r.id == "x");
  CHECK(r.score == 0.42);
  CHECK(wire::decode_response(R"({"id":"x","score":1})").score == 1.0);
  CHECK_THROWS_AS(wire::decode_response(R"({"id":"x","score":1.5})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response(R"({"id":"x","score":-0.1})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response(R"({"id":"x","score":"0.5"})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response(R"({"id":"x","score":true})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response(R"({"id":"x"})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response(R"({"score":0.5})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response(R"({"id":"x","error":"boom"})"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response("not json"), ProtocolError);
  CHECK_THROWS_AS(wire::decode_response("[1,2]"), ProtocolError);
  CHECK(wire::is_pong(R"({"ok":true})"));
  CHECK_FALSE(wire::is_pong(R"({"ok":false})"));
  CHECK_FALSE(wire::is_pong("pong"));
}

TEST_CASE("tcp address parsing") {
  auto a = TcpAddress::parse("localhost:9000");
  CHECK(a.host == "localhost");
  CHECK(a.port == 9000);
  CHECK(TcpAddress::parse("[::1]:80").host == "::1");
  CHECK_THROWS_AS(TcpAddress::parse("localhost"), ConfigError);
  CHECK_THROWS_AS(TcpAddress::parse("host:0"), ConfigError);
  CHECK_THROWS_AS(TcpAddress::parse("host:70000"), ConfigError);
}

TEST_CASE("stub process: ping and in-order scores") {
  auto scorer = ExternalScorer::spawn(stub_cmd());
  scorer->ping();
  auto pairs = make_pairs(20);
  auto scores = scorer->score_batch(pairs);
  REQUIRE(scores.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(scores[i].value() == stub::deterministic_score(pairs[i].s1, pairs[i].s2));
  }
  CHECK(scorer->name().starts_with("external:cmd:"));
}

TEST_CASE("stub process: out-of-order responses are matched by id") {
  auto scorer = ExternalScorer::spawn(stub_cmd("--reorder"));
  scorer->ping();
  auto pairs = make_pairs(1000);
  auto scores = scorer->score_batch(pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(scores[i].value() == stub::deterministic_score(pairs[i].s1, pairs[i].s2));
  }
  // session stays usable for a second batch
  auto again = scorer->score_batch(make_pairs(5));
  CHECK(again.size() == 5);
}

TEST_CASE("stub process: small in-flight window still completes") {
  ExternalScorerOptions opts;
  opts.max_in_flight = 3;
  auto scorer = ExternalScorer::spawn(stub_cmd("--reorder"), opts);
  auto pairs = make_pairs(50);
  auto scores = scorer->score_batch(pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(scores[i].value() == stub::deterministic_score(pairs[i].s1, pairs[i].s2));
  }
}

TEST_CASE("large sentences do not deadlock the pipes") {
  auto scorer = ExternalScorer::spawn(stub_cmd("--reorder"));
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 200; ++i) {
    pairs.push_back({std::to_string(i), std::string(5000, static_cast<char>('a' + i % 26)), "b", {}});
  }
  auto scores = scorer->score_batch(pairs);
  CHECK(scores.size() == pairs.size());
}

TEST_CASE("constant stub echoes its constant") {
  auto scorer = ExternalScorer::spawn(stub_cmd("--constant 0.42"));
  for (const auto& s : scorer->score_batch(make_pairs(10))) CHECK(s.value() == 0.42);
}

TEST_CASE("protocol violations identify the pair") {
  auto pairs = make_pairs(10);
  SUBCASE("score 1.5") {
    auto scorer = ExternalScorer::spawn(stub_cmd("--bad-score-at 4"));
    try {
      scorer->score_batch(pairs);
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(e.pair_id() == "id4");
    }
  }
  SUBCASE("non-numeric score") {
    auto scorer = ExternalScorer::spawn(stub_cmd("--string-score-at 2"));
    CHECK_THROWS_AS(scorer->score_batch(pairs), ProtocolError);
  }
  SUBCASE("unknown id") {
    auto scorer = ExternalScorer::spawn(stub_cmd("--unknown-id-at 1"));
    CHECK_THROWS_AS(scorer->score_batch(pairs), ProtocolError);
  }
  SUBCASE("stream closed early") {
    auto scorer = ExternalScorer::spawn(stub_cmd("--close-after 3"));
    try {
      scorer->score_batch(pairs);
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(e.pair_id() == "id3");
    }
  }
  SUBCASE("timeout") {
    ExternalScorerOptions opts;
    opts.timeout = std::chrono::milliseconds(200);
    auto scorer = ExternalScorer::spawn(stub_cmd("--silent"), opts);
    scorer->ping();
    try {
      scorer->score_batch(pairs);
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(e.pair_id() == "id0");
    }
  }
}

TEST_CASE("ping fails for a command that is not a scorer") {
  ExternalScorerOptions opts;
  opts.timeout = std::chrono::milliseconds(2000);
  auto scorer = ExternalScorer::spawn("exit 3", opts);
  CHECK_THROWS_AS(scorer->ping(), ProtocolError);
  auto echo = ExternalScorer::spawn("echo hello; cat >/dev/null", opts);
  CHECK_THROWS_AS(echo->ping(), ProtocolError);
}

TEST_CASE("duplicate ids within a batch are rejected") {
  auto scorer = ExternalScorer::spawn(stub_cmd());
  std::vector<SentencePair> pairs{{"x", "a", "b", {}}, {"x", "c", "d", {}}};
  CHECK_THROWS_AS(scorer->score_batch(pairs), PreconditionError);
}

TEST_CASE("tcp transport against an in-process stub server") {
  int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(listener >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::listen(listener, 1) == 0);
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const auto port = ntohs(addr.sin_port);

  std::thread server([listener] {
    int conn = ::accept(listener, nullptr, nullptr);
    stub::Options opt;
    opt.reorder = true;
    stub::serve(conn, conn, opt);
    ::close(conn);
  });

  {
    auto scorer = ExternalScorer::connect(TcpAddress::parse("127.0.0.1:" + std::to_string(port)));
    scorer->ping();
    auto pairs = make_pairs(100);
    auto scores = scorer->score_batch(pairs);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(scores[i].value() == stub::deterministic_score(pairs[i].s1, pairs[i].s2));
    }
    CHECK(scorer->name().starts_with("external:tcp:"));
  }
  server.join();
  ::close(listener);
}

TEST_CASE("socketpair transport") {
  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  std::thread server([fd = fds[1]] {
    stub::serve(fd, fd, stub::Options{});
    ::close(fd);
  });
  {
    ExternalScorer scorer(adopt_fd_transport(fds[0], fds[0], "socketpair"));
    scorer.ping();
    CHECK(scorer.score("a", "b").value() == stub::deterministic_score("a", "b"));
  }
  server.join();
}

}  // TEST_SUITE
