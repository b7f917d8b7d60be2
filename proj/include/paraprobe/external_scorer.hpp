#pragma once

#include "paraprobe/scorer.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace paraprobe {

// Newline-delimited JSON, one object per line:
//   request   {"id": string, "s1": string, "s2": string}
//   response  {"id": string, "score": number in [0,1]}
//   liveness  {"cmd":"ping"} -> {"ok":true}
// Responses may arrive in any order and are matched by id.
namespace wire {

struct Response {
  std::string id;
  double score = 0.0;
};

// Invalid UTF-8 in a sentence is replaced by U+FFFD.
std::string encode_request(std::string_view id, std::string_view s1, std::string_view s2);
std::string encode_ping();

// Throws ProtocolError unless `line` is an object with a string "id" and a
// numeric "score" in [0, 1]. An {"id":..., "error":...} line is reported
// as a scorer-side failure for that id.
Response decode_response(std::string_view line);

// True iff `line` is {"ok": true, ...}.
bool is_pong(std::string_view line);

}  // namespace wire

struct TcpAddress {
  std::string host;
  std::uint16_t port = 0;

  // "host:port" or "[v6addr]:port"; throws ConfigError.
  static TcpAddress parse(std::string_view text);
};

// A bidirectional line channel. Owns its descriptors.
class LineTransport {
public:
  virtual ~LineTransport() = default;
  virtual int read_fd() const = 0;
  virtual int write_fd() const = 0;
  virtual std::string describe() const = 0;
};

// Runs `command` through /bin/sh with its stdin/stdout connected to us.
std::unique_ptr<LineTransport> spawn_process_transport(const std::string& command);
std::unique_ptr<LineTransport> connect_tcp_transport(const TcpAddress& address);
// Adopts already-open descriptors (which may be equal, e.g. a socket).
std::unique_ptr<LineTransport> adopt_fd_transport(int read_fd, int write_fd, std::string label);

struct ExternalScorerOptions {
  // Maximum silence while responses are outstanding.
  std::chrono::milliseconds timeout{30000};
  // Requests written ahead of their responses.
  std::size_t max_in_flight = 256;
};

// Client side of the wire protocol. A session is serially owned: one
// score_batch at a time.
class ExternalScorer final : public Scorer {
public:
  ExternalScorer(std::unique_ptr<LineTransport> transport, ExternalScorerOptions options = {});

  static std::unique_ptr<ExternalScorer> spawn(const std::string& command,
                                               ExternalScorerOptions options = {});
  static std::unique_ptr<ExternalScorer> connect(const TcpAddress& address,
                                                 ExternalScorerOptions options = {});

  // Throws ProtocolError unless the peer answers {"ok":true}.
  void ping();

  std::string name() const override;

  // Pair ids are used as request ids and must be unique within the batch.
  // Throws ProtocolError on timeout, stream close, malformed or unknown
  // responses and out-of-range scores.
  std::vector<Score> score_batch(std::span<const SentencePair> pairs) override;

private:
  std::string read_line();
  void write_all(std::string_view data);
  bool fill_input(std::chrono::milliseconds timeout);

  std::unique_ptr<LineTransport> transport_;
  ExternalScorerOptions options_;
  std::string inbuf_;
};

}  // namespace paraprobe
