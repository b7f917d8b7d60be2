#include "paraprobe/external_scorer.hpp"

#include "paraprobe/error.hpp"

#include <json.hpp>

#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <unordered_map>
#include <utility>

extern char** environ;

namespace paraprobe {

using nlohmann::json;

namespace wire {

std::string encode_request(std::string_view id, std::string_view s1, std::string_view s2) {
  json j = {{"id", id}, {"s1", s1}, {"s2", s2}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string encode_ping() { return R"({"cmd":"ping"})"; }

Response decode_response(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("malformed response line '" + std::string(line.substr(0, 200)) + "'");
  }
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) throw ProtocolError("response without string id");
  Response r{id->get<std::string>(), 0.0};
  if (auto err = j.find("error"); err != j.end()) {
    throw ProtocolError("scorer reported error: " + err->dump(), r.id);
  }
  auto score = j.find("score");
  if (score == j.end() || !score->is_number()) {
    throw ProtocolError("response score missing or non-numeric", r.id);
  }
  r.score = score->get<double>();
  if (!(r.score >= 0.0 && r.score <= 1.0)) {
    throw ProtocolError("protocol violation: score " + score->dump() + " outside [0, 1]", r.id);
  }
  return r;
}

bool is_pong(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  auto ok = j.find("ok");
  return ok != j.end() && ok->is_boolean() && ok->get<bool>();
}

}  // namespace wire

TcpAddress TcpAddress::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw ConfigError("expected HOST:PORT, got '" + std::string(text) + "'");
  }
  std::string_view host = text.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535) {
    throw ConfigError("bad port in '" + std::string(text) + "'");
  }
  return {std::string(host), static_cast<std::uint16_t>(port)};
}

namespace {

class UniqueFd {
public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  UniqueFd(UniqueFd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  UniqueFd& operator=(UniqueFd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  ~UniqueFd() { reset(); }

  int get() const noexcept { return fd_; }
  int release() noexcept { return std::exchange(fd_, -1); }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

private:
  int fd_ = -1;
};

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

void set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  if (flags < 0 || ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0) {
    throw IoError(std::string("fcntl: ") + std::strerror(errno));
  }
}

class FdTransport : public LineTransport {
public:
  FdTransport(int read_fd, int write_fd, std::string label)
      : read_(read_fd), write_(write_fd == read_fd ? -1 : write_fd), label_(std::move(label)) {}

  int read_fd() const override { return read_.get(); }
  int write_fd() const override { return write_.get() >= 0 ? write_.get() : read_.get(); }
  std::string describe() const override { return label_; }

protected:
  void close_write() { write_.reset(); }

  UniqueFd read_;
  UniqueFd write_;
  std::string label_;
};

class ProcessTransport final : public FdTransport {
public:
  ProcessTransport(int read_fd, int write_fd, pid_t pid, std::string command)
      : FdTransport(read_fd, write_fd, "cmd:" + command), pid_(pid) {}

  ~ProcessTransport() override {
    // EOF on its stdin asks the child to exit; kill it if it lingers.
    close_write();
    for (int i = 0; i < 200; ++i) {
      int status = 0;
      pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || r < 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

private:
  pid_t pid_;
};

}  // namespace

std::unique_ptr<LineTransport> spawn_process_transport(const std::string& command) {
  ignore_sigpipe();
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw IoError(std::string("pipe: ") + std::strerror(errno));
  }
  UniqueFd child_in(to_child[0]), parent_out(to_child[1]);
  UniqueFd parent_in(from_child[0]), child_out(from_child[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_in.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, child_out.get(), STDOUT_FILENO);

  std::string shell = "/bin/sh";
  std::string flag = "-c";
  std::string cmd = command;
  char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw IoError("cannot spawn scorer: " + std::string(std::strerror(rc)));

  return std::make_unique<ProcessTransport>(parent_in.release(), parent_out.release(), pid, command);
}

std::unique_ptr<LineTransport> connect_tcp_transport(const TcpAddress& address) {
  ignore_sigpipe();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(address.port);
  if (int rc = ::getaddrinfo(address.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    throw IoError("cannot resolve " + address.host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) {
    throw IoError("cannot connect to " + address.host + ":" + port + ": " + std::strerror(errno));
  }
  return std::make_unique<FdTransport>(fd, fd, "tcp:" + address.host + ":" + port);
}

std::unique_ptr<LineTransport> adopt_fd_transport(int read_fd, int write_fd, std::string label) {
  ignore_sigpipe();
  return std::make_unique<FdTransport>(read_fd, write_fd, std::move(label));
}

ExternalScorer::ExternalScorer(std::unique_ptr<LineTransport> transport, ExternalScorerOptions options)
    : transport_(std::move(transport)), options_(options) {
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  set_nonblocking(transport_->read_fd());
  set_nonblocking(transport_->write_fd());
}

std::unique_ptr<ExternalScorer> ExternalScorer::spawn(const std::string& command,
                                                      ExternalScorerOptions options) {
  return std::make_unique<ExternalScorer>(spawn_process_transport(command), options);
}

std::unique_ptr<ExternalScorer> ExternalScorer::connect(const TcpAddress& address,
                                                        ExternalScorerOptions options) {
  return std::make_unique<ExternalScorer>(connect_tcp_transport(address), options);
}

std::string ExternalScorer::name() const { return "external:" + transport_->describe(); }

bool ExternalScorer::fill_input(std::chrono::milliseconds timeout) {
  pollfd pfd{transport_->read_fd(), POLLIN, 0};
  int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc < 0 && errno != EINTR) throw IoError(std::string("poll: ") + std::strerror(errno));
  if (rc <= 0) return false;
  char buf[65536];
  ssize_t n = ::read(transport_->read_fd(), buf, sizeof buf);
  if (n == 0) throw ProtocolError("scorer closed the stream");
  if (n < 0) {
    if (errno == EAGAIN || errno == EINTR) return true;
    throw ProtocolError(std::string("read from scorer failed: ") + std::strerror(errno));
  }
  inbuf_.append(buf, static_cast<std::size_t>(n));
  return true;
}

void ExternalScorer::write_all(std::string_view data) {
  while (!data.empty()) {
    pollfd pfd{transport_->write_fd(), POLLOUT, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(options_.timeout.count()));
    if (rc == 0) throw ProtocolError("timed out writing to scorer");
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("poll: ") + std::strerror(errno));
    }
    ssize_t n = ::write(transport_->write_fd(), data.data(), data.size());
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      throw ProtocolError(std::string("write to scorer failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string ExternalScorer::read_line() {
  while (true) {
    if (auto nl = inbuf_.find('\n'); nl != std::string::npos) {
      std::string line = inbuf_.substr(0, nl);
      inbuf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (!fill_input(options_.timeout)) throw ProtocolError("timed out waiting for scorer");
  }
}

void ExternalScorer::ping() {
  write_all(wire::encode_ping() + "\n");
  std::string line;
  try {
    line = read_line();
  } catch (const ProtocolError& e) {
    throw ProtocolError(std::string("ping failed: ") + e.what());
  }
  if (!wire::is_pong(line)) throw ProtocolError("ping answered with '" + line + "'");
}

std::vector<Score> ExternalScorer::score_batch(std::span<const SentencePair> pairs) {
  std::unordered_map<std::string_view, std::size_t> index_of;
  index_of.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!index_of.try_emplace(pairs[i].id, i).second) {
      throw PreconditionError("duplicate pair id '" + pairs[i].id + "' in scoring batch");
    }
  }

  std::vector<std::optional<double>> results(pairs.size());
  std::size_t next = 0;
  std::size_t received = 0;
  std::size_t oldest = 0;  // lowest index possibly still unanswered
  std::string outbuf;

  auto oldest_pending_id = [&]() -> std::string {
    while (oldest < next && results[oldest]) ++oldest;
    return oldest < pairs.size() ? pairs[oldest].id : std::string{};
  };

  while (received < pairs.size()) {
    while (next < pairs.size() && next - received < options_.max_in_flight) {
      const auto& p = pairs[next++];
      outbuf += wire::encode_request(p.id, p.s1, p.s2);
      outbuf += '\n';
    }

    pollfd fds[2] = {{transport_->read_fd(), POLLIN, 0},
                     {transport_->write_fd(), static_cast<short>(outbuf.empty() ? 0 : POLLOUT), 0}};
    int rc = ::poll(fds, outbuf.empty() ? 1 : 2, static_cast<int>(options_.timeout.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) throw ProtocolError("timed out waiting for scorer response", oldest_pending_id());

    if (!outbuf.empty() && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::write(transport_->write_fd(), outbuf.data(), outbuf.size());
      if (n < 0 && errno != EAGAIN && errno != EINTR) {
        throw ProtocolError(std::string("write to scorer failed: ") + std::strerror(errno),
                            oldest_pending_id());
      }
      if (n > 0) outbuf.erase(0, static_cast<std::size_t>(n));
    }

    if (fds[0].revents & (POLLIN | POLLERR | POLLHUP)) {
      try {
        fill_input(std::chrono::milliseconds(0));
      } catch (const ProtocolError& e) {
        throw ProtocolError(std::string(e.what()) + " with " +
                                std::to_string(pairs.size() - received) + " responses outstanding",
                            oldest_pending_id());
      }
      std::size_t nl;
      while ((nl = inbuf_.find('\n')) != std::string::npos) {
        std::string_view line(inbuf_.data(), nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        auto response = wire::decode_response(line);
        auto it = index_of.find(response.id);
        if (it == index_of.end() || it->second >= next) {
          throw ProtocolError("response for unknown id", response.id);
        }
        if (results[it->second]) throw ProtocolError("duplicate response", response.id);
        results[it->second] = response.score;
        ++received;
        inbuf_.erase(0, nl + 1);
      }
    }
  }

  std::vector<Score> scores;
  scores.reserve(pairs.size());
  for (const auto& r : results) scores.emplace_back(*r);
  return scores;
}

}  // namespace paraprobe
