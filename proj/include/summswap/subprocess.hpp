#pragma once

// POSIX child process speaking a line protocol over stdin/stdout.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>
#include <vector>

#include "summswap/error.hpp"

namespace summswap::subprocess {

inline constexpr std::string_view kModule = "summarizers";

/// Owned file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = o.release();
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  int release() noexcept {
    const int f = fd_;
    fd_ = -1;
    return f;
  }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct ExchangeOptions {
  std::size_t window = 1;     // max requests written ahead of received responses
  double timeout_seconds = 60; // max wait for any single response line
};

struct ExchangeResult {
  std::vector<std::string> lines;
  int exit_code = 0;  // 128 + signal when killed by a signal
};

namespace detail {

inline void ignore_sigpipe_once() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

inline int wait_child(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace detail

/// Spawns `argv`, writes `requests` (one per line) while at most
/// `opts.window` are unanswered, and collects stdout lines until EOF.
inline ExchangeResult exchange_lines(const std::vector<std::string>& argv, const std::vector<std::string>& requests,
                                     const ExchangeOptions& opts) {
  if (argv.empty()) throw Error(ErrorKind::InvalidAdapterConfig, kModule, "empty adapter command");
  detail::ignore_sigpipe_once();

  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorKind::IoFailure, kModule, std::strerror(errno));
  Fd child_in(in_pipe[0]), to_child(in_pipe[1]);
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw Error(ErrorKind::IoFailure, kModule, std::strerror(errno));
  Fd from_child(out_pipe[0]), child_out(out_pipe[1]);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorKind::IoFailure, kModule, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(child_in.get(), STDIN_FILENO);
    ::dup2(child_out.get(), STDOUT_FILENO);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  child_in.reset();
  child_out.reset();
  ::fcntl(to_child.get(), F_SETFL, ::fcntl(to_child.get(), F_GETFL) | O_NONBLOCK);
  ::fcntl(from_child.get(), F_SETFL, ::fcntl(from_child.get(), F_GETFL) | O_NONBLOCK);

  using Clock = std::chrono::steady_clock;
  const auto timeout = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(opts.timeout_seconds));
  auto deadline = Clock::now() + timeout;

  ExchangeResult result;
  std::string out_buf, pending;
  std::size_t next_request = 0, pending_off = 0;
  const std::size_t window = opts.window == 0 ? 1 : opts.window;
  bool out_eof = false;

  auto kill_and_throw = [&](ErrorKind kind, const std::string& msg) {
    ::kill(pid, SIGKILL);
    detail::wait_child(pid);
    throw Error(kind, kModule, msg);
  };

  while (!out_eof) {
    // Refill the write buffer while the window allows.
    if (to_child && pending_off == pending.size()) {
      pending.clear();
      pending_off = 0;
      while (next_request < requests.size() && next_request - result.lines.size() < window) {
        pending += requests[next_request++];
        pending += '\n';
      }
      if (pending.empty() && next_request == requests.size()) to_child.reset();
    }

    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {from_child.get(), POLLIN, 0};
    const bool want_write = to_child && pending_off < pending.size();
    if (want_write) fds[nfds++] = {to_child.get(), POLLOUT, 0};

    const auto now = Clock::now();
    if (now >= deadline) kill_and_throw(ErrorKind::AdapterTimeout, "no response within " + std::to_string(opts.timeout_seconds) + " s");
    const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
    const int rc = ::poll(fds, nfds, static_cast<int>(wait_ms));
    if (rc < 0) {
      if (errno == EINTR) continue;
      kill_and_throw(ErrorKind::IoFailure, std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;

    if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(to_child.get(), pending.data() + pending_off, pending.size() - pending_off);
      if (n > 0) {
        pending_off += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        // Child closed its stdin; remaining requests are never delivered.
        to_child.reset();
        pending.clear();
        pending_off = 0;
        next_request = requests.size();
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[65536];
      const ssize_t n = ::read(from_child.get(), buf, sizeof(buf));
      if (n > 0) {
        out_buf.append(buf, static_cast<std::size_t>(n));
        std::size_t nl;
        while ((nl = out_buf.find('\n')) != std::string::npos) {
          std::string line = out_buf.substr(0, nl);
          if (!line.empty() && line.back() == '\r') line.pop_back();
          out_buf.erase(0, nl + 1);
          if (!line.empty()) result.lines.push_back(std::move(line));
          deadline = Clock::now() + timeout;
        }
      } else if (n == 0) {
        out_eof = true;
      } else if (errno != EAGAIN && errno != EINTR) {
        out_eof = true;
      }
    }
  }
  if (!out_buf.empty()) result.lines.push_back(out_buf);
  to_child.reset();
  result.exit_code = detail::wait_child(pid);
  return result;
}

}  // namespace summswap::subprocess
