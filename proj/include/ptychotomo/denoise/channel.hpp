#pragma once

#include <sys/types.h>

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace ptychotomo {

/// A byte stream over a pair of file descriptors with per-call deadlines.
/// Failures throw DenoiserError (timeout or io).
class Channel {
 public:
  using Timeout = std::chrono::milliseconds;
  static constexpr Timeout kForever{-1};

  Channel(int read_fd, int write_fd, pid_t child = -1, bool owns = true);
  ~Channel();
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  /// Opens "unix:<path>", "tcp:<host>:<port>" or "exec:<shell command>" (child stdin/stdout).
  static std::unique_ptr<Channel> connect(const std::string& endpoint);

  void write_all(std::string_view bytes, Timeout timeout);
  /// Reads exactly n bytes. Throws io on EOF, timeout when the deadline passes.
  std::string read_exact(std::size_t n, Timeout timeout);
  /// Like read_exact, but returns an empty string on a clean EOF before the first byte.
  std::string read_or_eof(std::size_t n, Timeout timeout);
  /// True when at least one byte is readable right now.
  bool readable_now();

 private:
  std::string read_impl(std::size_t n, Timeout timeout, bool eof_ok);

  int read_fd_;
  int write_fd_;
  pid_t child_;
  bool owns_;
};

/// Listening socket for "unix:<path>" or "tcp:<host>:<port>". Returns the fd.
int listen_on(const std::string& endpoint);

}  // namespace ptychotomo
