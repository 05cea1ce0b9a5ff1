#include "ptychotomo/denoise/channel.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/ioctl.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#include "ptychotomo/denoise/protocol.hpp"

namespace ptychotomo {

namespace {

[[noreturn]] void io_error(const std::string& what) {
  throw DenoiserError(DenoiserError::Reason::io, what + ": " + std::strerror(errno));
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

struct Address {
  int family = AF_UNIX;
  sockaddr_storage storage{};
  socklen_t length = 0;
};

std::vector<Address> resolve(const std::string& endpoint) {
  std::vector<Address> out;
  if (endpoint.rfind("unix:", 0) == 0) {
    const std::string path = endpoint.substr(5);
    Address a;
    auto* un = reinterpret_cast<sockaddr_un*>(&a.storage);
    if (path.empty() || path.size() >= sizeof(un->sun_path)) {
      throw DenoiserError(DenoiserError::Reason::io, "endpoint '" + endpoint + "': bad socket path");
    }
    un->sun_family = AF_UNIX;
    std::memcpy(un->sun_path, path.c_str(), path.size() + 1);
    a.length = static_cast<socklen_t>(sizeof(sockaddr_un));
    out.push_back(a);
    return out;
  }
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw DenoiserError(DenoiserError::Reason::io, "endpoint '" + endpoint + "': expected tcp:<host>:<port>");
    const std::string host = rest.substr(0, colon), port = rest.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
      throw DenoiserError(DenoiserError::Reason::io, "endpoint '" + endpoint + "': cannot resolve");
    }
    for (auto* p = res; p; p = p->ai_next) {
      Address a;
      a.family = p->ai_family;
      std::memcpy(&a.storage, p->ai_addr, p->ai_addrlen);
      a.length = p->ai_addrlen;
      out.push_back(a);
    }
    ::freeaddrinfo(res);
    return out;
  }
  throw DenoiserError(DenoiserError::Reason::io, "endpoint '" + endpoint + "': expected unix:, tcp: or exec:");
}

std::unique_ptr<Channel> spawn(const std::string& command) {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) io_error("pipe");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    io_error("pipe");
  }
  const pid_t pid = ::fork();
  if (pid < 0) io_error("fork");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<Channel>(from_child[0], to_child[1], pid);
}

}  // namespace

Channel::Channel(int read_fd, int write_fd, pid_t child, bool owns)
    : read_fd_(read_fd), write_fd_(write_fd), child_(child), owns_(owns) {
  ignore_sigpipe();
}

Channel::~Channel() {
  if (owns_) {
    ::close(read_fd_);
    if (write_fd_ != read_fd_) ::close(write_fd_);
  }
  if (child_ > 0) {
    int status = 0;
    ::kill(child_, SIGTERM);
    ::waitpid(child_, &status, 0);
  }
}

std::unique_ptr<Channel> Channel::connect(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) return spawn(endpoint.substr(5));
  for (const auto& a : resolve(endpoint)) {
    const int fd = ::socket(a.family, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) continue;
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&a.storage), a.length) == 0) {
      return std::make_unique<Channel>(fd, fd);
    }
    ::close(fd);
  }
  io_error("connect to '" + endpoint + "'");
}

void Channel::write_all(std::string_view bytes, Timeout timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t done = 0;
  while (done < bytes.size()) {
    pollfd p{write_fd_, POLLOUT, 0};
    int wait = -1;
    if (timeout.count() >= 0) {
      const auto left = std::chrono::duration_cast<Timeout>(deadline - std::chrono::steady_clock::now()).count();
      if (left <= 0) throw DenoiserError(DenoiserError::Reason::timeout, "write timed out");
      wait = static_cast<int>(left);
    }
    const int r = ::poll(&p, 1, wait);
    if (r < 0) {
      if (errno == EINTR) continue;
      io_error("poll");
    }
    if (r == 0) throw DenoiserError(DenoiserError::Reason::timeout, "write timed out");
    const ssize_t n = ::write(write_fd_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      io_error("write");
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string Channel::read_impl(std::size_t n, Timeout timeout, bool eof_ok) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string out(n, '\0');
  std::size_t done = 0;
  while (done < n) {
    pollfd p{read_fd_, POLLIN, 0};
    int wait = -1;
    if (timeout.count() >= 0) {
      const auto left = std::chrono::duration_cast<Timeout>(deadline - std::chrono::steady_clock::now()).count();
      if (left <= 0) throw DenoiserError(DenoiserError::Reason::timeout, "read timed out");
      wait = static_cast<int>(left);
    }
    const int r = ::poll(&p, 1, wait);
    if (r < 0) {
      if (errno == EINTR) continue;
      io_error("poll");
    }
    if (r == 0) throw DenoiserError(DenoiserError::Reason::timeout, "read timed out");
    const ssize_t got = ::read(read_fd_, out.data() + done, n - done);
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      io_error("read");
    }
    if (got == 0) {
      if (eof_ok && done == 0) return {};
      throw DenoiserError(DenoiserError::Reason::protocol,
                          "stream closed after " + std::to_string(done) + " of " + std::to_string(n) + " bytes");
    }
    done += static_cast<std::size_t>(got);
  }
  return out;
}

std::string Channel::read_exact(std::size_t n, Timeout timeout) { return read_impl(n, timeout, false); }
std::string Channel::read_or_eof(std::size_t n, Timeout timeout) { return read_impl(n, timeout, true); }

bool Channel::readable_now() {
  int pending = 0;
  return ::ioctl(read_fd_, FIONREAD, &pending) == 0 && pending > 0;
}

int listen_on(const std::string& endpoint) {
  ignore_sigpipe();
  for (const auto& a : resolve(endpoint)) {
    const int fd = ::socket(a.family, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) continue;
    if (a.family == AF_UNIX) {
      ::unlink(reinterpret_cast<const sockaddr_un*>(&a.storage)->sun_path);
    } else {
      const int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    }
    if (::bind(fd, reinterpret_cast<const sockaddr*>(&a.storage), a.length) == 0 && ::listen(fd, 4) == 0) return fd;
    ::close(fd);
  }
  io_error("listen on '" + endpoint + "'");
}

}  // namespace ptychotomo
