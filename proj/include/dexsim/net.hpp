#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "dexsim/result.hpp"

namespace dexsim::net {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

inline Expected<Endpoint> parse_endpoint(const std::string& s) {
  std::size_t colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size())
    return Error{"bad endpoint (want host:port): " + s};
  Endpoint ep;
  ep.host = s.substr(0, colon);
  try {
    int p = std::stoi(s.substr(colon + 1));
    if (p < 0 || p > 65535) return Error{"bad port in endpoint: " + s};
    ep.port = static_cast<std::uint16_t>(p);
  } catch (const std::exception&) {
    return Error{"bad port in endpoint: " + s};
  }
  return ep;
}

inline Expected<sockaddr_in> to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
    return Error{"bad IPv4 address: " + ep.host};
  return addr;
}

// Move-only fd owner.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      close_fd();
      fd_ = other.fd_;
      other.fd_ = -1;
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close_fd(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close_fd() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
};

inline std::uint16_t local_port_of(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
  return ntohs(addr.sin_port);
}

// Blocking TCP stream with poll-based timeouts. FIX traffic is tiny; no
// effort is spent on zero-copy paths.
class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(Socket s) : sock_(std::move(s)) { set_nodelay(); }

  static Expected<TcpStream> connect(const Endpoint& ep, int timeout_ms = 5000) {
    auto addr = to_sockaddr(ep);
    if (!addr) return addr.error();
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return Error{std::string("socket: ") + std::strerror(errno)};
    Socket sock(fd);
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr.value()), sizeof(sockaddr_in));
    if (rc != 0 && errno != EINPROGRESS)
      return Error{"connect " + ep.to_string() + ": " + std::strerror(errno)};
    if (rc != 0) {
      pollfd pfd{fd, POLLOUT, 0};
      int pr = ::poll(&pfd, 1, timeout_ms);
      if (pr <= 0) return Error{"connect " + ep.to_string() + ": timeout"};
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      if (err != 0) return Error{"connect " + ep.to_string() + ": " + std::strerror(err)};
    }
    ::fcntl(fd, F_SETFL, flags);
    return TcpStream(std::move(sock));
  }

  // Writes the whole buffer or fails.
  Status<> write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::send(sock_.fd(), data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        return Error{std::string("send: ") + std::strerror(errno)};
      }
      off += static_cast<std::size_t>(n);
    }
    return ok_status();
  }

  // Returns bytes read; 0 on orderly peer close; nullopt on timeout.
  Expected<std::optional<std::size_t>> read_some(char* buf, std::size_t cap, int timeout_ms) {
    pollfd pfd{sock_.fd(), POLLIN, 0};
    int pr = ::poll(&pfd, 1, timeout_ms);
    if (pr < 0) return Error{std::string("poll: ") + std::strerror(errno)};
    if (pr == 0) return std::optional<std::size_t>{};
    ssize_t n = ::recv(sock_.fd(), buf, cap, 0);
    if (n < 0) return Error{std::string("recv: ") + std::strerror(errno)};
    return std::optional<std::size_t>{static_cast<std::size_t>(n)};
  }

  void shutdown_both() { ::shutdown(sock_.fd(), SHUT_RDWR); }
  bool valid() const { return sock_.valid(); }
  int fd() const { return sock_.fd(); }

 private:
  void set_nodelay() {
    int one = 1;
    ::setsockopt(sock_.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  Socket sock_;
};

class TcpListener {
 public:
  static Expected<TcpListener> bind(const Endpoint& ep) {
    auto addr = to_sockaddr(ep);
    if (!addr) return addr.error();
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return Error{std::string("socket: ") + std::strerror(errno)};
    Socket sock(fd);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr.value()), sizeof(sockaddr_in)) != 0)
      return Error{"bind " + ep.to_string() + ": " + std::strerror(errno)};
    if (::listen(fd, 64) != 0) return Error{std::string("listen: ") + std::strerror(errno)};
    TcpListener lst;
    lst.sock_ = std::move(sock);
    return lst;
  }

  // nullopt on timeout.
  Expected<std::optional<TcpStream>> accept(int timeout_ms) {
    pollfd pfd{sock_.fd(), POLLIN, 0};
    int pr = ::poll(&pfd, 1, timeout_ms);
    if (pr < 0) return Error{std::string("poll: ") + std::strerror(errno)};
    if (pr == 0) return std::optional<TcpStream>{};
    int cfd = ::accept(sock_.fd(), nullptr, nullptr);
    if (cfd < 0) return Error{std::string("accept: ") + std::strerror(errno)};
    return std::optional<TcpStream>{TcpStream(Socket(cfd))};
  }

  std::uint16_t local_port() const { return local_port_of(sock_.fd()); }

 private:
  Socket sock_;
};

class UdpSocket {
 public:
  static Expected<UdpSocket> bind(const Endpoint& ep) {
    auto addr = to_sockaddr(ep);
    if (!addr) return addr.error();
    int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0) return Error{std::string("socket: ") + std::strerror(errno)};
    Socket sock(fd);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr.value()), sizeof(sockaddr_in)) != 0)
      return Error{"bind " + ep.to_string() + ": " + std::strerror(errno)};
    UdpSocket u;
    u.sock_ = std::move(sock);
    return u;
  }

  static Expected<UdpSocket> unbound() {
    int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0) return Error{std::string("socket: ") + std::strerror(errno)};
    UdpSocket u;
    u.sock_ = Socket(fd);
    return u;
  }

  Status<> send_to(const void* data, std::size_t len, const Endpoint& dest) {
    auto addr = to_sockaddr(dest);
    if (!addr) return addr.error();
    ssize_t n = ::sendto(sock_.fd(), data, len, 0, reinterpret_cast<sockaddr*>(&addr.value()),
                         sizeof(sockaddr_in));
    if (n < 0) return Error{"sendto " + dest.to_string() + ": " + std::strerror(errno)};
    return ok_status();
  }

  // nullopt on timeout.
  Expected<std::optional<std::vector<std::uint8_t>>> recv(int timeout_ms) {
    pollfd pfd{sock_.fd(), POLLIN, 0};
    int pr = ::poll(&pfd, 1, timeout_ms);
    if (pr < 0) return Error{std::string("poll: ") + std::strerror(errno)};
    if (pr == 0) return std::optional<std::vector<std::uint8_t>>{};
    std::vector<std::uint8_t> buf(2048);
    ssize_t n = ::recvfrom(sock_.fd(), buf.data(), buf.size(), 0, nullptr, nullptr);
    if (n < 0) return Error{std::string("recvfrom: ") + std::strerror(errno)};
    buf.resize(static_cast<std::size_t>(n));
    return std::optional<std::vector<std::uint8_t>>{std::move(buf)};
  }

  Status<> join_multicast(const std::string& group, const std::string& iface) {
    ip_mreq mreq{};
    if (::inet_pton(AF_INET, group.c_str(), &mreq.imr_multiaddr) != 1)
      return Error{"bad multicast group: " + group};
    if (::inet_pton(AF_INET, iface.c_str(), &mreq.imr_interface) != 1)
      return Error{"bad multicast interface: " + iface};
    if (::setsockopt(sock_.fd(), IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof(mreq)) != 0)
      return Error{std::string("IP_ADD_MEMBERSHIP: ") + std::strerror(errno)};
    return ok_status();
  }

  Status<> set_multicast_send_iface(const std::string& iface) {
    in_addr addr{};
    if (::inet_pton(AF_INET, iface.c_str(), &addr) != 1)
      return Error{"bad multicast interface: " + iface};
    if (::setsockopt(sock_.fd(), IPPROTO_IP, IP_MULTICAST_IF, &addr, sizeof(addr)) != 0)
      return Error{std::string("IP_MULTICAST_IF: ") + std::strerror(errno)};
    int loop = 1;
    ::setsockopt(sock_.fd(), IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof(loop));
    return ok_status();
  }

  std::uint16_t local_port() const { return local_port_of(sock_.fd()); }
  bool valid() const { return sock_.valid(); }

 private:
  Socket sock_;
};

// Bind-and-release free-port pickers for test and harness setup. There is a
// small reuse race between release and the real bind; callers retry.
inline std::uint16_t pick_free_tcp_port() {
  auto lst = TcpListener::bind({"127.0.0.1", 0});
  return lst ? lst.value().local_port() : 0;
}

inline std::uint16_t pick_free_udp_port() {
  auto sock = UdpSocket::bind({"127.0.0.1", 0});
  return sock ? sock.value().local_port() : 0;
}

}  // namespace dexsim::net
