/** Copyright 2026 The graphroute Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "graphroute/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

namespace graphroute {

namespace {

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

bool write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw ConfigError("endpoint must be host:port");
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  const std::string_view port = text.substr(colon + 1);
  auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), ep.port);
  if (ec != std::errc() || p != port.data() + port.size()) {
    throw ConfigError("bad port in endpoint '" + std::string(text) + "'");
  }
  return ep;
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

// ---------------------------------------------------------------------------
// FrameConnection

FrameConnection::~FrameConnection() { close(); }

FrameConnection::FrameConnection(FrameConnection&& o) noexcept
    : fd_(std::exchange(o.fd_, -1)), inbox_(std::move(o.inbox_)) {}

FrameConnection& FrameConnection::operator=(FrameConnection&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = std::exchange(o.fd_, -1);
    inbox_ = std::move(o.inbox_);
  }
  return *this;
}

void FrameConnection::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  inbox_.clear();
}

FrameConnection FrameConnection::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve " + ep.to_string());
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw TransportError(errno_text("socket"));
  }
  FrameConnection c(fd);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
    if (errno == EINTR) continue;
    if ((errno == ECONNREFUSED || errno == EAGAIN) &&
        std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      continue;
    }
    ::freeaddrinfo(res);
    throw TransportError(errno_text(("connect " + ep.to_string()).c_str()));
  }
  ::freeaddrinfo(res);
  set_nodelay(fd);
  return c;
}

void FrameConnection::send(wire::Op op, std::span<const std::uint8_t> payload) {
  if (fd_ < 0) throw TransportError("connection closed");
  const auto bytes = wire::encode_frame(op, payload);
  if (!write_all(fd_, bytes.data(), bytes.size())) {
    close();
    throw TransportError(errno_text("send"));
  }
}

wire::Frame FrameConnection::receive(std::chrono::milliseconds timeout) {
  if (fd_ < 0) throw TransportError("connection closed");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::uint8_t buf[64 * 1024];
  for (;;) {
    std::size_t consumed = 0;
    std::optional<wire::Frame> f;
    try {
      f = wire::decode_frame(inbox_, consumed);
    } catch (const wire::ProtocolError& e) {
      close();
      throw TransportError(std::string("protocol: ") + e.what());
    }
    if (f) {
      inbox_.erase(inbox_.begin(), inbox_.begin() + static_cast<std::ptrdiff_t>(consumed));
      return std::move(*f);
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      close();
      throw TransportError("timed out waiting for a frame");
    }
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) continue;
    const ssize_t r = ::recv(fd_, buf, sizeof buf, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) {
      close();
      throw TransportError("peer closed the connection");
    }
    inbox_.insert(inbox_.end(), buf, buf + r);
  }
}

wire::Frame FrameConnection::call(wire::Op op, std::span<const std::uint8_t> payload,
                                  std::chrono::milliseconds timeout) {
  send(op, payload);
  return receive(timeout);
}

// ---------------------------------------------------------------------------
// FrameServer

FrameServer::FrameServer(Handler handle, std::uint16_t port, std::string host)
    : handle_(std::move(handle)), host_(std::move(host)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw ConfigError("bad listen address " + host_);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string msg = errno_text("bind/listen");
    ::close(listen_fd_);
    throw TransportError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

FrameServer::~FrameServer() { stop(); }

void FrameServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

void FrameServer::accept_loop() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    set_nodelay(fd);
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    client_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

void FrameServer::serve(int fd) {
  std::vector<std::uint8_t> inbox;
  std::uint8_t buf[64 * 1024];
  for (;;) {
    std::size_t consumed = 0;
    std::optional<wire::Frame> f;
    try {
      f = wire::decode_frame(inbox, consumed);
    } catch (const wire::ProtocolError& e) {
      const auto err = wire::encode_error(wire::ErrorCode::kBadRequest, e.what());
      const auto bytes = wire::encode_frame(wire::Op::kError, err);
      write_all(fd, bytes.data(), bytes.size());
      break;
    }
    if (f) {
      inbox.erase(inbox.begin(), inbox.begin() + static_cast<std::ptrdiff_t>(consumed));
      wire::Frame reply;
      try {
        reply = handle_(*f);
      } catch (const wire::ProtocolError& e) {
        reply = {wire::Op::kError, wire::encode_error(wire::ErrorCode::kBadRequest, e.what())};
      } catch (const std::exception& e) {
        reply = {wire::Op::kError, wire::encode_error(wire::ErrorCode::kInternal, e.what())};
      }
      const auto bytes = wire::encode_frame(reply.op, reply.payload);
      if (!write_all(fd, bytes.data(), bytes.size())) break;
      continue;
    }
    const ssize_t r = ::recv(fd, buf, sizeof buf, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    inbox.insert(inbox.end(), buf, buf + r);
  }
  std::lock_guard lock(mu_);
  std::erase(client_fds_, fd);
  ::close(fd);
}

// ---------------------------------------------------------------------------
// Storage

StorageServer::StorageServer(StorageTier& tier, Graph* graph, std::uint16_t port)
    : tier_(tier), graph_(graph), server_([this](const wire::Frame& f) { return handle(f); }, port) {}

wire::Frame StorageServer::handle(const wire::Frame& f) {
  switch (f.op) {
    case wire::Op::kGetAdj: {
      const NodeId id = wire::decode_get_adj(f.payload);
      try {
        return {wire::Op::kAdjResp, wire::encode_adjacency(tier_.get(id))};
      } catch (const NotFoundError& e) {
        return {wire::Op::kError, wire::encode_error(wire::ErrorCode::kNotFound, e.what())};
      }
    }
    case wire::Op::kUpdate: {
      if (graph_ == nullptr) {
        return {wire::Op::kError,
                wire::encode_error(wire::ErrorCode::kBadRequest, "server is read-only")};
      }
      const GraphUpdate u = wire::decode_update(f.payload);
      std::lock_guard lock(update_mu_);
      try {
        const UpdateReceipt r = tier_.apply_update(*graph_, u);
        return {wire::Op::kUpdateAck, wire::encode_update_ack(r.affected)};
      } catch (const NotFoundError& e) {
        return {wire::Op::kError, wire::encode_error(wire::ErrorCode::kNotFound, e.what())};
      } catch (const PreconditionError& e) {
        return {wire::Op::kError, wire::encode_error(wire::ErrorCode::kBadRequest, e.what())};
      }
    }
    default:
      return {wire::Op::kError,
              wire::encode_error(wire::ErrorCode::kBadRequest, "unexpected opcode")};
  }
}

TcpStorageClient::TcpStorageClient(std::vector<Endpoint> servers, StoragePartitionMap map,
                                   std::chrono::milliseconds timeout)
    : endpoints_(std::move(servers)), map_(std::move(map)), timeout_(timeout) {
  if (endpoints_.size() != map_.num_servers()) {
    throw ConfigError("partition map has " + std::to_string(map_.num_servers()) +
                      " servers but " + std::to_string(endpoints_.size()) +
                      " endpoints were given");
  }
  conns_.resize(endpoints_.size());
}

namespace {

[[noreturn]] void raise_remote(const wire::Frame& f, NodeId id) {
  if (f.op != wire::Op::kError) throw TransportError("unexpected reply opcode");
  const auto err = wire::decode_error(f.payload);
  switch (err.code) {
    case wire::ErrorCode::kNotFound: throw NotFoundError(id);
    case wire::ErrorCode::kBadRequest: throw PreconditionError(err.message);
    case wire::ErrorCode::kInternal: break;
  }
  throw TransportError("remote error: " + err.message);
}

}  // namespace

AdjacencyEntry TcpStorageClient::get(NodeId id) {
  const std::size_t s = map_.server_of(id);
  auto& c = conns_[s];
  if (!c.is_open()) c = FrameConnection::connect(endpoints_[s], timeout_);
  const auto req = wire::encode_get_adj(id);
  const wire::Frame f = c.call(wire::Op::kGetAdj, req, timeout_);
  if (f.op != wire::Op::kAdjResp) raise_remote(f, id);
  return wire::decode_adjacency(f.payload);
}

std::vector<NodeId> TcpStorageClient::update(const GraphUpdate& u) {
  // Updates go through server 0; the tier's writer path fans out to all
  // partitions.
  auto& c = conns_[0];
  if (!c.is_open()) c = FrameConnection::connect(endpoints_[0], timeout_);
  const auto req = wire::encode_update(u);
  const wire::Frame f = c.call(wire::Op::kUpdate, req, timeout_);
  if (f.op != wire::Op::kUpdateAck) raise_remote(f, 0);
  return wire::decode_update_ack(f.payload);
}

// ---------------------------------------------------------------------------
// Processor

ProcessorServer::ProcessorServer(Processor& processor, std::uint16_t port)
    : processor_(processor),
      server_([this](const wire::Frame& f) { return handle(f); }, port) {}

wire::Frame ProcessorServer::handle(const wire::Frame& f) {
  if (f.op != wire::Op::kQuery) {
    return {wire::Op::kError,
            wire::encode_error(wire::ErrorCode::kBadRequest, "expected QUERY")};
  }
  const Query q = wire::decode_query(f.payload);
  std::lock_guard lock(mu_);
  try {
    return {wire::Op::kAck, wire::encode_ack(processor_.execute(q))};
  } catch (const NotFoundError& e) {
    return {wire::Op::kError, wire::encode_error(wire::ErrorCode::kNotFound, e.what())};
  } catch (const PreconditionError& e) {
    return {wire::Op::kError, wire::encode_error(wire::ErrorCode::kBadRequest, e.what())};
  }
}

TcpProcessorHandle::TcpProcessorHandle(Endpoint ep, std::chrono::milliseconds timeout)
    : ep_(std::move(ep)), timeout_(timeout) {}

QueryResult TcpProcessorHandle::execute(const Query& q) {
  if (!conn_.is_open()) conn_ = FrameConnection::connect(ep_, timeout_);
  const auto req = wire::encode_query(q);
  const wire::Frame f = conn_.call(wire::Op::kQuery, req, timeout_);
  if (f.op == wire::Op::kAck) return wire::decode_ack(f.payload);
  raise_remote(f, q.source);
}

}  // namespace graphroute
