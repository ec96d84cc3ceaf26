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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "graphroute/processor.hpp"
#include "graphroute/router.hpp"
#include "graphroute/storage.hpp"
#include "graphroute/wire.hpp"

namespace graphroute {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  static Endpoint parse(std::string_view text);  // "host:port"
  std::string to_string() const;
};

// Blocking TCP connection speaking wire frames.
class FrameConnection {
 public:
  FrameConnection() = default;
  explicit FrameConnection(int fd) : fd_(fd) {}
  ~FrameConnection();
  FrameConnection(FrameConnection&& o) noexcept;
  FrameConnection& operator=(FrameConnection&& o) noexcept;
  FrameConnection(const FrameConnection&) = delete;
  FrameConnection& operator=(const FrameConnection&) = delete;

  // Throws TransportError.
  static FrameConnection connect(const Endpoint& ep, std::chrono::milliseconds timeout);

  bool is_open() const noexcept { return fd_ >= 0; }
  void send(wire::Op op, std::span<const std::uint8_t> payload);
  // Throws TransportError on timeout or a closed peer.
  wire::Frame receive(std::chrono::milliseconds timeout);
  wire::Frame call(wire::Op op, std::span<const std::uint8_t> payload,
                   std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  std::vector<std::uint8_t> inbox_;
};

// Accept loop plus one thread per connection; each request frame is answered
// by `handle`. Binds 127.0.0.1 (port 0 picks an ephemeral port).
class FrameServer {
 public:
  using Handler = std::function<wire::Frame(const wire::Frame&)>;

  FrameServer(Handler handle, std::uint16_t port = 0, std::string host = "127.0.0.1");
  ~FrameServer();
  FrameServer(const FrameServer&) = delete;
  FrameServer& operator=(const FrameServer&) = delete;

  Endpoint endpoint() const { return {host_, port_}; }
  void stop();

 private:
  void accept_loop();
  void serve(int fd);

  Handler handle_;
  std::string host_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<int> client_fds_;
  std::list<std::thread> workers_;
};

// One storage server: answers GET_ADJ from the tier and, when a graph is
// attached, applies UPDATE frames through the tier's single writer path.
class StorageServer {
 public:
  StorageServer(StorageTier& tier, Graph* graph = nullptr, std::uint16_t port = 0);
  Endpoint endpoint() const { return server_.endpoint(); }
  void stop() { server_.stop(); }

 private:
  wire::Frame handle(const wire::Frame& f);

  StorageTier& tier_;
  Graph* graph_;
  std::mutex update_mu_;
  FrameServer server_;
};

// StorageClient over TCP: one connection per storage server, chosen with the
// same partition map the tier uses.
class TcpStorageClient final : public StorageClient {
 public:
  TcpStorageClient(std::vector<Endpoint> servers, StoragePartitionMap map,
                   std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

  AdjacencyEntry get(NodeId id) override;
  std::size_t server_of(NodeId id) const override { return map_.server_of(id); }
  std::size_t num_servers() const override { return map_.num_servers(); }

  std::vector<NodeId> update(const GraphUpdate& u);

 private:
  std::vector<Endpoint> endpoints_;
  StoragePartitionMap map_;
  std::chrono::milliseconds timeout_;
  std::vector<FrameConnection> conns_;
};

// A processor reachable over TCP: QUERY in, ACK out, one at a time.
class ProcessorServer {
 public:
  explicit ProcessorServer(Processor& processor, std::uint16_t port = 0);
  Endpoint endpoint() const { return server_.endpoint(); }
  void stop() { server_.stop(); }

 private:
  wire::Frame handle(const wire::Frame& f);

  Processor& processor_;
  std::mutex mu_;
  FrameServer server_;
};

class TcpProcessorHandle final : public ProcessorHandle {
 public:
  TcpProcessorHandle(Endpoint ep,
                     std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));
  QueryResult execute(const Query& q) override;

 private:
  Endpoint ep_;
  std::chrono::milliseconds timeout_;
  FrameConnection conn_;
};

}  // namespace graphroute
