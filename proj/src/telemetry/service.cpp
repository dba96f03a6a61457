#include "arachne/telemetry/service.hpp"

#include <chrono>
#include <deque>
#include <future>
#include <iostream>
#include <istream>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace arachne::telemetry {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using boost::system::error_code;

namespace {

constexpr std::size_t kMaxLine = 64 * 1024;

}  // namespace

struct Connection;

struct Service::Impl : std::enable_shared_from_this<Service::Impl> {
  explicit Impl(ServiceOptions o) : options(std::move(o)), tcp_acceptor(io), ws_acceptor(io), grace(io) {}

  ServiceOptions options;
  asio::io_context io;
  tcp::acceptor tcp_acceptor;
  tcp::acceptor ws_acceptor;
  asio::steady_timer grace;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  std::thread thread;

  // I/O thread only
  std::set<std::shared_ptr<Connection>> connections;
  double last_t_sim = 0.0;
  bool stopping = false;
  std::uint64_t next_id = 1;

  std::atomic<std::size_t> client_count{0};
  std::atomic<std::size_t> dropped{0};
  std::mutex command_mutex;
  std::vector<Command> commands;
  std::mutex stop_mutex;
  bool stopped = false;

  void log(const std::string& line) const
  {
    if (options.log) {
      options.log(line);
    } else {
      std::cerr << "[telemetry] " << line << "\n";
    }
  }

  void bind(tcp::acceptor& acceptor, std::uint16_t port, const char* what);
  void accept_tcp();
  void accept_ws();
  void add(const std::shared_ptr<Connection>& c);
  void remove(const std::shared_ptr<Connection>& c);
};

struct Connection : std::enable_shared_from_this<Connection> {
  Connection(Service::Impl& owner, const char* kind) : owner(owner), kind(kind), id(owner.next_id++) {}
  virtual ~Connection() = default;

  Service::Impl& owner;
  const char* kind;
  std::uint64_t id;
  std::uint64_t seq = 0;
  std::deque<std::string> out;
  bool open = false;  ///< handshake done, writes allowed
  bool writing = false;
  bool closing = false;
  bool dead = false;

  virtual void start() = 0;
  virtual void write_front() = 0;
  virtual void graceful_close() = 0;
  virtual void force_close() = 0;

  std::string name() const { return std::string(kind) + " client #" + std::to_string(id); }

  void send(const TelemetryMessage& m)
  {
    if (dead) {
      return;
    }
    if (out.size() >= owner.options.queue_limit) {
      owner.dropped++;
      owner.log(name() + " dropped: outbound queue exceeded " + std::to_string(owner.options.queue_limit) +
                " messages");
      fail();
      return;
    }
    TelemetryMessage numbered = m;
    numbered.seq = seq++;
    out.push_back(encode(numbered));
    pump();
  }

  void pump()
  {
    if (open && !writing && !out.empty()) {
      writing = true;
      write_front();
    } else if (open && !writing && out.empty() && closing) {
      graceful_close();
    }
  }

  void on_written(const error_code& ec)
  {
    writing = false;
    if (ec) {
      fail();
      return;
    }
    out.pop_front();
    pump();
  }

  void handle_line(std::string_view line)
  {
    if (line.empty() || line == "\r") {
      return;
    }
    try {
      Command cmd = decode_command(line);
      std::lock_guard<std::mutex> lock(owner.command_mutex);
      owner.commands.push_back(std::move(cmd));
    } catch (const std::exception& e) {
      // The connection stays up; the client hears about its mistake.
      send(TelemetryMessage{0, owner.last_t_sim, Event{EventKind::ProtocolError, e.what()}});
    }
  }

  void begin_close()
  {
    closing = true;
    pump();
    if (!open) {
      fail();
    }
  }

  void fail()
  {
    if (dead) {
      return;
    }
    dead = true;
    force_close();
    owner.remove(shared_from_this());
  }
};

namespace {

struct TcpConnection : Connection {
  TcpConnection(Service::Impl& owner, tcp::socket s) : Connection(owner, "tcp"), socket(std::move(s)), input(kMaxLine)
  {
  }

  tcp::socket socket;
  asio::streambuf input;

  void start() override
  {
    open = true;
    read();
  }

  void read()
  {
    auto self = std::static_pointer_cast<TcpConnection>(shared_from_this());
    asio::async_read_until(socket, input, '\n', [self](const error_code& ec, std::size_t n) {
      if (self->dead) {
        return;
      }
      if (ec == asio::error::not_found) {
        self->send(TelemetryMessage{0, self->owner.last_t_sim, Event{EventKind::ProtocolError, "line too long"}});
        self->begin_close();
        return;
      }
      if (ec) {
        self->fail();
        return;
      }
      std::string line(asio::buffers_begin(self->input.data()), asio::buffers_begin(self->input.data()) + n);
      self->input.consume(n);
      self->handle_line(line);
      self->read();
    });
  }

  void write_front() override
  {
    auto self = shared_from_this();
    asio::async_write(socket, asio::buffer(out.front()),
                      [self](const error_code& ec, std::size_t) { self->on_written(ec); });
  }

  void graceful_close() override
  {
    // Half-close so the peer sees EOF after the last byte; the pending read then ends the connection.
    error_code ignored;
    socket.shutdown(tcp::socket::shutdown_send, ignored);
  }

  void force_close() override
  {
    error_code ignored;
    socket.close(ignored);
  }
};

struct WsConnection : Connection {
  WsConnection(Service::Impl& owner, tcp::socket s) : Connection(owner, "websocket"), ws(std::move(s)) {}

  websocket::stream<beast::tcp_stream> ws;
  beast::flat_buffer input;
  std::string partial;
  bool close_sent = false;

  void start() override
  {
    ws.read_message_max(kMaxLine);
    ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    auto self = std::static_pointer_cast<WsConnection>(shared_from_this());
    ws.async_accept([self](const error_code& ec) {
      if (self->dead) {
        return;
      }
      if (ec) {
        self->fail();
        return;
      }
      self->ws.text(true);
      self->open = true;
      self->owner.add(self);
      self->pump();
      self->read();
    });
  }

  void read()
  {
    auto self = std::static_pointer_cast<WsConnection>(shared_from_this());
    ws.async_read(input, [self](const error_code& ec, std::size_t) {
      if (self->dead) {
        return;
      }
      if (ec) {
        self->fail();
        return;
      }
      // One frame may carry several lines, or a line without its LF.
      self->partial += beast::buffers_to_string(self->input.data());
      self->input.consume(self->input.size());
      std::size_t at;
      while ((at = self->partial.find('\n')) != std::string::npos) {
        self->handle_line(std::string_view(self->partial).substr(0, at));
        self->partial.erase(0, at + 1);
      }
      if (!self->partial.empty()) {
        self->handle_line(self->partial);
        self->partial.clear();
      }
      self->read();
    });
  }

  void write_front() override
  {
    auto self = shared_from_this();
    ws.async_write(asio::buffer(out.front()), [self](const error_code& ec, std::size_t) { self->on_written(ec); });
  }

  void graceful_close() override
  {
    if (close_sent) {
      return;
    }
    close_sent = true;
    auto self = shared_from_this();
    ws.async_close(websocket::close_code::normal, [self](const error_code&) { self->fail(); });
  }

  void force_close() override
  {
    error_code ignored;
    beast::get_lowest_layer(ws).socket().close(ignored);
  }
};

}  // namespace

void Service::Impl::bind(tcp::acceptor& acceptor, std::uint16_t port, const char* what)
{
  error_code ec;
  const auto address = asio::ip::make_address(options.address, ec);
  if (ec) {
    throw BindError(std::string("invalid address '") + options.address + "': " + ec.message());
  }
  const tcp::endpoint endpoint(address, port);
  acceptor.open(endpoint.protocol(), ec);
  if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acceptor.bind(endpoint, ec);
  if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw BindError(std::string("cannot listen for ") + what + " on " + options.address + ":" + std::to_string(port) +
                    ": " + ec.message());
  }
}

void Service::Impl::accept_tcp()
{
  tcp_acceptor.async_accept([self = shared_from_this()](const error_code& ec, tcp::socket socket) {
    if (ec || self->stopping) {
      return;
    }
    auto c = std::make_shared<TcpConnection>(*self, std::move(socket));
    self->add(c);
    c->start();
    self->accept_tcp();
  });
}

void Service::Impl::accept_ws()
{
  ws_acceptor.async_accept([self = shared_from_this()](const error_code& ec, tcp::socket socket) {
    if (ec || self->stopping) {
      return;
    }
    // joins the fan-out once the upgrade handshake succeeds
    std::make_shared<WsConnection>(*self, std::move(socket))->start();
    self->accept_ws();
  });
}

void Service::Impl::add(const std::shared_ptr<Connection>& c)
{
  if (stopping) {
    c->fail();
    return;
  }
  connections.insert(c);
  client_count = connections.size();
}

void Service::Impl::remove(const std::shared_ptr<Connection>& c)
{
  connections.erase(c);
  client_count = connections.size();
  if (stopping && connections.empty()) {
    grace.cancel();
  }
}

Service::Service(ServiceOptions options) : impl_(std::make_shared<Impl>(std::move(options)))
{
  impl_->bind(impl_->tcp_acceptor, impl_->options.tcp_port, "TCP");
  impl_->bind(impl_->ws_acceptor, impl_->options.ws_port, "WebSocket");
  impl_->accept_tcp();
  impl_->accept_ws();
  impl_->work.emplace(asio::make_work_guard(impl_->io));
  impl_->thread = std::thread([impl = impl_] { impl->io.run(); });
}

Service::~Service() { stop(); }

std::uint16_t Service::tcp_port() const { return impl_->tcp_acceptor.local_endpoint().port(); }
std::uint16_t Service::ws_port() const { return impl_->ws_acceptor.local_endpoint().port(); }

void Service::publish(std::vector<TelemetryMessage> batch)
{
  if (batch.empty()) {
    return;
  }
  asio::post(impl_->io, [impl = impl_, batch = std::move(batch)] {
    impl->last_t_sim = batch.back().t_sim;
    // copy: a drop inside send() edits the set
    const auto targets = impl->connections;
    for (const auto& c : targets) {
      for (const auto& m : batch) {
        c->send(m);
      }
    }
  });
}

std::vector<Command> Service::drain_commands()
{
  std::lock_guard<std::mutex> lock(impl_->command_mutex);
  std::vector<Command> out;
  out.swap(impl_->commands);
  return out;
}

std::size_t Service::client_count() const { return impl_->client_count; }
std::size_t Service::dropped_clients() const { return impl_->dropped; }

void Service::flush()
{
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
  while (std::chrono::steady_clock::now() < deadline) {
    std::promise<bool> idle;
    auto done = idle.get_future();
    asio::post(impl_->io, [impl = impl_, &idle] {
      bool all = true;
      for (const auto& c : impl->connections) {
        all = all && c->out.empty() && !c->writing;
      }
      idle.set_value(all);
    });
    if (done.wait_for(std::chrono::seconds(5)) != std::future_status::ready || done.get()) {
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

void Service::stop()
{
  std::lock_guard<std::mutex> lock(impl_->stop_mutex);
  if (impl_->stopped) {
    return;
  }
  impl_->stopped = true;
  asio::post(impl_->io, [impl = impl_] {
    impl->stopping = true;
    error_code ignored;
    impl->tcp_acceptor.close(ignored);
    impl->ws_acceptor.close(ignored);
    const auto targets = impl->connections;
    for (const auto& c : targets) {
      c->begin_close();
    }
    if (impl->connections.empty()) {
      return;
    }
    // Peers that never close their end get cut off.
    impl->grace.expires_after(std::chrono::seconds(2));
    impl->grace.async_wait([impl](const error_code& ec) {
      if (ec) {
        return;
      }
      const auto rest = impl->connections;
      for (const auto& c : rest) {
        c->fail();
      }
    });
  });
  impl_->work.reset();
  if (impl_->thread.joinable()) {
    impl_->thread.join();
  }
}

sim::RunSummary serve_simulation(sim::Simulation& simulation, Scheduler& scheduler, Service* service,
                                 const CommandScript& script, const ServeOptions& options)
{
  const auto wall_start = std::chrono::steady_clock::now();
  const double dt = simulation.config().dt;
  std::size_t next = 0;
  bool first = true;
  while (!(options.stop && options.stop->load()) &&
         (options.max_ticks == 0 || simulation.summary().ticks < options.max_ticks)) {
    std::vector<Command> due;
    if (first && simulation.config().task) {
      due.push_back(*simulation.config().task);
    }
    first = false;
    const auto now = static_cast<double>(simulation.world().tick);
    while (next < script.size() && script[next].t_sim / dt <= now + 1e-9) {
      due.push_back(script[next++].command);
    }
    if (service) {
      for (Command& c : service->drain_commands()) {
        due.push_back(std::move(c));
      }
    }
    std::vector<Event> rate_errors;
    for (const Command& c : due) {
      if (const auto* r = std::get_if<SetRate>(&c)) {
        try {
          scheduler.apply(*r);
        } catch (const std::invalid_argument& e) {
          rate_errors.push_back({EventKind::ProtocolError, std::string("set_rate rejected: ") + e.what()});
        }
      }
    }
    const sim::TickRecord& rec = simulation.tick(due);
    TickSnapshot snap = simulation.snapshot();
    snap.events.insert(snap.events.end(), rate_errors.begin(), rate_errors.end());
    auto batch = scheduler.on_tick(snap);
    if (service) {
      service->publish(std::move(batch));
    }
    if (options.on_tick) {
      options.on_tick(rec);
    }
    if (options.throttle) {
      std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                     std::chrono::duration<double>(rec.t_sim)));
    }
  }
  sim::RunSummary summary = simulation.summary();
  if (summary.reached && simulation.controller_state().mode == controller::Mode::Reached) {
    summary.outcome = sim::Outcome::Reached;
  } else if (simulation.settled() && next == script.size()) {
    summary.outcome = sim::Outcome::Idle;
  } else {
    summary.outcome = sim::Outcome::TickBudgetExceeded;
  }
  return summary;
}

}  // namespace arachne::telemetry
