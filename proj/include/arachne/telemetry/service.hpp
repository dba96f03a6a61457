#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "arachne/commands.hpp"
#include "arachne/simulation.hpp"
#include "arachne/telemetry/protocol.hpp"
#include "arachne/telemetry/scheduler.hpp"

namespace arachne::telemetry {

class BindError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ServiceOptions {
  std::string address = "127.0.0.1";
  std::uint16_t tcp_port = 7411;  ///< 0 picks a free port
  std::uint16_t ws_port = 7412;
  std::size_t queue_limit = 4096;
  std::function<void(const std::string&)> log;  ///< defaults to stderr
};

/// NDJSON publisher on a plain TCP port and a WebSocket port, with an inbound command queue.
/// Runs its own I/O thread; publish() and drain_commands() may be called from the simulation thread.
class Service {
public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  std::uint16_t tcp_port() const;
  std::uint16_t ws_port() const;

  /// Hands one tick's messages to every connected client; each client numbers them with its own seq.
  void publish(std::vector<TelemetryMessage> batch);
  /// Commands received since the last call, in arrival order.
  std::vector<Command> drain_commands();

  std::size_t client_count() const;
  std::size_t dropped_clients() const;

  /// Blocks until everything published so far has been handed to the sockets.
  void flush();
  /// Sends what is queued, closes every connection and joins the I/O thread. Idempotent.
  void stop();

  struct Impl;  ///< defined in the .cpp; public only so connection types can name it

private:
  std::shared_ptr<Impl> impl_;
};

struct ServeOptions {
  bool throttle = true;          ///< pace simulated time to the wall clock
  std::uint64_t max_ticks = 0;   ///< 0 runs until `stop` is set
  const std::atomic<bool>* stop = nullptr;
  /// Called after each tick with the record, e.g. to capture the trajectory in tests.
  std::function<void(const sim::TickRecord&)> on_tick;
};

/// The serve loop: drain commands, tick, schedule, publish. Returns the run summary.
sim::RunSummary serve_simulation(sim::Simulation& simulation, Scheduler& scheduler, Service* service,
                                 const CommandScript& script, const ServeOptions& options);

}  // namespace arachne::telemetry
