#include "arachne/telemetry/scheduler.hpp"

#include <cmath>
#include <stdexcept>

#include "arachne/angles.hpp"

namespace arachne::telemetry {

namespace {

std::uint64_t whole_ticks(double period, double dt, const char* name)
{
  const double ratio = period / dt;
  const double whole = std::round(ratio);
  if (!(whole >= 1.0) || std::abs(ratio - whole) > 1e-9 * whole) {
    throw std::invalid_argument(std::string(name) + " must be a positive whole number of ticks");
  }
  return static_cast<std::uint64_t>(whole);
}

}  // namespace

void Cadence::validate(double dt) const
{
  whole_ticks(temperature_period, dt, "temperature_period");
  whole_ticks(smoke_heartbeat, dt, "smoke_heartbeat");
  if (pose_decimation < 1 || joints_decimation < 1) {
    throw std::invalid_argument("decimations must be at least 1");
  }
  if (queue_limit < 1) {
    throw std::invalid_argument("queue_limit must be at least 1");
  }
}

Pose pose_payload(const arena::RobotPose& pose) { return {pose.x, pose.y, rad_to_deg(pose.heading)}; }

Joints joints_payload(const gait::LegJoints& joints)
{
  Joints j;
  for (std::size_t leg = 0; leg < 4; ++leg) {
    for (std::size_t k = 0; k < 3; ++k) {
      j.degrees[3 * leg + k] = rad_to_deg(joints[leg][k]);
    }
  }
  return j;
}

Scheduler::Scheduler(const Cadence& cadence, double dt) : cadence_(cadence), dt_(dt)
{
  cadence_.validate(dt_);
  recompute();
}

void Scheduler::recompute()
{
  temperature_ticks_ = whole_ticks(cadence_.temperature_period, dt_, "temperature_period");
  heartbeat_ticks_ = whole_ticks(cadence_.smoke_heartbeat, dt_, "smoke_heartbeat");
}

void Scheduler::apply(const SetRate& rate)
{
  Cadence next = cadence_;
  if (rate.temperature_period) next.temperature_period = *rate.temperature_period;
  if (rate.smoke_heartbeat) next.smoke_heartbeat = *rate.smoke_heartbeat;
  if (rate.pose_decimation) next.pose_decimation = *rate.pose_decimation;
  if (rate.joints_decimation) next.joints_decimation = *rate.joints_decimation;
  next.validate(dt_);
  cadence_ = next;
  recompute();
}

std::vector<TelemetryMessage> Scheduler::on_tick(const TickSnapshot& snap)
{
  std::vector<TelemetryMessage> out;
  auto emit = [&](Payload p) { out.push_back({0, snap.t_sim, std::move(p)}); };

  for (const Event& e : snap.events) {
    emit(e);
  }
  if (last_direction_ != snap.direction) {
    last_direction_ = snap.direction;
    emit(DirectionChange{snap.direction});
  }
  if (last_smoke_ != snap.frame.smoke || snap.tick - last_smoke_tick_ >= heartbeat_ticks_) {
    last_smoke_ = snap.frame.smoke;
    last_smoke_tick_ = snap.tick;
    emit(Smoke{snap.frame.smoke});
  }
  if (snap.tick - last_temperature_ >= temperature_ticks_) {
    last_temperature_ = snap.tick;
    emit(Temperature{snap.frame.temperature});
  }
  if (snap.tick % static_cast<std::uint64_t>(cadence_.pose_decimation) == 0) {
    emit(pose_payload(snap.pose));
  }
  if (snap.tick % static_cast<std::uint64_t>(cadence_.joints_decimation) == 0) {
    emit(joints_payload(snap.joints));
  }
  return out;
}

}  // namespace arachne::telemetry
