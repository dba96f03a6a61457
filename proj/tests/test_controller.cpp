#include <doctest.h>

#include <cmath>
#include <limits>

#include "arachne/controller.hpp"
#include "arachne/sensors.hpp"

using namespace arachne;
using namespace arachne::controller;
using sensors::Clearances;
using sensors::SensorFrame;

namespace {

SensorFrame frame(bool triggered)
{
  SensorFrame f;
  f.ultrasonic.triggered = triggered;
  f.ultrasonic.distance = triggered ? 0.2 : 2.0;
  return f;
}

ControllerState tasked(Mode mode, Eigen::Vector2d goal = {1.0, 0.0})
{
  ControllerState s;
  s.mode = mode;
  s.task = Task{goal, 0.08};
  if (mode == Mode::AvoidLeft || mode == Mode::AvoidRight || mode == Mode::AvoidBackward) {
    s.countdown = 2;
  }
  return s;
}

const arena::RobotPose kOrigin{0.0, 0.0, 0.0, 0.12};
const arena::RobotPose kAtGoal{1.0, 0.01, 0.0, 0.12};
const Clearances kOpen{1.0, 1.0, 1.0};

}  // namespace

TEST_CASE("idle halts whatever it senses")
{
  const ControllerParams p;
  for (bool trig : {false, true}) {
    const auto r = step(ControllerState{}, frame(trig), kOpen, kOrigin, p);
    CHECK(r.state.mode == Mode::Idle);
    CHECK(r.command == MotionCommand::Halt);
  }
}

TEST_CASE("triggered walk with more room on the left diverts left")
{
  const auto r = step(tasked(Mode::WalkForward), frame(true), Clearances{1.0, 0.2, 1.0}, kOrigin, ControllerParams{});
  CHECK(r.state.mode == Mode::AvoidLeft);
  CHECK(r.command == MotionCommand::Left);
  CHECK(r.state.countdown == ControllerParams{}.avoid_phases);
}

TEST_CASE("arrival stops the robot")
{
  const auto r = step(tasked(Mode::WalkForward), frame(false), kOpen, kAtGoal, ControllerParams{});
  CHECK(r.state.mode == Mode::Reached);
  CHECK(r.command == MotionCommand::Halt);
  // and it stays put
  const auto again = step(r.state, frame(true), kOpen, kOrigin, ControllerParams{});
  CHECK(again.state.mode == Mode::Reached);
  CHECK(again.command == MotionCommand::Halt);
}

TEST_CASE("choose_avoidance rule table")
{
  ControllerParams p;
  p.min_side_clearance = 0.3;
  const auto f = frame(true);
  CHECK(choose_avoidance(f, {1.0, 0.2, 0.0}, p) == Avoidance::Left);
  CHECK(choose_avoidance(f, {0.2, 1.0, 0.0}, p) == Avoidance::Right);
  CHECK(choose_avoidance(f, {0.1, 0.1, 0.0}, p) == Avoidance::Backward);
  CHECK(choose_avoidance(f, {1.0, 1.0, 0.0}, p) == Avoidance::Left);
  // inside the tie margin the left side wins
  CHECK(choose_avoidance(f, {1.0, 1.0 + 0.5 * p.tie_margin, 0.0}, p) == Avoidance::Left);
  CHECK(choose_avoidance(f, {0.25, 0.25 + 0.5 * p.tie_margin, 0.0}, p) == Avoidance::Backward);
}

TEST_CASE("backing up needs room behind")
{
  const auto blocked = step(tasked(Mode::WalkForward), frame(true), Clearances{0.1, 0.1, 0.05}, kOrigin,
                            ControllerParams{});
  CHECK(blocked.state.mode == Mode::AvoidLeft);
  const auto free = step(tasked(Mode::WalkForward), frame(true), Clearances{0.1, 0.1, 1.0}, kOrigin,
                         ControllerParams{});
  CHECK(free.state.mode == Mode::AvoidBackward);
  CHECK(free.command == MotionCommand::Backward);
}

TEST_CASE("a divert lasts avoid_phases phases then walking resumes")
{
  ControllerParams p;
  p.avoid_phases = 3;
  auto r = step(tasked(Mode::WalkForward), frame(true), Clearances{1.0, 0.2, 1.0}, kOrigin, p);
  int left = 1;
  while (r.state.mode == Mode::AvoidLeft) {
    r = step(r.state, frame(false), kOpen, kOrigin, p);
    if (r.command == MotionCommand::Left) {
      ++left;
    }
  }
  CHECK(left == 3);
  CHECK(r.state.mode == Mode::WalkForward);
  CHECK(r.command == MotionCommand::Forward);
  CHECK(r.state.hold == p.resume_phases - 1);
}

TEST_CASE("heading control turns toward the goal")
{
  const ControllerParams p;
  const auto behind = step(tasked(Mode::WalkForward, {0.0, 1.0}), frame(false), kOpen, kOrigin, p);
  CHECK(behind.command == MotionCommand::Left);
  const auto right = step(tasked(Mode::WalkForward, {0.0, -1.0}), frame(false), kOpen, kOrigin, p);
  CHECK(right.command == MotionCommand::Right);
  // 10 degrees off is within the threshold
  const auto close = step(tasked(Mode::WalkForward, {1.0, std::tan(deg_to_rad(10.0))}), frame(false), kOpen,
                          kOrigin, p);
  CHECK(close.command == MotionCommand::Forward);
}

TEST_CASE("a re-trigger soon after a divert keeps the same side")
{
  ControllerParams p;
  p.avoid_phases = 1;
  auto r = step(tasked(Mode::WalkForward), frame(true), Clearances{0.2, 1.0, 1.0}, kOrigin, p);
  CHECK(r.state.mode == Mode::AvoidRight);
  r = step(r.state, frame(false), kOpen, kOrigin, p);  // divert done, walking
  CHECK(r.state.mode == Mode::WalkForward);
  // the clearances now favour the left, but the encounter is remembered
  r = step(r.state, frame(true), Clearances{1.0, 0.2, 1.0}, kOrigin, p);
  CHECK(r.state.mode == Mode::AvoidRight);
}

TEST_CASE("FSM totality: every mode x trigger x arrival has one valid successor")
{
  const ControllerParams p;
  const Mode modes[] = {Mode::Idle, Mode::WalkForward, Mode::AvoidLeft, Mode::AvoidRight, Mode::AvoidBackward,
                        Mode::Reached};
  const Clearances clearances[] = {{1.0, 0.2, 1.0}, {0.2, 1.0, 1.0}, {0.1, 0.1, 1.0}, {0.1, 0.1, 0.0}, kOpen};
  int cases = 0;
  for (Mode m : modes) {
    for (bool trig : {false, true}) {
      for (bool goal : {false, true}) {
        for (const auto& c : clearances) {
          ControllerState s = m == Mode::Idle ? ControllerState{} : tasked(m);
          REQUIRE(s.valid());
          const auto pose = goal ? kAtGoal : kOrigin;
          const auto r = step(s, frame(trig), c, pose, p);
          ++cases;
          CHECK(r.state.valid());
          // Halt iff the resulting mode is Idle or Reached
          const bool resting = r.state.mode == Mode::Idle || r.state.mode == Mode::Reached;
          CHECK((r.command == MotionCommand::Halt) == resting);
          if (m == Mode::Idle) {
            CHECK(r.state.mode == Mode::Idle);
          } else if (goal || m == Mode::Reached) {
            CHECK(r.state.mode == Mode::Reached);
          }
          if (m == Mode::WalkForward && trig && !goal) {
            CHECK(r.state.countdown == p.avoid_phases);
          }
          // deterministic
          const auto again = step(s, frame(trig), c, pose, p);
          CHECK(again.state == r.state);
          CHECK(again.command == r.command);
        }
      }
    }
  }
  CHECK(cases == 6 * 2 * 2 * 5);
}

TEST_CASE("random walks through the FSM keep the state valid")
{
  sensors::RandomStream rng(77);
  ControllerParams p;
  ControllerState s;
  for (int i = 0; i < 20000; ++i) {
    if (rng.uniform() < 0.02) {
      s = handle_command(s, SetTask{rng.uniform(-2, 2), rng.uniform(-2, 2), 0.08});
    } else if (rng.uniform() < 0.005) {
      s = handle_command(s, Stop{});
    }
    const arena::RobotPose pose{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-kPi, kPi), 0.12};
    const Clearances c{rng.uniform(0, 1.5), rng.uniform(0, 1.5), rng.uniform(0, 1.5)};
    const auto r = step(s, frame(rng.uniform() < 0.3), c, pose, p);
    REQUIRE(r.state.valid());
    CHECK((r.command == MotionCommand::Halt) == (r.state.mode == Mode::Idle || r.state.mode == Mode::Reached));
    s = r.state;
  }
}

TEST_CASE("commands")
{
  const auto walking = handle_command(ControllerState{}, SetTask{1.0, 2.0, 0.1});
  CHECK(walking.mode == Mode::WalkForward);
  REQUIRE(walking.task);
  CHECK(walking.task->goal == Eigen::Vector2d(1.0, 2.0));
  CHECK(walking.task->radius == 0.1);

  const auto stopped = handle_command(walking, Stop{});
  CHECK(stopped.mode == Mode::Idle);
  CHECK_FALSE(stopped.task);

  // retask preempts avoidance
  auto avoiding = tasked(Mode::AvoidLeft);
  const auto retasked = handle_command(avoiding, SetTask{-1.0, 0.0, 0.1});
  CHECK(retasked.mode == Mode::WalkForward);
  CHECK(retasked.countdown == 0);
  CHECK(retasked.task->goal == Eigen::Vector2d(-1.0, 0.0));

  // reached robots take new tasks
  CHECK(handle_command(tasked(Mode::Reached), SetTask{0.0, 0.0, 0.1}).mode == Mode::WalkForward);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(handle_command(walking, SetTask{nan, 0.0, 0.1}), RejectedCommand);
  CHECK_THROWS_AS(handle_command(walking, SetTask{0.0, 0.0, 0.0}), RejectedCommand);
  CHECK_THROWS_AS(handle_command(walking, SetTask{0.0, INFINITY, 0.1}), RejectedCommand);

  // other commands leave the machine alone
  CHECK(handle_command(walking, SetRate{}) == walking);
}
