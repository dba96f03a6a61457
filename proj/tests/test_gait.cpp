#include <doctest.h>

#include <cmath>
#include <sstream>

#include "arachne/angles.hpp"
#include "arachne/gait.hpp"
#include "arachne/servo.hpp"

using namespace arachne;
using namespace arachne::gait;

namespace {

constexpr std::array<Direction, 4> kDirections{Direction::Forward, Direction::Left, Direction::Right,
                                               Direction::Backward};

Eigen::Vector2d world_foot(const Eigen::Vector3d& pose, const Eigen::Vector3d& foot_body)
{
  const double c = std::cos(pose.z());
  const double s = std::sin(pose.z());
  return {pose.x() + c * foot_body.x() - s * foot_body.y(), pose.y() + s * foot_body.x() + c * foot_body.y()};
}

}  // namespace

TEST_CASE("forward swing order is Leg1, Leg3, Leg4, Leg2")
{
  const auto plan = plan_cycle(default_model(), GaitConfig{}, Direction::Forward);
  REQUIRE(plan.phase_count() == 4);
  CHECK(plan.phase(0).swing_leg == LegId::Leg1);
  CHECK(plan.phase(1).swing_leg == LegId::Leg3);
  CHECK(plan.phase(2).swing_leg == LegId::Leg4);
  CHECK(plan.phase(3).swing_leg == LegId::Leg2);
  CHECK(plan.phase(4).swing_leg == LegId::Leg1);
}

TEST_CASE("turning gaits keep the forward order, backward reverses it")
{
  for (auto dir : {Direction::Left, Direction::Right}) {
    const auto plan = plan_cycle(default_model(), GaitConfig{}, dir);
    for (int j = 0; j < 4; ++j) {
      CHECK(plan.phase(j).swing_leg == kForwardSwingOrder[j]);
    }
  }
  const auto back = plan_cycle(default_model(), GaitConfig{}, Direction::Backward);
  CHECK(back.phase(0).swing_leg == LegId::Leg2);
  CHECK(back.phase(1).swing_leg == LegId::Leg4);
  CHECK(back.phase(2).swing_leg == LegId::Leg3);
  CHECK(back.phase(3).swing_leg == LegId::Leg1);
}

TEST_CASE("zero stride plan is stationary")
{
  GaitConfig cfg;
  cfg.stride_length = 0.0;
  const auto plan = plan_cycle(default_model(), cfg, Direction::Forward);
  for (const auto& ph : plan.phases) {
    CHECK(ph.body_motion.is_zero());
    for (int l = 0; l < 4; ++l) {
      CHECK(ph.foot_start[l] == ph.foot_end[l]);
    }
  }
  const auto trace = joint_trace(plan, 10, 1);
  for (std::size_t s = 1; s < trace.size(); ++s) {
    for (int l = 0; l < 4; ++l) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(trace.joints[s][l][j] - trace.joints[0][l][j]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("every foot target of the default plans is reachable and solvable")
{
  const auto model = default_model();
  for (auto dir : kDirections) {
    const auto plan = plan_cycle(model, GaitConfig{}, dir);
    for (std::size_t ph = 0; ph < 4; ++ph) {
      for (int i = 0; i <= 200; ++i) {
        for (LegId leg : kAllLegs) {
          const auto target = foot_trajectory(plan, ph, leg, i / 200.0);
          REQUIRE(kinematics::reachable(model.leg, target));
          REQUIRE(kinematics::try_inverse_kinematics(model.leg, target, plan.config.branch).has_value());
        }
      }
    }
  }
}

TEST_CASE("front legs use the front 3/4 of their range, rear legs the rear 3/4")
{
  const auto plan = plan_cycle(default_model(), GaitConfig{}, Direction::Forward);
  for (LegId leg : kAllLegs) {
    const auto& range = plan.sagittal_range[index(leg)];
    const auto& part = plan.partition[index(leg)];
    CHECK(part.length() == doctest::Approx(0.75 * range.length()));
    if (is_front(leg)) {
      CHECK(part.max == range.max);
    } else {
      CHECK(part.min == range.min);
    }
  }
  for (auto dir : kDirections) {
    const auto p = plan_cycle(default_model(), GaitConfig{}, dir);
    for (std::size_t ph = 0; ph < 4; ++ph) {
      for (int i = 0; i <= 100; ++i) {
        for (LegId leg : kAllLegs) {
          CHECK(p.partition[index(leg)].contains(foot_in_body(p, ph, leg, i / 100.0).x(), 1e-12));
        }
      }
    }
  }
}

TEST_CASE("sagittal range edges are the last solvable points")
{
  const auto model = default_model();
  const GaitConfig cfg;
  for (LegId leg : kAllLegs) {
    const auto range = sagittal_range(model, cfg, leg);
    const double y = (is_left(leg) ? 1.0 : -1.0) * (model.body.hip_y + cfg.stance_y_offset);
    auto solvable = [&](double x) {
      return kinematics::try_inverse_kinematics(model.leg, body_to_shoulder(model, leg, {x, y, -cfg.body_height}),
                                                cfg.branch)
          .has_value();
    };
    CHECK(solvable(range.min + 1e-9));
    CHECK(solvable(range.max - 1e-9));
    CHECK_FALSE(solvable(range.min - 1e-6));
    CHECK_FALSE(solvable(range.max + 1e-6));
    // Symmetric about the hip for laterally mounted legs.
    CHECK(range.max - model.body.hip(leg).x() == doctest::Approx(model.body.hip(leg).x() - range.min));
  }
}

TEST_CASE("foot_trajectory endpoints and swing apex")
{
  const GaitConfig cfg;
  const auto plan = plan_cycle(default_model(), cfg, Direction::Forward);
  for (std::size_t ph = 0; ph < 4; ++ph) {
    const auto& phase = plan.phase(ph);
    for (LegId leg : kAllLegs) {
      const auto p0 = foot_in_body(plan, ph, leg, 0.0);
      const auto p1 = foot_in_body(plan, ph, leg, 1.0);
      CHECK((p0.head<2>() - phase.foot_start[index(leg)]).norm() <= 1e-15);
      CHECK((p1.head<2>() - phase.foot_end[index(leg)]).norm() <= 1e-15);
      CHECK(p0.z() == -cfg.body_height);
      CHECK(std::abs(p1.z() + cfg.body_height) <= 1e-15);
      // Phases chain without jumps.
      CHECK((phase.foot_end[index(leg)] - plan.phase(ph + 1).foot_start[index(leg)]).norm() <= 1e-15);
    }
    const auto apex = foot_in_body(plan, ph, phase.swing_leg, 0.5);
    CHECK(apex.z() + cfg.body_height == doctest::Approx(cfg.step_height));
  }
}

TEST_CASE("stance feet stay fixed in the world while the body moves")
{
  for (auto dir : kDirections) {
    const auto plan = plan_cycle(default_model(), GaitConfig{}, dir);
    Eigen::Vector3d phase_start(0.3, -0.2, 0.7);
    for (std::size_t ph = 0; ph < 8; ++ph) {
      const auto& phase = plan.phase(ph);
      for (LegId leg : kAllLegs) {
        if (phase.swing_leg == leg) {
          continue;
        }
        const auto anchor = world_foot(phase_start, foot_in_body(plan, ph, leg, 0.0));
        for (int i = 1; i <= 50; ++i) {
          const double t = i / 50.0;
          const auto pose = apply_motion(phase_start, motion_at(phase.body_motion, t));
          CHECK((world_foot(pose, foot_in_body(plan, ph, leg, t)) - anchor).norm() <= 1e-12);
        }
      }
      phase_start = apply_motion(phase_start, phase.body_motion);
    }
  }
}

TEST_CASE("exactly one swing leg at every sample")
{
  for (auto dir : kDirections) {
    const auto plan = plan_cycle(default_model(), GaitConfig{}, dir);
    for (std::size_t ph = 0; ph < 40; ++ph) {
      int swinging = 0;
      for (LegId leg : kAllLegs) {
        swinging += in_swing(plan, ph, leg) ? 1 : 0;
      }
      CHECK(swinging == 1);
    }
  }
}

TEST_CASE("backward is forward with time reversed")
{
  const auto fwd = plan_cycle(default_model(), GaitConfig{}, Direction::Forward);
  const auto back = plan_cycle(default_model(), GaitConfig{}, Direction::Backward);
  for (std::size_t ph = 0; ph < 4; ++ph) {
    const auto& b = back.phase(ph);
    const auto& f = fwd.phase(3 - ph);
    CHECK((b.body_motion.translation + f.body_motion.translation).norm() == 0.0);
    for (int i = 0; i <= 40; ++i) {
      const double t = i / 40.0;
      for (LegId leg : kAllLegs) {
        CHECK((foot_in_body(back, ph, leg, t) - foot_in_body(fwd, 3 - ph, leg, 1.0 - t)).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("cycle motion: forward travels one stride, turns rotate in place")
{
  GaitConfig cfg;
  const auto fwd = plan_cycle(default_model(), cfg, Direction::Forward).cycle_motion();
  CHECK(fwd.translation.x() == doctest::Approx(cfg.stride_length));
  CHECK(fwd.heading_change == 0.0);
  const auto left = plan_cycle(default_model(), cfg, Direction::Left).cycle_motion();
  CHECK(left.translation.norm() == 0.0);
  CHECK(left.heading_change == doctest::Approx(cfg.turn_angle));
  const auto right = plan_cycle(default_model(), cfg, Direction::Right).cycle_motion();
  CHECK(right.heading_change == doctest::Approx(-cfg.turn_angle));
}

TEST_CASE("joint traces are periodic, continuous and round-trip through FK")
{
  const GaitConfig cfg;
  for (auto dir : kDirections) {
    const auto plan = plan_cycle(default_model(), cfg, dir);
    constexpr std::size_t n = 25;
    const auto trace = joint_trace(plan, n, 3);
    const std::size_t period = 4 * n;
    REQUIRE(trace.size() == 3 * period);
    for (std::size_t s = 0; s + period < trace.size(); ++s) {
      for (int l = 0; l < 4; ++l) {
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(std::abs(trace.joints[s][l][j] - trace.joints[s + period][l][j]) <= 1e-9);
        }
      }
    }
    for (std::size_t s = 1; s < trace.size(); ++s) {
      for (int l = 0; l < 4; ++l) {
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(std::abs(trace.joints[s][l][j] - trace.joints[s - 1][l][j]) <=
                cfg.max_joint_speed * trace.sample_interval);
        }
      }
    }
    for (std::size_t s = 0; s < trace.size(); ++s) {
      const std::size_t ph = s / n;
      const double t = static_cast<double>(s % n) / n;
      for (LegId leg : kAllLegs) {
        const auto target = foot_trajectory(plan, ph, leg, t);
        const auto fk = kinematics::foot_position(plan.model.leg, trace.joints[s][index(leg)]);
        CHECK((fk.vector() - target.vector()).norm() <= 1e-9 * plan.model.leg.total_length());
      }
    }
  }
}

TEST_CASE("infeasible stride is rejected")
{
  GaitConfig cfg;
  cfg.stride_length = 0.6;
  try {
    plan_cycle(default_model(), cfg, Direction::Forward);
    FAIL("expected InfeasibleGait");
  } catch (const GaitError& e) {
    CHECK(e.kind() == GaitErrorKind::InfeasibleGait);
  }
  cfg.stride_length = -0.1;
  CHECK_THROWS_AS(plan_cycle(default_model(), cfg, Direction::Forward), GaitError);
}

TEST_CASE("joint CSV layout")
{
  const auto plan = plan_cycle(default_model(), GaitConfig{}, Direction::Forward);
  const auto trace = joint_trace(plan, 2, 1);
  std::ostringstream os;
  write_joint_csv(trace, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "time_s,L11,L12,L13,L21,L22,L23,L31,L32,L33,L41,L42,L43");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
    CHECK(line.find('\r') == std::string::npos);
  }
  CHECK(rows == 8);
  CHECK(os.str().back() == '\n');

  std::ostringstream leg;
  write_leg_csv(trace, LegId::Leg3, leg);
  CHECK(leg.str().rfind("time_s,L31,L32,L33\n", 0) == 0);
}

TEST_CASE("angle_to_pulse affine mapping")
{
  const ServoConfig sc;  // 500-2500 us over pi rad starting at -pi/2
  CHECK(angle_to_pulse(sc.angle_min + sc.angle_range / 2, sc) == 1500);
  CHECK(angle_to_pulse(sc.angle_min, sc) == 500);
  CHECK(angle_to_pulse(sc.angle_min + sc.angle_range, sc) == 2500);
  // 500 + (pi/4) / pi * 2000
  CHECK(angle_to_pulse(sc.angle_min + kPi / 4, sc) == 1000);
  CHECK_THROWS_AS(angle_to_pulse(sc.angle_min - 0.01, sc), ServoRangeError);
  CHECK_THROWS_AS(angle_to_pulse(2.0, sc), ServoRangeError);

  ServoConfig bad;
  bad.pulse_min_us = 2600;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("default gait joints fit the default servo range")
{
  const ServoConfig sc;
  for (auto dir : kDirections) {
    const auto trace = joint_trace(plan_cycle(default_model(), GaitConfig{}, dir), 25, 1);
    for (const auto& joints : trace.joints) {
      CHECK_NOTHROW(servo_frame(joints, sc));
    }
  }
}
