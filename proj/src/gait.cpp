#include "arachne/gait.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "arachne/angles.hpp"
#include "arachne/format.hpp"

namespace arachne::gait {

using kinematics::FootPosition;
using kinematics::IkError;

namespace {

Eigen::Matrix2d rot(double theta)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

// Foot point after the body has executed `beta` phases of `motion` (negative beta runs time
// backwards). Exact for pure translations and pure rotations.
Eigen::Vector2d displaced(const Eigen::Vector2d& p, const BodyMotion& motion, double beta)
{
  return rot(-beta * motion.heading_change) * (p - beta * motion.translation);
}

int swing_slot(LegId leg)
{
  for (int k = 0; k < 4; ++k) {
    if (kForwardSwingOrder[k] == leg) {
      return k;
    }
  }
  return -1;
}

double lateral_offset(const RobotModel& model, const GaitConfig& cfg, LegId leg)
{
  const double y = model.body.hip_y + cfg.stance_y_offset;
  return is_left(leg) ? y : -y;
}

bool foot_solvable(const RobotModel& model, const GaitConfig& cfg, LegId leg, const Eigen::Vector3d& p)
{
  return kinematics::try_inverse_kinematics(model.leg, body_to_shoulder(model, leg, p), cfg.branch)
      .has_value();
}

void validate_plan(const GaitPlan& plan)
{
  constexpr int kChecks = 32;
  for (std::size_t ph = 0; ph < plan.phases.size(); ++ph) {
    for (int i = 0; i <= kChecks; ++i) {
      const double t = static_cast<double>(i) / kChecks;
      for (LegId leg : kAllLegs) {
        const Eigen::Vector3d p = foot_in_body(plan, ph, leg, t);
        const auto shoulder = body_to_shoulder(plan.model, leg, p);
        std::ostringstream where;
        where << to_string(plan.direction) << " phase " << ph << " leg " << number(leg) << " t=" << t;
        if (!kinematics::reachable(plan.model.leg, shoulder) ||
            !kinematics::try_inverse_kinematics(plan.model.leg, shoulder, plan.config.branch)) {
          throw GaitError(GaitErrorKind::InfeasibleGait, "foot target not reachable at " + where.str());
        }
        if (!plan.partition[index(leg)].contains(p.x(), 1e-12)) {
          throw GaitError(GaitErrorKind::InfeasibleGait,
                          "foot target leaves the workspace partition at " + where.str());
        }
      }
    }
  }
}

}  // namespace

const char* to_string(Direction d)
{
  switch (d) {
    case Direction::Forward:
      return "forward";
    case Direction::Left:
      return "left";
    case Direction::Right:
      return "right";
    case Direction::Backward:
      return "backward";
  }
  return "forward";
}

Direction direction_from_string(const std::string& s)
{
  if (s == "forward") return Direction::Forward;
  if (s == "left") return Direction::Left;
  if (s == "right") return Direction::Right;
  if (s == "backward") return Direction::Backward;
  throw std::invalid_argument("unknown direction '" + s + "'");
}

Eigen::Vector2d BodyLayout::hip(LegId leg) const
{
  return {is_front(leg) ? hip_x : -hip_x, is_left(leg) ? hip_y : -hip_y};
}

double BodyLayout::mount_yaw(LegId leg) const { return is_left(leg) ? kPi / 2 : -kPi / 2; }

void BodyLayout::validate() const
{
  if (!(hip_x > 0.0 && hip_y > 0.0 && radius > 0.0)) {
    throw GaitError(GaitErrorKind::InvalidConfig, "body hip offsets and radius must be positive");
  }
}

RobotModel default_model()
{
  RobotModel m;
  m.leg.limits = {{{-kPi / 2, kPi / 2}, {-kPi / 2, kPi / 2}, {-deg_to_rad(150), deg_to_rad(150)}}};
  return m;
}

void GaitConfig::validate() const
{
  auto require = [](bool ok, const char* msg) {
    if (!ok) {
      throw GaitError(GaitErrorKind::InvalidConfig, msg);
    }
  };
  require(std::isfinite(stride_length) && stride_length >= 0.0, "stride_length must be >= 0");
  require(std::isfinite(step_height) && step_height >= 0.0, "step_height must be >= 0");
  require(phase_duration > 0.0, "phase_duration must be > 0");
  require(stance_y_offset > 0.0, "stance_y_offset must be > 0");
  require(body_height > 0.0, "body_height must be > 0");
  require(std::isfinite(turn_angle) && turn_angle >= 0.0, "turn_angle must be >= 0");
  require(workspace_partition > 0.0 && workspace_partition <= 1.0, "workspace_partition must lie in (0, 1]");
  require(max_joint_speed > 0.0, "max_joint_speed must be > 0");
}

BodyMotion GaitPlan::cycle_motion() const
{
  BodyMotion total;
  for (const auto& ph : phases) {
    total.translation += ph.body_motion.translation;
    total.heading_change += ph.body_motion.heading_change;
  }
  return total;
}

FootPosition body_to_shoulder(const RobotModel& model, LegId leg, const Eigen::Vector3d& p)
{
  const Eigen::Vector2d rel = p.head<2>() - model.body.hip(leg);
  const Eigen::Vector2d local = rot(-model.body.mount_yaw(leg)) * rel;
  return {local.x(), local.y(), p.z()};
}

Eigen::Vector3d shoulder_to_body(const RobotModel& model, LegId leg, const FootPosition& p)
{
  const Eigen::Vector2d xy = rot(model.body.mount_yaw(leg)) * Eigen::Vector2d(p.px, p.py) + model.body.hip(leg);
  return {xy.x(), xy.y(), p.pz};
}

Interval sagittal_range(const RobotModel& model, const GaitConfig& cfg, LegId leg)
{
  const double y = lateral_offset(model, cfg, leg);
  const double z = -cfg.body_height;
  const double x0 = model.body.hip(leg).x();
  auto ok = [&](double x) { return foot_solvable(model, cfg, leg, {x, y, z}); };
  if (!ok(x0)) {
    std::ostringstream os;
    os << "leg " << number(leg) << " cannot stand at its neutral lateral offset";
    throw GaitError(GaitErrorKind::InfeasibleGait, os.str());
  }
  const double span = model.leg.total_length() * 1.01;
  auto edge = [&](double dir) {
    double in = 0.0;
    double out = span;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (in + out);
      (ok(x0 + dir * mid) ? in : out) = mid;
    }
    return x0 + dir * in;
  };
  return {edge(-1.0), edge(1.0)};
}

GaitPlan plan_cycle(const RobotModel& model, const GaitConfig& cfg, Direction direction)
{
  model.leg.validate();
  model.body.validate();
  cfg.validate();

  GaitPlan plan;
  plan.direction = direction;
  plan.config = cfg;
  plan.model = model;

  std::array<Eigen::Vector2d, 4> neutral{};
  for (LegId leg : kAllLegs) {
    const Interval range = sagittal_range(model, cfg, leg);
    const double cut = (1.0 - cfg.workspace_partition) * range.length();
    const Interval part = is_front(leg) ? Interval{range.min + cut, range.max}
                                        : Interval{range.min, range.max - cut};
    plan.sagittal_range[index(leg)] = range;
    plan.partition[index(leg)] = part;
    neutral[index(leg)] = {0.5 * (part.min + part.max), lateral_offset(model, cfg, leg)};
  }

  BodyMotion step;
  switch (direction) {
    case Direction::Forward:
    case Direction::Backward:
      step.translation = {cfg.stride_length / 4.0, 0.0};
      break;
    case Direction::Left:
      step.heading_change = cfg.turn_angle / 4.0;
      break;
    case Direction::Right:
      step.heading_change = -cfg.turn_angle / 4.0;
      break;
  }

  // Each leg swings once per cycle from 3/2 phases behind neutral to 3/2 phases ahead, then
  // stays world-fixed for the three phases in which the other legs swing.
  std::vector<GaitPhase> phases(4);
  for (int j = 0; j < 4; ++j) {
    GaitPhase& ph = phases[j];
    ph.swing_leg = kForwardSwingOrder[j];
    ph.body_motion = step;
    // A swing that does not travel stays planted.
    ph.apex_height = step.is_zero() ? 0.0 : cfg.step_height;
    for (LegId leg : kAllLegs) {
      const auto& n = neutral[index(leg)];
      const int m = (j - swing_slot(leg) - 1 + 4) % 4;  // stance phases completed since the last swing
      if (m == 3) {
        ph.foot_start[index(leg)] = displaced(n, step, 1.5);
        ph.foot_end[index(leg)] = displaced(n, step, -1.5);
      } else {
        ph.foot_start[index(leg)] = displaced(n, step, m - 1.5);
        ph.foot_end[index(leg)] = displaced(n, step, m - 0.5);
      }
    }
  }

  if (direction == Direction::Backward) {
    std::vector<GaitPhase> reversed;
    for (int j = 3; j >= 0; --j) {
      GaitPhase ph = phases[j];
      std::swap(ph.foot_start, ph.foot_end);
      ph.body_motion.translation = -ph.body_motion.translation;
      ph.body_motion.heading_change = -ph.body_motion.heading_change;
      reversed.push_back(ph);
    }
    phases = std::move(reversed);
  }
  plan.phases = std::move(phases);

  validate_plan(plan);
  return plan;
}

bool in_swing(const GaitPlan& plan, std::size_t phase, LegId leg) { return plan.phase(phase).swing_leg == leg; }

Eigen::Vector3d foot_in_body(const GaitPlan& plan, std::size_t phase, LegId leg, double t)
{
  const GaitPhase& ph = plan.phase(phase);
  const auto& start = ph.foot_start[index(leg)];
  const double ground = -plan.config.body_height;
  if (ph.swing_leg == leg) {
    const auto& end = ph.foot_end[index(leg)];
    const Eigen::Vector2d xy = (1.0 - t) * start + t * end;
    const double lift = ph.apex_height * 0.5 * (1.0 - std::cos(2.0 * kPi * t));
    return {xy.x(), xy.y(), ground + lift};
  }
  const Eigen::Vector2d xy = displaced(start, ph.body_motion, t);
  return {xy.x(), xy.y(), ground};
}

FootPosition foot_trajectory(const GaitPlan& plan, std::size_t phase, LegId leg, double t)
{
  return body_to_shoulder(plan.model, leg, foot_in_body(plan, phase, leg, t));
}

BodyMotion motion_at(const BodyMotion& phase_motion, double t)
{
  return {t * phase_motion.translation, t * phase_motion.heading_change};
}

Eigen::Vector3d apply_motion(const Eigen::Vector3d& pose, const BodyMotion& motion)
{
  const Eigen::Vector2d xy = pose.head<2>() + rot(pose.z()) * motion.translation;
  return {xy.x(), xy.y(), normalize_angle(pose.z() + motion.heading_change)};
}

LegJoints solve_legs(const GaitPlan& plan, std::size_t phase, double t)
{
  LegJoints out{};
  for (LegId leg : kAllLegs) {
    out[index(leg)] = kinematics::inverse_kinematics(plan.model.leg, foot_trajectory(plan, phase, leg, t),
                                                     plan.config.branch);
  }
  return out;
}

JointTrace joint_trace(const GaitPlan& plan, std::size_t samples_per_phase, std::size_t cycles)
{
  if (samples_per_phase == 0) {
    throw GaitError(GaitErrorKind::InvalidConfig, "samples_per_phase must be >= 1");
  }
  JointTrace trace;
  trace.samples_per_phase = samples_per_phase;
  trace.sample_interval = plan.config.phase_duration / static_cast<double>(samples_per_phase);
  const std::size_t phases = plan.phase_count() * cycles;
  trace.time.reserve(phases * samples_per_phase);
  trace.joints.reserve(phases * samples_per_phase);

  for (std::size_t ph = 0; ph < phases; ++ph) {
    for (std::size_t i = 0; i < samples_per_phase; ++i) {
      const std::size_t sample = ph * samples_per_phase + i;
      const double t = static_cast<double>(i) / static_cast<double>(samples_per_phase);
      LegJoints joints{};
      for (LegId leg : kAllLegs) {
        try {
          joints[index(leg)] = kinematics::inverse_kinematics(
              plan.model.leg, foot_trajectory(plan, ph, leg, t), plan.config.branch);
        } catch (const IkError& e) {
          std::ostringstream os;
          os << "leg " << number(leg) << " sample " << sample << ": " << e.what();
          throw GaitError(GaitErrorKind::IkFailure, os.str());
        }
      }
      trace.time.push_back(static_cast<double>(sample) * plan.config.phase_duration /
                           static_cast<double>(samples_per_phase));
      trace.joints.push_back(joints);
    }
  }
  return trace;
}

void write_joint_csv(const JointTrace& trace, std::ostream& os)
{
  os << "time_s";
  for (LegId leg : kAllLegs) {
    for (int j = 1; j <= 3; ++j) {
      os << ",L" << number(leg) << j;
    }
  }
  os << '\n';
  for (std::size_t s = 0; s < trace.size(); ++s) {
    os << format_double(trace.time[s]);
    for (const auto& q : trace.joints[s]) {
      for (std::size_t j = 0; j < 3; ++j) {
        os << ',' << format_double(rad_to_deg(q[j]));
      }
    }
    os << '\n';
  }
}

void write_leg_csv(const JointTrace& trace, LegId leg, std::ostream& os)
{
  os << "time_s";
  for (int j = 1; j <= 3; ++j) {
    os << ",L" << number(leg) << j;
  }
  os << '\n';
  for (std::size_t s = 0; s < trace.size(); ++s) {
    os << format_double(trace.time[s]);
    const auto& q = trace.joints[s][index(leg)];
    for (std::size_t j = 0; j < 3; ++j) {
      os << ',' << format_double(rad_to_deg(q[j]));
    }
    os << '\n';
  }
}

}  // namespace arachne::gait
