#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arachne/kinematics.hpp"

namespace arachne::gait {

/// Leg numbering follows the joint naming Ljk (leg j, joint k).
enum class LegId { Leg1, Leg2, Leg3, Leg4 };  // front-right, front-left, back-left, back-right

inline constexpr std::array<LegId, 4> kAllLegs{LegId::Leg1, LegId::Leg2, LegId::Leg3, LegId::Leg4};

constexpr int index(LegId leg) { return static_cast<int>(leg); }
constexpr int number(LegId leg) { return index(leg) + 1; }
constexpr bool is_front(LegId leg) { return leg == LegId::Leg1 || leg == LegId::Leg2; }
constexpr bool is_left(LegId leg) { return leg == LegId::Leg2 || leg == LegId::Leg3; }

/// Forward swing order of the crawl gait.
inline constexpr std::array<LegId, 4> kForwardSwingOrder{LegId::Leg1, LegId::Leg3, LegId::Leg4,
                                                         LegId::Leg2};

enum class Direction { Forward, Left, Right, Backward };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Hip mounting on the body. Body frame: x forward, y left, z up, origin at hip height.
struct BodyLayout {
  double hip_x = 0.08;
  double hip_y = 0.06;
  double radius = 0.12;  ///< collision disc in the arena

  Eigen::Vector2d hip(LegId leg) const;
  /// Yaw of the leg's shoulder frame relative to the body; shoulder x points outward.
  double mount_yaw(LegId leg) const;
  void validate() const;
};

struct RobotModel {
  kinematics::LegGeometry leg;
  BodyLayout body;
};

/// Default desk-scale robot: L = (0.05, 0.10, 0.10) m, limits (+-90, +-90, +-150) deg.
RobotModel default_model();

struct GaitConfig {
  double stride_length = 0.08;        ///< body travel per cycle, meters
  double step_height = 0.03;          ///< swing apex above ground
  double phase_duration = 0.5;        ///< seconds per single-leg phase
  double stance_y_offset = 0.12;      ///< lateral foot distance from the hip
  double body_height = 0.08;          ///< hip height above ground
  double turn_angle = 1.0471975511965976;  ///< yaw per cycle for Left/Right, radians
  double workspace_partition = 0.75;  ///< usable fraction of each leg's sagittal range
  double max_joint_speed = 6.0;       ///< rad/s, bound used to check traces
  kinematics::IkBranch branch = kinematics::IkBranch::KneeUp;

  void validate() const;
};

/// Planar rigid motion of the body over one phase, expressed in the phase-start body frame.
/// Gaits use either a pure translation or a pure rotation.
struct BodyMotion {
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();
  double heading_change = 0.0;

  bool is_zero() const { return translation.isZero(0.0) && heading_change == 0.0; }
};

struct Interval {
  double min = 0.0;
  double max = 0.0;
  double length() const { return max - min; }
  bool contains(double x, double slack = 0.0) const { return x >= min - slack && x <= max + slack; }
};

struct GaitPhase {
  LegId swing_leg = LegId::Leg1;
  std::array<Eigen::Vector2d, 4> foot_start{};  ///< body-frame ground points at phase start
  std::array<Eigen::Vector2d, 4> foot_end{};
  double apex_height = 0.0;
  BodyMotion body_motion;
};

struct GaitPlan {
  Direction direction = Direction::Forward;
  GaitConfig config;
  RobotModel model;
  std::array<Interval, 4> sagittal_range{};  ///< reachable body-x interval per leg at standing height
  std::array<Interval, 4> partition{};       ///< front 3/4 for front legs, rear 3/4 for rear legs
  std::vector<GaitPhase> phases;

  std::size_t phase_count() const { return phases.size(); }
  const GaitPhase& phase(std::size_t i) const { return phases[i % phases.size()]; }
  double cycle_duration() const { return config.phase_duration * static_cast<double>(phases.size()); }
  /// Net body motion over one cycle.
  BodyMotion cycle_motion() const;
};

enum class GaitErrorKind { InfeasibleGait, InvalidConfig, IkFailure };

class GaitError : public std::runtime_error {
public:
  GaitError(GaitErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  GaitErrorKind kind() const { return kind_; }

private:
  GaitErrorKind kind_;
};

/// Reachable body-x interval for a leg's foot at its neutral lateral offset and standing height.
Interval sagittal_range(const RobotModel& model, const GaitConfig& cfg, LegId leg);

GaitPlan plan_cycle(const RobotModel& model, const GaitConfig& cfg, Direction direction);

/// Body-frame foot point during `phase` at fraction t in [0, 1].
Eigen::Vector3d foot_in_body(const GaitPlan& plan, std::size_t phase, LegId leg, double t);

/// Same point in the leg's shoulder frame, ready for inverse kinematics.
kinematics::FootPosition foot_trajectory(const GaitPlan& plan, std::size_t phase, LegId leg, double t);

/// Body displacement reached at fraction t of a phase, relative to the phase start.
BodyMotion motion_at(const BodyMotion& phase_motion, double t);

/// Applies `motion` to a planar pose (x, y, heading).
Eigen::Vector3d apply_motion(const Eigen::Vector3d& pose, const BodyMotion& motion);

kinematics::FootPosition body_to_shoulder(const RobotModel& model, LegId leg, const Eigen::Vector3d& p);
Eigen::Vector3d shoulder_to_body(const RobotModel& model, LegId leg, const kinematics::FootPosition& p);

bool in_swing(const GaitPlan& plan, std::size_t phase, LegId leg);

using LegJoints = std::array<kinematics::JointAngles, 4>;

struct JointTrace {
  double sample_interval = 0.0;
  std::size_t samples_per_phase = 0;
  std::vector<double> time;
  std::vector<LegJoints> joints;

  std::size_t size() const { return time.size(); }
};

/// Samples `cycles` full cycles at `samples_per_phase` points per phase (t = i / n, i < n).
JointTrace joint_trace(const GaitPlan& plan, std::size_t samples_per_phase, std::size_t cycles = 1);

/// Joint angles for all legs at one instant.
LegJoints solve_legs(const GaitPlan& plan, std::size_t phase, double t);

/// Header: time_s,L11,L12,...,L43; angles in degrees; LF line endings.
void write_joint_csv(const JointTrace& trace, std::ostream& os);
void write_leg_csv(const JointTrace& trace, LegId leg, std::ostream& os);

}  // namespace arachne::gait
