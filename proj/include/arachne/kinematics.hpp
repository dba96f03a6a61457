#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

namespace arachne::kinematics {

/// Denavit-Hartenberg parameters of one joint (standard convention).
struct DhParams {
  double joint_angle = 0.0;  ///< q, rotation about z_{i-1}
  double link_twist = 0.0;   ///< alpha, rotation about x_i
  double link_offset = 0.0;  ///< d, translation along z_{i-1}
  double link_length = 0.0;  ///< a, translation along x_i
};

/// Rigid transform stored as a 4x4 homogeneous matrix with bottom row (0,0,0,1).
class HomogeneousTransform {
public:
  HomogeneousTransform() : m_(Eigen::Matrix4d::Identity()) {}
  explicit HomogeneousTransform(const Eigen::Matrix4d& m);

  static HomogeneousTransform identity() { return {}; }

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
  Eigen::Vector3d translation() const { return m_.topRightCorner<3, 1>(); }

  HomogeneousTransform inverse() const;

  // Largest element of |R^T R - I|.
  double orthonormality_error() const;
  bool is_valid(double tolerance = 1e-12) const;

private:
  Eigen::Matrix4d m_;
};

struct JointLimit {
  double min = -3.14159265358979323846;
  double max = 3.14159265358979323846;

  bool contains(double q) const { return q >= min && q <= max; }
};

/// Link lengths in meters and per-joint limits in radians.
struct LegGeometry {
  double l1 = 0.05;  ///< shoulder (coxa)
  double l2 = 0.10;  ///< femur
  double l3 = 0.10;  ///< tibia
  std::array<JointLimit, 3> limits{};

  double total_length() const { return l1 + l2 + l3; }
  void validate() const;
};

struct JointAngles {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? q1 : (i == 1 ? q2 : q3); }
};

/// Foot position in the leg's shoulder frame, meters.
struct FootPosition {
  double px = 0.0;
  double py = 0.0;
  double pz = 0.0;

  Eigen::Vector3d vector() const { return {px, py, pz}; }
  static FootPosition from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// Selects the root of the q2 equation. KneeDown takes the positive square root and
/// yields q3 >= 0; KneeUp takes the negative root and yields q3 <= 0.
enum class IkBranch { KneeDown, KneeUp };

enum class IkErrorKind { Unreachable, ShoulderSingularity, JointLimit };

class IkError : public std::runtime_error {
public:
  IkError(IkErrorKind kind, const std::string& what, int joint = -1)
    : std::runtime_error(what), kind_(kind), joint_(joint)
  {
  }

  IkErrorKind kind() const { return kind_; }
  /// Zero-based index of the violating joint for JointLimit, otherwise -1.
  int joint() const { return joint_; }

private:
  IkErrorKind kind_;
  int joint_;
};

struct ForwardResult {
  HomogeneousTransform transform;
  FootPosition foot;
};

/// Intermediate quantities of the closed-form solution for one target.
struct IkTerms {
  double r = 0.0;  ///< planar reach beyond the shoulder link
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double cos_q3 = 0.0;
};

HomogeneousTransform dh_transform(const DhParams& p);
HomogeneousTransform compose(const HomogeneousTransform& a, const HomogeneousTransform& b);

/// The three joint frames of a leg: alpha = (pi/2, 0, 0), d = 0, a = (l1, l2, l3).
std::array<DhParams, 3> leg_dh_chain(const LegGeometry& g, const JointAngles& q);

/// Closed-form ^0T_3 for the leg chain.
HomogeneousTransform leg_transform_closed_form(const LegGeometry& g, const JointAngles& q);

ForwardResult forward_kinematics(const LegGeometry& g, const JointAngles& q);
FootPosition foot_position(const LegGeometry& g, const JointAngles& q);

IkTerms ik_terms(const LegGeometry& g, const FootPosition& target);

bool reachable(const LegGeometry& g, const FootPosition& target);

/// Throws IkError. Joint limits are enforced when `enforce_limits` is set.
JointAngles inverse_kinematics(const LegGeometry& g, const FootPosition& target, IkBranch branch,
                               bool enforce_limits = true);

/// Non-throwing variant used by batch kernels.
std::optional<JointAngles> try_inverse_kinematics(const LegGeometry& g, const FootPosition& target,
                                                  IkBranch branch, bool enforce_limits = true,
                                                  IkErrorKind* error = nullptr);

const char* to_string(IkBranch branch);
const char* to_string(IkErrorKind kind);

}  // namespace arachne::kinematics
