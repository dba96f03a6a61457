#include "arachne/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arachne/angles.hpp"

namespace arachne::kinematics {

namespace {

// Slack on the arccos argument so that targets produced by full extension, which land
// on |cos q3| = 1 up to rounding, count as reachable.
constexpr double kReachSlack = 1e-12;

}  // namespace

HomogeneousTransform::HomogeneousTransform(const Eigen::Matrix4d& m) : m_(m)
{
  m_.row(3) << 0.0, 0.0, 0.0, 1.0;
}

HomogeneousTransform HomogeneousTransform::inverse() const
{
  Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
  const Eigen::Matrix3d rt = rotation().transpose();
  inv.topLeftCorner<3, 3>() = rt;
  inv.topRightCorner<3, 1>() = -rt * translation();
  return HomogeneousTransform(inv);
}

double HomogeneousTransform::orthonormality_error() const
{
  const Eigen::Matrix3d r = rotation();
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

bool HomogeneousTransform::is_valid(double tolerance) const
{
  const bool bottom = m_(3, 0) == 0.0 && m_(3, 1) == 0.0 && m_(3, 2) == 0.0 && m_(3, 3) == 1.0;
  return bottom && m_.allFinite() && orthonormality_error() <= tolerance &&
         std::abs(rotation().determinant() - 1.0) <= tolerance;
}

void LegGeometry::validate() const
{
  if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0)) {
    throw std::invalid_argument("leg link lengths must be positive");
  }
  for (std::size_t i = 0; i < limits.size(); ++i) {
    const auto& lim = limits[i];
    if (!(lim.min <= lim.max) || lim.min <= -kPi - 1e-12 || lim.max > kPi + 1e-12) {
      std::ostringstream os;
      os << "joint " << (i + 1) << " limit must be a non-empty interval within (-pi, pi]";
      throw std::invalid_argument(os.str());
    }
  }
}

HomogeneousTransform dh_transform(const DhParams& p)
{
  const double cq = std::cos(p.joint_angle);
  const double sq = std::sin(p.joint_angle);
  const double ca = std::cos(p.link_twist);
  const double sa = std::sin(p.link_twist);

  Eigen::Matrix4d m;
  m << cq, -sq * ca, sq * sa, p.link_length * cq,
       sq, cq * ca, -cq * sa, p.link_length * sq,
       0.0, sa, ca, p.link_offset,
       0.0, 0.0, 0.0, 1.0;
  return HomogeneousTransform(m);
}

HomogeneousTransform compose(const HomogeneousTransform& a, const HomogeneousTransform& b)
{
  return HomogeneousTransform(a.matrix() * b.matrix());
}

std::array<DhParams, 3> leg_dh_chain(const LegGeometry& g, const JointAngles& q)
{
  return {{
      {q.q1, kPi / 2.0, 0.0, g.l1},
      {q.q2, 0.0, 0.0, g.l2},
      {q.q3, 0.0, 0.0, g.l3},
  }};
}

HomogeneousTransform leg_transform_closed_form(const LegGeometry& g, const JointAngles& q)
{
  const double c1 = std::cos(q.q1);
  const double s1 = std::sin(q.q1);
  const double c23 = std::cos(q.q2 + q.q3);
  const double s23 = std::sin(q.q2 + q.q3);
  const double reach = g.l1 + g.l2 * std::cos(q.q2) + g.l3 * c23;

  Eigen::Matrix4d m;
  m << c1 * c23, -c1 * s23, s1, c1 * reach,
       s1 * c23, -s1 * s23, -c1, s1 * reach,
       s23, c23, 0.0, g.l2 * std::sin(q.q2) + g.l3 * s23,
       0.0, 0.0, 0.0, 1.0;
  return HomogeneousTransform(m);
}

ForwardResult forward_kinematics(const LegGeometry& g, const JointAngles& q)
{
  const auto chain = leg_dh_chain(g, q);
  HomogeneousTransform t = dh_transform(chain[0]);
  t = compose(t, dh_transform(chain[1]));
  t = compose(t, dh_transform(chain[2]));
  return {t, FootPosition::from(t.translation())};
}

FootPosition foot_position(const LegGeometry& g, const JointAngles& q)
{
  const double reach = g.l1 + g.l2 * std::cos(q.q2) + g.l3 * std::cos(q.q2 + q.q3);
  return {std::cos(q.q1) * reach, std::sin(q.q1) * reach,
          g.l2 * std::sin(q.q2) + g.l3 * std::sin(q.q2 + q.q3)};
}

IkTerms ik_terms(const LegGeometry& g, const FootPosition& target)
{
  IkTerms t;
  t.r = std::hypot(target.px, target.py) - g.l1;
  t.a = 2.0 * g.l2 * t.r;
  t.b = 2.0 * target.pz * g.l2;
  t.c = t.r * t.r + target.pz * target.pz + g.l2 * g.l2 - g.l3 * g.l3;
  t.cos_q3 = (t.c - 2.0 * g.l2 * g.l2) / (2.0 * g.l2 * g.l3);
  return t;
}

bool reachable(const LegGeometry& g, const FootPosition& target)
{
  if (target.px == 0.0 && target.py == 0.0) {
    return false;
  }
  return std::abs(ik_terms(g, target).cos_q3) <= 1.0 + kReachSlack;
}

std::optional<JointAngles> try_inverse_kinematics(const LegGeometry& g, const FootPosition& target,
                                                  IkBranch branch, bool enforce_limits,
                                                  IkErrorKind* error)
{
  auto fail = [&](IkErrorKind kind) -> std::optional<JointAngles> {
    if (error) {
      *error = kind;
    }
    return std::nullopt;
  };

  if (target.px == 0.0 && target.py == 0.0) {
    return fail(IkErrorKind::ShoulderSingularity);
  }
  const IkTerms t = ik_terms(g, target);
  if (!(std::abs(t.cos_q3) <= 1.0 + kReachSlack)) {
    return fail(IkErrorKind::Unreachable);
  }

  const double sign = branch == IkBranch::KneeDown ? 1.0 : -1.0;
  const double disc = std::max(0.0, t.a * t.a + t.b * t.b - t.c * t.c);

  JointAngles q;
  q.q1 = normalize_angle(std::atan2(target.py, target.px));
  q.q2 = normalize_angle(std::atan2(t.c, sign * std::sqrt(disc)) - std::atan2(t.a, t.b));
  q.q3 = normalize_angle(sign * std::acos(std::clamp(t.cos_q3, -1.0, 1.0)));

  if (enforce_limits) {
    for (int j = 0; j < 3; ++j) {
      if (!g.limits[j].contains(q[j])) {
        if (error) {
          *error = IkErrorKind::JointLimit;
        }
        return std::nullopt;
      }
    }
  }
  return q;
}

JointAngles inverse_kinematics(const LegGeometry& g, const FootPosition& target, IkBranch branch,
                               bool enforce_limits)
{
  IkErrorKind kind{};
  if (auto q = try_inverse_kinematics(g, target, branch, enforce_limits, &kind)) {
    return *q;
  }

  std::ostringstream os;
  os << "inverse kinematics failed for target (" << target.px << ", " << target.py << ", "
     << target.pz << "): ";
  int joint = -1;
  switch (kind) {
    case IkErrorKind::ShoulderSingularity:
      os << "target lies on the shoulder axis";
      break;
    case IkErrorKind::Unreachable:
      os << "target outside the leg workspace";
      break;
    case IkErrorKind::JointLimit: {
      const auto q = *try_inverse_kinematics(g, target, branch, false);
      for (int j = 0; j < 3 && joint < 0; ++j) {
        if (!g.limits[j].contains(q[j])) {
          joint = j;
        }
      }
      os << "joint " << (joint + 1) << " angle " << q[joint] << " rad outside ["
         << g.limits[joint].min << ", " << g.limits[joint].max << "]";
      break;
    }
  }
  throw IkError(kind, os.str(), joint);
}

const char* to_string(IkBranch branch)
{
  return branch == IkBranch::KneeDown ? "knee_down" : "knee_up";
}

const char* to_string(IkErrorKind kind)
{
  switch (kind) {
    case IkErrorKind::Unreachable:
      return "unreachable";
    case IkErrorKind::ShoulderSingularity:
      return "shoulder_singularity";
    case IkErrorKind::JointLimit:
      return "joint_limit";
  }
  return "unknown";
}

}  // namespace arachne::kinematics
