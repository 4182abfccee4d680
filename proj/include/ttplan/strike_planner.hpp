#pragma once

#include "ttplan/dynamics.hpp"
#include "ttplan/geometry.hpp"
#include "ttplan/strike_predictor.hpp"
#include "ttplan/types.hpp"

#include <Eigen/Core>

#include <string_view>

namespace ttplan {

/// Outgoing ball velocity that carries the ball from p_racket to p_land in
/// dt_flight under gravity alone:
///   v_o = (p_land - p_racket) / dt - g dt / 2.
template <typename DerivedA, typename DerivedB, typename DerivedG>
Vector3<typename DerivedA::Scalar> outgoing_velocity(const Eigen::MatrixBase<DerivedA>& p_racket,
                                                     const Eigen::MatrixBase<DerivedB>& p_land,
                                                     typename DerivedA::Scalar dt_flight,
                                                     const Eigen::MatrixBase<DerivedG>& g) {
  using Scalar = typename DerivedA::Scalar;
  if (!(dt_flight > Scalar(0))) throw InvalidArgument("outgoing_velocity: dt_flight must be positive");
  return (p_land - p_racket) / dt_flight - Scalar(0.5) * g * dt_flight;
}

template <typename Scalar>
struct RacketVelocity {
  Vector3<Scalar> v_racket;
  /// Unit impact direction, parallel to v_o - v_i.
  Vector3<Scalar> u;
};

/// Racket velocity that turns v_i into v_o for a frictionless contact with
/// normal restitution c_r and face normal along v_o - v_i.
template <typename DerivedI, typename DerivedO>
RacketVelocity<typename DerivedI::Scalar> racket_velocity(const Eigen::MatrixBase<DerivedI>& v_i,
                                                          const Eigen::MatrixBase<DerivedO>& v_o,
                                                          typename DerivedI::Scalar c_r,
                                                          typename DerivedI::Scalar epsilon = 1e-6) {
  using Scalar = typename DerivedI::Scalar;
  const Vector3<Scalar> delta = v_o - v_i;
  const Scalar norm = delta.norm();
  if (!(norm > epsilon)) {
    throw DegenerateImpactDirection("racket_velocity: |v_o - v_i| within epsilon");
  }
  const Vector3<Scalar> u = delta / norm;
  const Scalar speed = (v_o.dot(u) + c_r * v_i.dot(u)) / (Scalar(1) + c_r);
  return {speed * u, u};
}

/// Forward contact model: restitution c_r on the normal component of the
/// relative velocity, tangential ball velocity unchanged.
template <typename DerivedI, typename DerivedR, typename DerivedN>
Vector3<typename DerivedI::Scalar> racket_impact(const Eigen::MatrixBase<DerivedI>& v_i,
                                                 const Eigen::MatrixBase<DerivedR>& v_racket,
                                                 const Eigen::MatrixBase<DerivedN>& n,
                                                 typename DerivedI::Scalar c_r) {
  using Scalar = typename DerivedI::Scalar;
  if (!((v_i - v_racket).dot(n) < Scalar(0))) {
    throw NoApproach("racket_impact: ball is not approaching the racket face");
  }
  const Scalar vn_in = v_i.dot(n);
  const Scalar vn_out = v_racket.dot(n) * (Scalar(1) + c_r) - c_r * vn_in;
  return v_i + (vn_out - vn_in) * n;
}

enum class SwingType { Forehand, Backhand };

std::string_view to_string(SwingType s);

/// Forehand when the strike point is at or right of the base (y <= y_base).
inline SwingType select_swing(double y_strike, double y_base) {
  return y_strike <= y_base ? SwingType::Forehand : SwingType::Backhand;
}

struct BasePose {
  Vec2 p_xy{-1.77, 0.0};
  /// Heading in the table frame; 0 faces +x.
  double yaw = 0.0;
};

struct PlannerConfig {
  double dt_flight = 0.5;
  /// Lateral base offset from the strike point, toward the free side.
  double reach_offset = 0.25;
  /// Base distance behind the hit plane.
  double base_setback = 0.4;
  double degenerate_epsilon = 1e-6;
  /// Correct v_o for drag by shooting on the full flight model. Off by
  /// default: the outgoing flight is then gravity-only.
  bool compensate_drag = false;

  void validate() const;
};

struct StrikeCommand {
  double t_strike{0};
  Vec3 p_racket{Vec3::Zero()};
  Vec3 v_racket{Vec3::Zero()};
  Vec3 n_racket{Vec3::UnitX()};
  SwingType swing_type{SwingType::Forehand};
  Vec2 p_base_target{Vec2::Zero()};
  /// Desired base heading, always facing +x.
  double base_yaw{0};
  /// Outgoing ball velocity the command is designed for.
  Vec3 v_outgoing{Vec3::Zero()};
};

/// v_o such that drag-and-gravity flight (no table contact) from p_racket is
/// at p_land after dt_flight. Starts from the gravity-only solution.
Vec3 outgoing_velocity_with_drag(const Vec3& p_racket, const Vec3& p_land, double dt_flight,
                                 const PhysicsParams& params, double step = 1.0 / 360.0);

StrikeCommand plan_strike(const StrikePrediction& prediction, const TableGeometry& geometry,
                          const PhysicsParams& params, const PlannerConfig& config,
                          const BasePose& base);

}  // namespace ttplan
