#pragma once

#include "ttplan/geometry.hpp"
#include "ttplan/types.hpp"

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace ttplan {

/// Physical model parameters of the hybrid flight/bounce system.
template <typename Scalar>
struct BasicPhysicsParams {
  Scalar k{0};     ///< aerodynamic drag coefficient [1/m]
  Scalar c_h{1};   ///< table restitution, horizontal
  Scalar c_v{1};   ///< table restitution, vertical
  Scalar c_r{0.8}; ///< racket restitution along the face normal
  Vector3<Scalar> g{Scalar(0), Scalar(0), Scalar(-9.81)};

  void validate() const;
};

using PhysicsParams = BasicPhysicsParams<double>;

template <typename Scalar>
void BasicPhysicsParams<Scalar>::validate() const {
  if (!(k >= 0)) throw InvariantViolation("physics: k must be non-negative");
  if (!(c_h > 0 && c_h <= 1)) throw InvariantViolation("physics: c_h must lie in (0, 1]");
  if (!(c_v > 0 && c_v <= 1)) throw InvariantViolation("physics: c_v must lie in (0, 1]");
  if (!(c_r > 0 && c_r <= 1)) throw InvariantViolation("physics: c_r must lie in (0, 1]");
  if (!(g.z() < 0)) throw InvariantViolation("physics: gravity must point down");
}

/// Flight acceleration a = -k |v| v + g.
template <typename Derived>
Vector3<typename Derived::Scalar> flight_acceleration(
    const Eigen::MatrixBase<Derived>& v,
    const BasicPhysicsParams<typename Derived::Scalar>& params) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  return -params.k * v.norm() * v + params.g;
}

/// Table impact v+ = diag(C_h, C_h, -C_v) v-. Requires v-.z < 0.
template <typename Derived>
Vector3<typename Derived::Scalar> bounce_map(
    const Eigen::MatrixBase<Derived>& v_minus,
    const BasicPhysicsParams<typename Derived::Scalar>& params) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  if (!(v_minus.z() < 0)) throw NotImpactState("bounce_map: v_minus.z must be negative");
  return Vector3<typename Derived::Scalar>(params.c_h * v_minus.x(), params.c_h * v_minus.y(),
                                           -params.c_v * v_minus.z());
}

enum class Termination { ReachedTime, ReachedPlane, HitFloor, LeftTable, Landed, Resting };

std::string_view to_string(Termination t);

struct BounceEvent {
  double t{0};
  Vec3 p{Vec3::Zero()};
  Vec3 v_minus{Vec3::Zero()};
  Vec3 v_plus{Vec3::Zero()};
};

/// Output of integrate(). Samples sit on the grid t0 + i*step, plus the
/// terminal state, which may fall between grid points.
struct FlightSegment {
  std::vector<BallState> samples;
  std::vector<BounceEvent> bounces;
  Termination termination{Termination::ReachedTime};

  const BallState& initial_state() const { return samples.front(); }
  const BallState& final_state() const { return samples.back(); }
};

/// When integrate() stops, besides the implicit floor and resting checks.
struct StopCondition {
  enum class Kind {
    Time,      ///< after a fixed duration
    HitPlane,  ///< first crossing of x = hit_plane_x moving in -x
    Landing,   ///< first downward pass through z = 0 (table or not)
  };
  Kind kind{Kind::Time};
  double duration{0};

  static StopCondition after(double duration) { return {Kind::Time, duration}; }
  static StopCondition at_hit_plane() { return {Kind::HitPlane, 0.0}; }
  static StopCondition at_landing() { return {Kind::Landing, 0.0}; }
};

struct IntegratorOptions {
  double step = 1.0 / 360.0;
  /// Maximum simulated time before NonTermination is raised.
  double horizon = 10.0;
  /// Bisection stops once the bracket is narrower than this [s].
  double event_tolerance = 1e-12;
  /// A bounce that leaves the ball slower than this vertically ends the flight.
  double resting_speed = 1e-3;
};

/// One classical Runge-Kutta step of the flight ODE.
BallState rk4_step(const BallState& s, double h, const PhysicsParams& params);

/// Integrates the hybrid system: RK4 flight, table bounces inside the table
/// footprint, floor termination outside it. Events are localized by
/// bisection on the event coordinate.
FlightSegment integrate(const BallState& initial, const PhysicsParams& params,
                        const TableGeometry& geometry, const StopCondition& stop,
                        const IntegratorOptions& options = {});

/// State after `duration` seconds (bounces included).
BallState propagate(const BallState& initial, double duration, const PhysicsParams& params,
                    const TableGeometry& geometry, const IntegratorOptions& options = {});

/// Cubic Hermite interpolation of a segment at time t. Bounce states are
/// used as knots so interpolation never straddles an impact.
BallState state_at(const FlightSegment& segment, double t);

}  // namespace ttplan
