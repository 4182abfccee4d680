#include "ttplan/strike_planner.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace ttplan {

std::string_view to_string(SwingType s) {
  return s == SwingType::Forehand ? "Forehand" : "Backhand";
}

void PlannerConfig::validate() const {
  if (!(dt_flight > 0.0)) throw InvariantViolation("planner: dt_flight must be positive");
  if (!(reach_offset >= 0.0)) throw InvariantViolation("planner: reach_offset must be non-negative");
  if (!(base_setback >= 0.0)) throw InvariantViolation("planner: base_setback must be non-negative");
  if (!(degenerate_epsilon > 0.0)) throw InvariantViolation("planner: degenerate_epsilon must be positive");
}

namespace {

Vec3 free_flight_position(const Vec3& p0, const Vec3& v0, double duration,
                          const PhysicsParams& params, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(duration / step)));
  const double h = duration / n;
  BallState s{0.0, p0, v0};
  for (int i = 0; i < n; ++i) s = rk4_step(s, h, params);
  return s.p;
}

}  // namespace

Vec3 outgoing_velocity_with_drag(const Vec3& p_racket, const Vec3& p_land, double dt_flight,
                                 const PhysicsParams& params, double step) {
  Vec3 v = outgoing_velocity(p_racket, p_land, dt_flight, params.g);
  if (params.k == 0.0) return v;
  constexpr double kDelta = 1e-6;
  for (int iter = 0; iter < 20; ++iter) {
    const Vec3 miss = free_flight_position(p_racket, v, dt_flight, params, step) - p_land;
    if (miss.norm() < 1e-12) break;
    Eigen::Matrix3d jacobian;
    for (int j = 0; j < 3; ++j) {
      Vec3 dv = v;
      dv[j] += kDelta;
      jacobian.col(j) = (free_flight_position(p_racket, dv, dt_flight, params, step) - p_land - miss) / kDelta;
    }
    v -= jacobian.partialPivLu().solve(miss);
  }
  return v;
}

StrikeCommand plan_strike(const StrikePrediction& prediction, const TableGeometry& geometry,
                          const PhysicsParams& params, const PlannerConfig& config,
                          const BasePose& base) {
  const Vec3& p_racket = prediction.p_strike;
  const Vec3& p_land = geometry.landing_target;
  const Vec3 v_o = config.compensate_drag
                       ? outgoing_velocity_with_drag(p_racket, p_land, config.dt_flight, params)
                       : outgoing_velocity(p_racket, p_land, config.dt_flight, params.g);
  const auto racket = racket_velocity(prediction.v_incoming, v_o, params.c_r, config.degenerate_epsilon);

  StrikeCommand cmd;
  cmd.t_strike = prediction.t_strike;
  cmd.p_racket = p_racket;
  cmd.v_racket = racket.v_racket;
  // The face normal is the impact direction; v_racket is a multiple of it.
  cmd.n_racket = racket.u;
  cmd.swing_type = select_swing(p_racket.y(), base.p_xy.y());
  const double lateral = cmd.swing_type == SwingType::Forehand ? config.reach_offset : -config.reach_offset;
  cmd.p_base_target = Vec2(p_racket.x() - config.base_setback, p_racket.y() + lateral);
  cmd.base_yaw = 0.0;
  cmd.v_outgoing = v_o;
  return cmd;
}

}  // namespace ttplan
