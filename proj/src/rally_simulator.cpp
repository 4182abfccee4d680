#include "ttplan/rally_simulator.hpp"

#include "parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <variant>

namespace ttplan {

std::string_view to_string(FailureMode f) {
  switch (f) {
    case FailureMode::None: return "None";
    case FailureMode::Miss: return "Miss";
    case FailureMode::NetHit: return "NetHit";
    case FailureMode::OffTable: return "OffTable";
    case FailureMode::TooLate: return "TooLate";
    case FailureMode::OutOfReach: return "OutOfReach";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Robot proxy

void ReachCurve::validate() const {
  if (anchors.size() < 2) throw InvariantViolation("reach curve: need at least two anchors");
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (!(anchors[i].x() > anchors[i - 1].x())) {
      throw InvariantViolation("reach curve: distances must increase");
    }
    if (anchors[i].y() < anchors[i - 1].y()) {
      throw InvariantViolation("reach curve: times must be non-decreasing");
    }
  }
}

double ReachCurve::reach_time(double distance) const {
  std::size_t i = 1;
  while (i + 1 < anchors.size() && distance > anchors[i].x()) ++i;
  const Vec2& a = anchors[i - 1];
  const Vec2& b = anchors[i];
  const double s = (distance - a.x()) / (b.x() - a.x());
  return a.y() + s * (b.y() - a.y());
}

double ReachCurve::reachable_distance(double time) const {
  if (time < anchors.front().y()) return 0.0;
  std::size_t i = 1;
  while (i + 1 < anchors.size() && time > anchors[i].y()) ++i;
  const Vec2& a = anchors[i - 1];
  const Vec2& b = anchors[i];
  if (b.y() == a.y()) return b.x();
  const double s = (time - a.y()) / (b.y() - a.y());
  return a.x() + s * (b.x() - a.x());
}

void ExecutorConfig::validate() const {
  reach_curve.validate();
  if (!(swing_duration > 0.0)) throw InvariantViolation("executor: swing_duration must be positive");
  if (!(max_reach_radius > 0.0)) throw InvariantViolation("executor: max_reach_radius must be positive");
  if (!(racket_radius > 0.0)) throw InvariantViolation("executor: racket_radius must be positive");
  if (!(thickness_band > 0.0)) throw InvariantViolation("executor: thickness_band must be positive");
  if (!(position_error_sigma >= 0.0 && velocity_error_sigma >= 0.0 && timing_jitter_sigma >= 0.0)) {
    throw InvariantViolation("executor: sigmas must be non-negative");
  }
}

ExecutorConfig ExecutorConfig::perfect() {
  ExecutorConfig e;
  e.position_error_sigma = 0.0;
  e.velocity_error_sigma = 0.0;
  e.timing_jitter_sigma = 0.0;
  return e;
}

ExecutionResult execute_strike(const StrikeCommand& command, const ExecutorConfig& executor,
                               const BaseState& base, Rng& rng) {
  ExecutionResult result;
  result.base_reached = base.p_xy;

  const double budget = std::min(command.t_strike - base.t_command, executor.swing_duration);
  const Vec2 displacement = command.p_base_target - base.p_xy;
  const double distance = displacement.norm();
  if (budget < 0.0 || executor.reach_curve.reach_time(distance) > budget) {
    const double covered = budget > 0.0 ? executor.reach_curve.reachable_distance(budget) : 0.0;
    if (distance > 0.0) result.base_reached = base.p_xy + displacement * (covered / distance);
    result.failure = FailureMode::TooLate;
    return result;
  }
  result.base_reached = command.p_base_target;

  const Vec3 reach_center(command.p_base_target.x(), command.p_base_target.y(),
                          executor.reach_center_height);
  if ((command.p_racket - reach_center).norm() > executor.max_reach_radius) {
    result.failure = FailureMode::OutOfReach;
    return result;
  }

  RacketState racket;
  racket.t = command.t_strike + executor.timing_jitter_sigma * standard_normal(rng);
  racket.p = command.p_racket + gaussian3(rng, executor.position_error_sigma);
  racket.v = command.v_racket + gaussian3(rng, executor.velocity_error_sigma);
  racket.n = command.n_racket;
  result.racket = racket;
  return result;
}

Contact resolve_contact(const BallState& ball, const RacketState& racket, double racket_radius,
                        double thickness_band) {
  const Vec3 d = ball.p - racket.p;
  Contact c;
  c.normal_offset = d.dot(racket.n);
  c.in_plane_offset = (d - c.normal_offset * racket.n).norm();
  c.hit = c.in_plane_offset <= racket_radius && std::abs(c.normal_offset) <= thickness_band;
  return c;
}

Contact resolve_contact(const FlightSegment& segment, const RacketState& racket,
                        double racket_radius, double thickness_band) {
  if (racket.t < segment.initial_state().t || racket.t > segment.final_state().t) return {};
  return resolve_contact(state_at(segment, racket.t), racket, racket_radius, thickness_band);
}

// ---------------------------------------------------------------------------
// Launcher

void LaunchSpec::validate() const {
  if (!origin.allFinite() || !origin_sigma.allFinite()) throw InvalidSpec("launch: non-finite origin");
  if (!(origin.x() > 0.0)) throw InvalidSpec("launch: origin must be on the opponent side (x > 0)");
  if (!(origin.z() > 0.0)) throw InvalidSpec("launch: origin must be above the table surface");
  if ((origin_sigma.array() < 0.0).any() || flight_time_sigma < 0.0) {
    throw InvalidSpec("launch: sigmas must be non-negative");
  }
  if (!(flight_time > 0.0)) throw InvalidSpec("launch: flight_time must be positive");
  if (target_y_hi < target_y_lo || target_z_hi < target_z_lo) {
    throw InvalidSpec("launch: empty target rectangle");
  }
}

bool LaunchSpec::deterministic() const {
  return origin_sigma.isZero(0.0) && flight_time_sigma == 0.0 && target_y_hi == target_y_lo &&
         target_z_hi == target_z_lo;
}

namespace {

// Drag-free launch velocities with a single bounce on the robot half that
// clear the net, parametrized by the bounce time. Bounces nearest the
// middle of the robot half come first.
std::vector<Vec3> drag_free_launches(const Vec3& origin, double target_y, double target_z,
                                     double flight_time, const PhysicsParams& params,
                                     const TableGeometry& geometry) {
  const double g = -params.g.z();
  const double x_plane = geometry.hit_plane_x;
  struct Shot {
    double miss;
    Vec3 v;
    Vec3 bounce;
  };
  auto shoot = [&](double tb) {
    const double vz = (0.5 * g * tb * tb - origin.z()) / tb;
    const double vz_plus = -params.c_v * (vz - g * tb);
    const double tau = flight_time - tb;
    const double z_plane = vz_plus * tau - 0.5 * g * tau * tau;
    const double horizontal_time = tb + params.c_h * tau;
    const double vx = (x_plane - origin.x()) / horizontal_time;
    const double vy = (target_y - origin.y()) / horizontal_time;
    return Shot{z_plane - target_z, Vec3(vx, vy, vz),
                Vec3(origin.x() + vx * tb, origin.y() + vy * tb, 0.0)};
  };
  auto clears_net = [&](const Shot& shot) {
    const double t_net = -origin.x() / shot.v.x();
    const double z_net = origin.z() + shot.v.z() * t_net - 0.5 * g * t_net * t_net;
    return z_net > geometry.net_height;
  };

  constexpr int kScan = 2000;
  std::vector<Shot> roots;
  double prev_tb = flight_time * 0.5 / kScan;
  Shot prev = shoot(prev_tb);
  for (int i = 1; i < kScan; ++i) {
    const double tb = flight_time * (i + 0.5) / kScan;
    const Shot cur = shoot(tb);
    if ((prev.miss > 0.0) != (cur.miss > 0.0)) {
      double lo = prev_tb, hi = tb;
      const bool lo_positive = prev.miss > 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((shoot(mid).miss > 0.0) == lo_positive) lo = mid; else hi = mid;
      }
      const Shot root = shoot(0.5 * (lo + hi));
      if (root.bounce.x() < 0.0 && root.bounce.x() > -geometry.half_length() &&
          std::abs(root.bounce.y()) <= geometry.half_width() && clears_net(root)) {
        roots.push_back(root);
      }
    }
    prev = cur;
    prev_tb = tb;
  }
  const double middle = -0.5 * geometry.half_length();
  std::stable_sort(roots.begin(), roots.end(), [&](const Shot& a, const Shot& b) {
    return std::abs(a.bounce.x() - middle) < std::abs(b.bounce.x() - middle);
  });
  std::vector<Vec3> out;
  for (const Shot& r : roots) out.push_back(r.v);
  return out;
}

struct LaunchResidual {
  bool valid = false;
  Vec3 r{Vec3::Zero()};
  FlightSegment segment;
};

LaunchResidual launch_residual(const Vec3& origin, const Vec3& v, double target_y, double target_z,
                               double flight_time, const PhysicsParams& params,
                               const TableGeometry& geometry, const IntegratorOptions& options) {
  LaunchResidual out;
  try {
    out.segment = integrate(BallState{0.0, origin, v}, params, geometry, StopCondition::at_hit_plane(), options);
  } catch (const NonTermination&) {
    return out;
  }
  if (out.segment.termination != Termination::ReachedPlane) return out;
  const BallState& at = out.segment.final_state();
  out.valid = true;
  out.r = Vec3(at.t - flight_time, at.p.y() - target_y, at.p.z() - target_z);
  return out;
}

}  // namespace

namespace {

// Newton shooting from a drag-free guess. Returns the launch velocity or
// the reason it was rejected.
std::variant<Vec3, std::string> shoot_launch(Vec3 v, const Vec3& origin, double target_y,
                                             double target_z, double flight_time,
                                             const PhysicsParams& params,
                                             const TableGeometry& geometry,
                                             const IntegratorOptions& options) {
  LaunchResidual res = launch_residual(origin, v, target_y, target_z, flight_time, params, geometry, options);
  constexpr double kDelta = 1e-7;
  constexpr double kTolerance = 1e-10;
  for (int iter = 0; iter < 40 && res.valid && res.r.norm() > kTolerance; ++iter) {
    Eigen::Matrix3d jacobian;
    bool ok = true;
    for (int j = 0; j < 3 && ok; ++j) {
      Vec3 dv = v;
      dv[j] += kDelta;
      const LaunchResidual d = launch_residual(origin, dv, target_y, target_z, flight_time, params, geometry, options);
      ok = d.valid;
      jacobian.col(j) = (d.r - res.r) / kDelta;
    }
    if (!ok) break;
    Vec3 step = jacobian.partialPivLu().solve(res.r);
    // Halve until the residual improves, so the iterate never jumps to a
    // different bounce pattern.
    LaunchResidual trial;
    for (int halving = 0; halving < 20; ++halving, step *= 0.5) {
      trial = launch_residual(origin, v - step, target_y, target_z, flight_time, params, geometry, options);
      if (trial.valid && trial.r.norm() < res.r.norm()) break;
    }
    if (!trial.valid || !(trial.r.norm() < res.r.norm())) break;
    v -= step;
    res = std::move(trial);
  }

  if (!res.valid || res.r.norm() > 1e-9) return std::string("shooting did not converge on the target");
  const auto& bounces = res.segment.bounces;
  if (bounces.size() != 1 || !(bounces.front().p.x() < 0.0)) {
    return std::string("solution does not bounce exactly once on the robot half");
  }
  const auto& s = res.segment.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (crosses_net_region(s[i - 1].p, s[i].p, geometry)) return std::string("ball hits the net");
  }
  return v;
}

}  // namespace

BallState solve_launch(const Vec3& origin, double target_y, double target_z, double flight_time,
                       const PhysicsParams& params, const TableGeometry& geometry,
                       const IntegratorOptions& options) {
  const auto guesses = drag_free_launches(origin, target_y, target_z, flight_time, params, geometry);
  if (guesses.empty()) throw InvalidSpec("launch: no one-bounce drag-free launch reaches the target");
  std::string reason;
  for (const Vec3& guess : guesses) {
    auto result = shoot_launch(guess, origin, target_y, target_z, flight_time, params, geometry, options);
    if (const Vec3* v = std::get_if<Vec3>(&result)) return BallState{0.0, origin, *v};
    if (reason.empty()) reason = std::get<std::string>(result);
  }
  throw InvalidSpec("launch: " + reason);
}

double nearest_feasible_flight_time(double preferred, const Vec3& origin, double target_y,
                                    double target_z, const PhysicsParams& params,
                                    const TableGeometry& geometry,
                                    const IntegratorOptions& options) {
  constexpr double kLattice = 0.05;
  constexpr double kMin = 0.2;
  constexpr double kMax = 3.0;
  const long center = std::lround(std::clamp(preferred, kMin, kMax) / kLattice);
  std::vector<double> candidates;
  for (long j = 0; j <= std::lround((kMax - kMin) / kLattice); ++j) {
    for (long t_index : {center - j, center + j}) {
      const double t = t_index * kLattice;
      if (t >= kMin - 1e-9 && t <= kMax + 1e-9) candidates.push_back(t);
      if (j == 0) break;
    }
  }
  int full_attempts = 0;
  for (double t : candidates) {
    if (drag_free_launches(origin, target_y, target_z, t, params, geometry).empty()) continue;
    try {
      solve_launch(origin, target_y, target_z, t, params, geometry, options);
      return t;
    } catch (const InvalidSpec&) {
    }
    if (++full_attempts >= 20) break;
  }
  throw InvalidSpec("launch: no feasible flight time for the target");
}

namespace {

BallState launch_to(const Vec3& origin, double y, double z, double flight_time, const LaunchSpec& spec,
                    const PhysicsParams& params, const TableGeometry& geometry,
                    const IntegratorOptions& options) {
  try {
    return solve_launch(origin, y, z, flight_time, params, geometry, options);
  } catch (const InvalidSpec&) {
    if (spec.exact_flight_time) throw;
  }
  const double t = nearest_feasible_flight_time(flight_time, origin, y, z, params, geometry, options);
  return solve_launch(origin, y, z, t, params, geometry, options);
}

}  // namespace

BallState launch_ball(const LaunchSpec& spec, const PhysicsParams& params,
                      const TableGeometry& geometry, Rng& rng, const IntegratorOptions& options) {
  spec.validate();
  if (spec.deterministic()) {
    return launch_to(spec.origin, spec.target_y_lo, spec.target_z_lo, spec.flight_time, spec, params,
                     geometry, options);
  }
  constexpr int kAttempts = 50;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const Vec3 origin = spec.origin + spec.origin_sigma.cwiseProduct(
                                          Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng)));
    const double flight_time = spec.flight_time + spec.flight_time_sigma * standard_normal(rng);
    const double y = uniform(rng, spec.target_y_lo, spec.target_y_hi);
    const double z = uniform(rng, spec.target_z_lo, spec.target_z_hi);
    if (!(origin.x() > 0.0 && origin.z() > 0.0 && flight_time > 0.0)) continue;
    try {
      return launch_to(origin, y, z, flight_time, spec, params, geometry, options);
    } catch (const InvalidSpec&) {
    }
  }
  throw InvalidSpec("launch: no feasible sample in " + std::to_string(kAttempts) + " attempts");
}

TrajectoryRecord synthesize_trajectory(const std::string& id, const LaunchSpec& spec,
                                       const PhysicsParams& params, const TableGeometry& geometry,
                                       double noise, Rng& rng, const IntegratorOptions& options) {
  const BallState launch = launch_ball(spec, params, geometry, rng, options);
  const FlightSegment flight = integrate(launch, params, geometry, StopCondition::at_hit_plane(), options);
  TrajectoryRecord record;
  record.id = id;
  // The terminal state sits on the plane between grid points; a camera
  // would not see it.
  for (std::size_t i = 0; i + 1 < flight.samples.size(); ++i) {
    const BallState& s = flight.samples[i];
    record.samples.push_back({s.t, noise > 0.0 ? Vec3(s.p + gaussian3(rng, noise)) : s.p});
  }
  const BallState& crossing = flight.final_state();
  record.meta["source"] = "\"synthetic\"";
  record.set_meta_number("noise", noise);
  record.set_meta_number("k", params.k);
  record.set_meta_number("c_h", params.c_h);
  record.set_meta_number("c_v", params.c_v);
  record.set_meta_number("truth_t_strike", crossing.t);
  record.set_meta_number("truth_strike_x", crossing.p.x());
  record.set_meta_number("truth_strike_y", crossing.p.y());
  record.set_meta_number("truth_strike_z", crossing.p.z());
  return record;
}

std::vector<TrajectoryRecord> synthesize_trajectories(std::size_t count, const LaunchSpec& spec,
                                                      const PhysicsParams& params,
                                                      const TableGeometry& geometry, double noise,
                                                      std::uint64_t seed,
                                                      const IntegratorOptions& options) {
  std::vector<TrajectoryRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {i}));
    char id[32];
    std::snprintf(id, sizeof id, "traj-%03zu", i);
    out.push_back(synthesize_trajectory(id, spec, params, geometry, noise, rng, options));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed loop

ShotResult run_shot(const BallState& incoming, const SimulationConfig& sim, const SideConfig& side,
                    const BasePose& base, Rng& rng) {
  const TableGeometry& geometry = sim.geometry;
  ShotResult result;
  result.base_after = base;
  auto fail = [&](FailureMode mode, bool hit = false) {
    result.outcome = ShotOutcome{hit, false, std::nullopt, mode};
    return result;
  };

  constexpr double kObservationWindow = 3.0;
  const FlightSegment truth = integrate(incoming, sim.truth, geometry,
                                        StopCondition::after(kObservationWindow), sim.integrator);

  // Perception and planning at the measurement rate.
  BallTracker tracker(side.estimator);
  std::optional<StrikeCommand> command;
  std::optional<double> t_issue;
  const std::size_t measured = truth.termination == Termination::ReachedTime
                                   ? truth.samples.size()
                                   : truth.samples.size() - 1;
  for (std::size_t i = 0; i < measured; ++i) {
    const BallState& s = truth.samples[i];
    const Vec3 z = side.measurement_noise > 0.0 ? Vec3(s.p + gaussian3(rng, side.measurement_noise)) : s.p;
    const auto estimate = tracker.push(s.t, z);
    if (!estimate) continue;
    StrikePrediction prediction;
    try {
      prediction = predict_strike(*estimate, side.model, geometry, sim.integrator);
    } catch (const NoPlaneCrossing&) {
      continue;
    }
    try {
      command = plan_strike(prediction, geometry, side.model, side.planner, base);
    } catch (const DegenerateImpactDirection&) {
      continue;
    }
    if (!t_issue) t_issue = estimate->t;
    if (estimate->t >= command->t_strike - side.lock_time) break;
  }
  if (!command) return fail(FailureMode::Miss);
  result.command = command;

  const ExecutionResult exec = execute_strike(*command, side.executor, BaseState{base.p_xy, *t_issue}, rng);
  result.base_after.p_xy = exec.base_reached;
  if (exec.failure != FailureMode::None) return fail(exec.failure);
  const RacketState& racket = *exec.racket;

  if (racket.t < incoming.t) return fail(FailureMode::Miss);
  const FlightSegment to_contact = integrate(incoming, sim.truth, geometry,
                                             StopCondition::after(racket.t - incoming.t), sim.integrator);
  if (to_contact.termination != Termination::ReachedTime) return fail(FailureMode::Miss);
  const BallState ball = to_contact.final_state();
  if (!resolve_contact(ball, racket, side.executor.racket_radius, side.executor.thickness_band).hit) {
    return fail(FailureMode::Miss);
  }

  Vec3 v_out;
  try {
    v_out = racket_impact(ball.v, racket.v, racket.n, sim.truth.c_r);
  } catch (const NoApproach&) {
    return fail(FailureMode::Miss);
  }
  result.outgoing = BallState{racket.t, ball.p, v_out};

  FlightSegment ret;
  try {
    ret = integrate(*result.outgoing, sim.truth, geometry, StopCondition::at_landing(), sim.integrator);
  } catch (const NonTermination&) {
    return fail(FailureMode::OffTable, true);
  }
  for (std::size_t i = 1; i < ret.samples.size(); ++i) {
    if (crosses_net_region(ret.samples[i - 1].p, ret.samples[i].p, geometry)) {
      return fail(FailureMode::NetHit, true);
    }
  }
  const BallState& landing = ret.final_state();
  if (ret.termination == Termination::Landed && on_opponent_half(landing.p, geometry)) {
    result.outcome = ShotOutcome{true, true, landing.p, FailureMode::None};
    return result;
  }
  return fail(FailureMode::OffTable, true);
}

std::vector<GridCell> GridSpec::cells() const {
  if (!(cell > 0.0) || y_hi <= y_lo || z_hi <= z_lo) throw InvalidSpec("grid: empty grid");
  const int ny = static_cast<int>(std::lround((y_hi - y_lo) / cell));
  const int nz = static_cast<int>(std::lround((z_hi - z_lo) / cell));
  if (ny < 1 || nz < 1) throw InvalidSpec("grid: fewer than one cell per axis");
  std::vector<GridCell> out;
  for (int iz = 0; iz < nz; ++iz) {
    for (int iy = 0; iy < ny; ++iy) {
      if (drop_top_corners && nz > 1 && ny > 2 && iz == nz - 1 && (iy == 0 || iy == ny - 1)) continue;
      // Rounded to the nanometer so edges print as written.
      auto edge = [](double x) { return std::round(x * 1e9) / 1e9; };
      out.push_back({edge(y_lo + iy * cell), edge(y_lo + (iy + 1) * cell), edge(z_lo + iz * cell),
                     edge(z_lo + (iz + 1) * cell)});
    }
  }
  return out;
}

GridReport run_grid(const GridSpec& grid, const SimulationConfig& sim, const SideConfig& side,
                    const LaunchSpec& launch, std::size_t trials_per_cell, std::uint64_t seed,
                    std::size_t threads) {
  const std::vector<GridCell> cells = grid.cells();
  const std::size_t total = cells.size() * trials_per_cell;
  std::vector<ShotOutcome> outcomes(total);
  detail::parallel_for(total, threads, [&](std::size_t index) {
    const std::size_t c = index / trials_per_cell;
    const std::size_t trial = index % trials_per_cell;
    Rng rng(derive_seed(seed, {c, trial}));
    LaunchSpec spec = launch;
    spec.target_y_lo = cells[c].y_lo;
    spec.target_y_hi = cells[c].y_hi;
    spec.target_z_lo = cells[c].z_lo;
    spec.target_z_hi = cells[c].z_hi;
    const BallState incoming = launch_ball(spec, sim.truth, sim.geometry, rng, sim.integrator);
    outcomes[index] = run_shot(incoming, sim, side, side.home, rng).outcome;
  });

  GridReport report;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellReport cr{cells[c], trials_per_cell, 0, 0};
    for (std::size_t t = 0; t < trials_per_cell; ++t) {
      const ShotOutcome& o = outcomes[c * trials_per_cell + t];
      cr.hits += o.hit ? 1 : 0;
      cr.returns += o.returned ? 1 : 0;
    }
    report.trials += cr.trials;
    report.hits += cr.hits;
    report.returns += cr.returns;
    report.cells.push_back(cr);
  }
  return report;
}

RallyOutcome run_rally(const SimulationConfig& sim, const SideConfig& side_a,
                       const SideConfig& side_b, const LaunchSpec& serve, std::uint64_t seed,
                       std::size_t max_shots) {
  RallyOutcome rally;
  rally.seed = seed;
  Rng rng(seed);
  BallState incoming = launch_ball(serve, sim.truth, sim.geometry, rng, sim.integrator);
  const SideConfig* sides[2] = {&side_a, &side_b};
  BasePose bases[2] = {side_a.home, side_b.home};

  for (std::size_t shot = 0; rally.shot_count < max_shots; ++shot) {
    const std::size_t who = shot % 2;
    const ShotResult r = run_shot(incoming, sim, *sides[who], bases[who], rng);
    bases[who] = r.base_after;
    rally.shots.push_back(r.outcome);
    if (!r.outcome.returned) {
      rally.terminal_failure = r.outcome.failure_mode;
      break;
    }
    ++rally.shot_count;
    incoming = mirror_state(*r.outgoing);
  }
  return rally;
}

}  // namespace ttplan
