#include <doctest.h>

#include "ttplan/rally_simulator.hpp"

#include <cmath>

using ttplan::BallState;
using ttplan::ExecutorConfig;
using ttplan::FailureMode;
using ttplan::LaunchSpec;
using ttplan::PhysicsParams;
using ttplan::SideConfig;
using ttplan::SimulationConfig;
using ttplan::StrikeCommand;
using ttplan::TableGeometry;
using ttplan::Vec2;
using ttplan::Vec3;

namespace {

PhysicsParams world(double k) {
  PhysicsParams p;
  p.k = k;
  p.c_h = 0.75;
  p.c_v = 0.9;
  p.c_r = 0.8;
  return p;
}

SimulationConfig sim_of(double k) {
  SimulationConfig sim;
  sim.truth = world(k);
  return sim;
}

SideConfig perfect_side(const PhysicsParams& model) {
  SideConfig side;
  side.model = model;
  side.executor = ExecutorConfig::perfect();
  return side;
}

LaunchSpec aimed(double y, double z) {
  LaunchSpec s;
  s.target_y_lo = s.target_y_hi = y;
  s.target_z_lo = s.target_z_hi = z;
  return s;
}

StrikeCommand command_at_home() {
  StrikeCommand cmd;
  cmd.t_strike = 1.0;
  cmd.p_racket = Vec3(-1.37, 0.0, 0.3);
  cmd.v_racket = Vec3(2.0, 0.0, 1.0);
  cmd.n_racket = Vec3(2.0, 0.0, 1.0).normalized();
  cmd.p_base_target = Vec2(-1.77, 0.0);
  return cmd;
}

// Drag-free flight from `v` at the origin, one bounce, to the plane.
Vec3 drag_free_crossing(const BallState& launch, const PhysicsParams& p) {
  PhysicsParams free = p;
  free.k = 0.0;
  return ttplan::predict_strike(launch, free, TableGeometry{}).p_strike;
}

}  // namespace

TEST_CASE("reach curve anchors and extrapolation") {
  const ttplan::ReachCurve curve;
  CHECK(curve.reach_time(0.0) == 0.0);
  CHECK(curve.reach_time(0.75) == doctest::Approx(0.8));
  CHECK(curve.reach_time(1.5) == doctest::Approx(1.6));
  CHECK(curve.reachable_distance(0.8) == doctest::Approx(0.75));
  CHECK(curve.reachable_distance(curve.reach_time(0.4)) == doctest::Approx(0.4));
  ttplan::ReachCurve bad;
  bad.anchors = {Vec2(0, 0), Vec2(0, 1)};
  CHECK_THROWS_AS(bad.validate(), ttplan::InvariantViolation);
}

TEST_CASE("perfect executor at the target reproduces the command") {
  ttplan::Rng rng(1);
  const StrikeCommand cmd = command_at_home();
  const auto r = ttplan::execute_strike(cmd, ExecutorConfig::perfect(), {Vec2(-1.77, 0.0), 0.0}, rng);
  REQUIRE(r.failure == FailureMode::None);
  REQUIRE(r.racket);
  CHECK(r.racket->t == cmd.t_strike);
  CHECK(r.racket->p == cmd.p_racket);
  CHECK(r.racket->v == cmd.v_racket);
  CHECK(r.racket->n == cmd.n_racket);
}

TEST_CASE("base displacement against the reach budget") {
  ttplan::Rng rng(2);
  StrikeCommand cmd = command_at_home();
  cmd.t_strike = 0.86;
  // 0.75 m sideways takes 0.8 s, within the 0.86 s swing.
  cmd.p_base_target = Vec2(-1.77, 0.75);
  cmd.p_racket = Vec3(-1.37, 0.5, 0.4);
  CHECK(ttplan::execute_strike(cmd, ExecutorConfig::perfect(), {Vec2(-1.77, 0.0), 0.0}, rng).failure ==
        FailureMode::None);
  cmd.p_base_target = Vec2(-1.77, 2.0);
  cmd.p_racket = Vec3(-1.37, 1.75, 0.4);
  const auto late = ttplan::execute_strike(cmd, ExecutorConfig::perfect(), {Vec2(-1.77, 0.0), 0.0}, rng);
  CHECK(late.failure == FailureMode::TooLate);
  CHECK(late.base_reached.y() == doctest::Approx(0.86 * 0.75 / 0.8));
}

TEST_CASE("the swing duration caps the budget") {
  ttplan::Rng rng(3);
  StrikeCommand cmd = command_at_home();
  cmd.t_strike = 5.0;
  cmd.p_base_target = Vec2(-1.77, 0.85);
  cmd.p_racket = Vec3(-1.37, 0.6, 0.4);
  CHECK(ttplan::execute_strike(cmd, ExecutorConfig::perfect(), {Vec2(-1.77, 0.0), 0.0}, rng).failure ==
        FailureMode::TooLate);
}

TEST_CASE("strike point beyond the arm is out of reach") {
  ttplan::Rng rng(4);
  StrikeCommand cmd = command_at_home();
  cmd.p_racket = Vec3(-1.37, 0.0, 1.3);
  CHECK(ttplan::execute_strike(cmd, ExecutorConfig::perfect(), {Vec2(-1.77, 0.0), 0.0}, rng).failure ==
        FailureMode::OutOfReach);
}

TEST_CASE("contact geometry") {
  ttplan::RacketState racket;
  racket.p = Vec3(-1.37, 0.0, 0.3);
  racket.n = Vec3(1, 0, 0);
  const BallState center{0.0, racket.p, Vec3(-3, 0, 0)};
  CHECK(ttplan::resolve_contact(center, racket, 0.075).hit);
  const BallState off{0.0, racket.p + Vec3(0, 0.076, 0), Vec3(-3, 0, 0)};
  const auto miss = ttplan::resolve_contact(off, racket, 0.075);
  CHECK_FALSE(miss.hit);
  CHECK(miss.in_plane_offset == doctest::Approx(0.076));
  const BallState edge{0.0, racket.p + Vec3(0.019, 0.07, 0), Vec3(-3, 0, 0)};
  CHECK(ttplan::resolve_contact(edge, racket, 0.075).hit);
  const BallState thick{0.0, racket.p + Vec3(0.021, 0, 0), Vec3(-3, 0, 0)};
  CHECK_FALSE(ttplan::resolve_contact(thick, racket, 0.075).hit);
}

TEST_CASE("deterministic launches repeat and hit the target") {
  const PhysicsParams p = world(0.1);
  const LaunchSpec spec = aimed(-0.3, 0.4);
  ttplan::Rng a(1), b(99);
  const BallState s1 = ttplan::launch_ball(spec, p, TableGeometry{}, a);
  const BallState s2 = ttplan::launch_ball(spec, p, TableGeometry{}, b);
  CHECK(s1.p == s2.p);
  CHECK(s1.v == s2.v);
  const auto pred = ttplan::predict_strike(s1, p, TableGeometry{});
  CHECK(std::abs(pred.p_strike.y() + 0.3) <= 1e-9);
  CHECK(std::abs(pred.p_strike.z() - 0.4) <= 1e-9);
  CHECK(pred.bounce_count == 1);
}

TEST_CASE("drag-free launches cross within 1 cm of the target") {
  const PhysicsParams p = world(0.0);
  for (double y : {-0.6, 0.0, 0.5}) {
    for (double z : {0.25, 0.5, 0.9}) {
      ttplan::Rng rng(0);
      const BallState s = ttplan::launch_ball(aimed(y, z), p, TableGeometry{}, rng);
      // Independent check: closed-form one-bounce ballistics from the launch.
      const double g = 9.81;
      const double vz = s.v.z();
      const double tb = (vz + std::sqrt(vz * vz + 2 * g * s.p.z())) / g;
      const Vec3 bounce(s.p.x() + s.v.x() * tb, s.p.y() + s.v.y() * tb, 0.0);
      const double tau = (-1.37 - bounce.x()) / (p.c_h * s.v.x());
      const double vz_plus = p.c_v * (g * tb - vz);
      const Vec3 crossing(-1.37, bounce.y() + p.c_h * s.v.y() * tau, vz_plus * tau - 0.5 * g * tau * tau);
      CHECK(bounce.x() < 0.0);
      CHECK((crossing - Vec3(-1.37, y, z)).norm() <= 0.01);
      CHECK((drag_free_crossing(s, p) - Vec3(-1.37, y, z)).norm() <= 0.01);
    }
  }
}

TEST_CASE("exact flight time is honoured or rejected") {
  const PhysicsParams p = world(0.1);
  LaunchSpec spec = aimed(0.0, 0.3);
  spec.flight_time = 0.75;
  spec.exact_flight_time = true;
  ttplan::Rng rng(0);
  const BallState s = ttplan::launch_ball(spec, p, TableGeometry{}, rng);
  CHECK(ttplan::predict_strike(s, p, TableGeometry{}).t_strike == doctest::Approx(0.75).epsilon(1e-9));
  spec.flight_time = 0.05;
  CHECK_THROWS_AS(ttplan::launch_ball(spec, p, TableGeometry{}, rng), ttplan::InvalidSpec);
}

TEST_CASE("seeded random launches repeat") {
  LaunchSpec spec;
  spec.origin_sigma = Vec3(0.05, 0.05, 0.05);
  spec.flight_time_sigma = 0.05;
  spec.target_y_lo = -0.5;
  spec.target_y_hi = 0.5;
  ttplan::Rng a(42), b(42), c(43);
  const BallState s1 = ttplan::launch_ball(spec, world(0.1), TableGeometry{}, a);
  const BallState s2 = ttplan::launch_ball(spec, world(0.1), TableGeometry{}, b);
  const BallState s3 = ttplan::launch_ball(spec, world(0.1), TableGeometry{}, c);
  CHECK(s1.v == s2.v);
  CHECK(s1.p == s2.p);
  CHECK(s1.v != s3.v);
}

TEST_CASE("synthetic records carry the true crossing") {
  const auto records = ttplan::synthesize_trajectories(3, aimed(0.2, 0.3), world(0.1), TableGeometry{}, 0.0, 5);
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == "traj-000");
  CHECK(records[2].id == "traj-002");
  for (const auto& r : records) {
    CHECK_NOTHROW(r.validate());
    CHECK(r.meta_number("truth_strike_y").value() == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(r.meta_number("truth_t_strike").value() > r.samples.back().t);
    CHECK(r.samples.back().p.x() > -1.37);
  }
}

TEST_CASE("perfect shot lands on the target") {
  const SimulationConfig sim = sim_of(0.0);
  const SideConfig side = perfect_side(sim.truth);
  for (double y : {-0.5, 0.0, 0.5}) {
    ttplan::Rng rng(7);
    const BallState incoming = ttplan::launch_ball(aimed(y, 0.4), sim.truth, sim.geometry, rng);
    const auto r = ttplan::run_shot(incoming, sim, side, side.home, rng);
    CHECK(r.outcome.hit);
    CHECK(r.outcome.returned);
    CHECK(r.outcome.failure_mode == FailureMode::None);
    REQUIRE(r.outcome.landing_point);
    CHECK((*r.outcome.landing_point - sim.geometry.landing_target).norm() <= 0.01);
  }
}

TEST_CASE("drag compensation lands on the target in a drag world") {
  const SimulationConfig sim = sim_of(0.1);
  SideConfig side = perfect_side(sim.truth);
  side.planner.compensate_drag = true;
  ttplan::Rng rng(8);
  const BallState incoming = ttplan::launch_ball(aimed(0.3, 0.5), sim.truth, sim.geometry, rng);
  const auto r = ttplan::run_shot(incoming, sim, side, side.home, rng);
  REQUIRE(r.outcome.landing_point);
  CHECK((*r.outcome.landing_point - sim.geometry.landing_target).norm() <= 0.01);
}

TEST_CASE("unreachable balls fail before contact") {
  const SimulationConfig sim = sim_of(0.1);
  SideConfig side = perfect_side(sim.truth);
  side.home.p_xy = Vec2(-1.77, -1.5);
  side.executor.reach_curve.anchors = {Vec2(0.0, 0.0), Vec2(0.75, 3.0)};
  ttplan::Rng rng(9);
  const BallState incoming = ttplan::launch_ball(aimed(0.0, 0.3), sim.truth, sim.geometry, rng);
  const auto r = ttplan::run_shot(incoming, sim, side, side.home, rng);
  CHECK_FALSE(r.outcome.hit);
  CHECK((r.outcome.failure_mode == FailureMode::TooLate || r.outcome.failure_mode == FailureMode::OutOfReach));
}

TEST_CASE("wide return is off the table") {
  SimulationConfig sim = sim_of(0.0);
  sim.geometry.landing_target = Vec3(0.685, 1.0, 0.0);
  const SideConfig side = perfect_side(sim.truth);
  ttplan::Rng rng(10);
  const BallState incoming = ttplan::launch_ball(aimed(0.0, 0.4), sim.truth, sim.geometry, rng);
  const auto r = ttplan::run_shot(incoming, sim, side, side.home, rng);
  CHECK(r.outcome.hit);
  CHECK_FALSE(r.outcome.returned);
  CHECK(r.outcome.failure_mode == FailureMode::OffTable);
}

TEST_CASE("grid layout") {
  const auto cells = ttplan::GridSpec{}.cells();
  CHECK(cells.size() == 26);
  CHECK(cells.front().y_lo == -0.7);
  CHECK(cells.front().z_lo == 0.2);
  ttplan::GridSpec full;
  full.drop_top_corners = false;
  CHECK(full.cells().size() == 28);
}

TEST_CASE("perfect grid returns everything") {
  const SimulationConfig sim = sim_of(0.1);
  const auto report = ttplan::run_grid(ttplan::GridSpec{}, sim, perfect_side(sim.truth), LaunchSpec{}, 1, 3);
  CHECK(report.trials == 26);
  CHECK(report.return_rate() == 1.0);
  CHECK(report.hit_rate() == 1.0);
}

TEST_CASE("grid results do not depend on the thread count") {
  const SimulationConfig sim = sim_of(0.1);
  SideConfig side = perfect_side(sim.truth);
  side.executor = ExecutorConfig{};
  side.measurement_noise = 0.001;
  ttplan::GridSpec small;
  small.y_lo = -0.3;
  small.y_hi = 0.3;
  small.z_lo = 0.2;
  small.z_hi = 0.6;
  const auto a = ttplan::run_grid(small, sim, side, LaunchSpec{}, 3, 17, 1);
  const auto b = ttplan::run_grid(small, sim, side, LaunchSpec{}, 3, 17, 4);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].hits == b.cells[i].hits);
    CHECK(a.cells[i].returns == b.cells[i].returns);
  }
}

TEST_CASE("single-cell grid is reproducible") {
  const SimulationConfig sim = sim_of(0.1);
  SideConfig side = perfect_side(sim.truth);
  side.executor = ExecutorConfig{};
  side.measurement_noise = 0.001;
  ttplan::GridSpec one;
  one.y_lo = 0.0;
  one.y_hi = 0.2;
  one.z_lo = 0.4;
  one.z_hi = 0.6;
  const auto a = ttplan::run_grid(one, sim, side, LaunchSpec{}, 1, 5);
  const auto b = ttplan::run_grid(one, sim, side, LaunchSpec{}, 1, 5);
  REQUIRE(a.cells.size() == 1);
  CHECK(a.hits == b.hits);
  CHECK(a.returns == b.returns);
}

TEST_CASE("hit rate falls with racket position error") {
  const SimulationConfig sim = sim_of(0.1);
  auto rate = [&](double sigma) {
    SideConfig side = perfect_side(sim.truth);
    side.executor.position_error_sigma = sigma;
    return ttplan::run_grid(ttplan::GridSpec{}, sim, side, LaunchSpec{}, 2, 31).hit_rate();
  };
  const double none = rate(0.0);
  const double some = rate(0.03);
  const double lots = rate(0.2);
  CHECK(none == 1.0);
  CHECK(some < none);
  CHECK(some > lots);
}

TEST_CASE("perfect rally runs to the cap") {
  const SimulationConfig sim = sim_of(0.1);
  const SideConfig side = perfect_side(sim.truth);
  const auto rally = ttplan::run_rally(sim, side, side, aimed(0.2, 0.4), 1, 120);
  CHECK(rally.shot_count == 120);
  CHECK(rally.shots.size() == 120);
  CHECK(rally.terminal_failure == FailureMode::None);
}

TEST_CASE("a wild side ends the rally quickly") {
  const SimulationConfig sim = sim_of(0.1);
  const SideConfig good = perfect_side(sim.truth);
  SideConfig wild = good;
  wild.executor.position_error_sigma = 0.5;
  int short_rallies = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    if (ttplan::run_rally(sim, good, wild, aimed(0.0, 0.4), seed, 200).shot_count <= 3) ++short_rallies;
  }
  CHECK(short_rallies >= 99);
}

TEST_CASE("rallies are bit-identical for a seed") {
  const SimulationConfig sim = sim_of(0.1);
  SideConfig side = perfect_side(sim.truth);
  side.executor = ExecutorConfig{};
  side.measurement_noise = 0.001;
  LaunchSpec serve;
  serve.target_y_lo = -0.4;
  serve.target_y_hi = 0.4;
  serve.target_z_hi = 0.5;
  const auto a = ttplan::run_rally(sim, side, side, serve, 77, 30);
  const auto b = ttplan::run_rally(sim, side, side, serve, 77, 30);
  CHECK(a.shot_count == b.shot_count);
  REQUIRE(a.shots.size() == b.shots.size());
  for (std::size_t i = 0; i < a.shots.size(); ++i) {
    CHECK(a.shots[i].failure_mode == b.shots[i].failure_mode);
    CHECK(a.shots[i].landing_point.has_value() == b.shots[i].landing_point.has_value());
    if (a.shots[i].landing_point) CHECK(*a.shots[i].landing_point == *b.shots[i].landing_point);
  }
}
