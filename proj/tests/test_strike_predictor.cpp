#include <doctest.h>

#include "ttplan/rally_simulator.hpp"
#include "ttplan/strike_predictor.hpp"

#include <cmath>

using ttplan::BallState;
using ttplan::PhysicsParams;
using ttplan::TableGeometry;
using ttplan::Vec3;

namespace {

PhysicsParams world(double k) {
  PhysicsParams p;
  p.k = k;
  p.c_h = 0.75;
  p.c_v = 0.9;
  return p;
}

ttplan::LaunchSpec spread() {
  ttplan::LaunchSpec s;
  s.origin_sigma = Vec3(0.05, 0.05, 0.05);
  s.flight_time_sigma = 0.05;
  s.target_y_lo = -0.5;
  s.target_y_hi = 0.5;
  s.target_z_lo = 0.2;
  s.target_z_hi = 0.6;
  return s;
}

}  // namespace

TEST_CASE("drag-free crossing matches the piecewise closed form") {
  const PhysicsParams p = world(0.0);
  const BallState s0{2.0, Vec3(0, 0, 0.5), Vec3(-2, 0, 0)};
  const ttplan::StrikePrediction pred = ttplan::predict_strike(s0, p, TableGeometry{});

  // Falls onto the table before the plane, bounces once.
  const double tb = std::sqrt(2 * 0.5 / 9.81);
  const double xb = -2.0 * tb;
  const double vx = -2.0 * p.c_h;
  const double vz = p.c_v * 9.81 * tb;
  const double dt = (-1.37 - xb) / vx;
  CHECK(pred.bounce_count == 1);
  CHECK(pred.t_strike == doctest::Approx(2.0 + tb + dt).epsilon(1e-10));
  CHECK((pred.p_strike - Vec3(-1.37, 0, vz * dt - 0.5 * 9.81 * dt * dt)).norm() <= 1e-9);
  CHECK((pred.v_incoming - Vec3(vx, 0, vz - 9.81 * dt)).norm() <= 1e-9);
  CHECK_FALSE(pred.flagged());
}

TEST_CASE("drag-free direct crossing without a bounce") {
  const BallState s0{0.0, Vec3(0, 0, 0.5), Vec3(-4, 0, 1)};
  const auto pred = ttplan::predict_strike(s0, world(0.0), TableGeometry{});
  const double t = 1.37 / 4.0;
  CHECK(pred.bounce_count == 0);
  CHECK(pred.t_strike == doctest::Approx(t).epsilon(1e-12));
  CHECK(pred.p_strike.z() == doctest::Approx(0.5 + t - 4.905 * t * t).epsilon(1e-10));
}

TEST_CASE("receding ball has no crossing") {
  const BallState s0{0.0, Vec3(0, 0, 0.5), Vec3(3, 0, 1)};
  CHECK_THROWS_AS(ttplan::predict_strike(s0, world(0.1), TableGeometry{}), ttplan::NoPlaneCrossing);
}

TEST_CASE("ball into the net has no crossing") {
  const BallState s0{0.0, Vec3(0.5, 0, 0.05), Vec3(-3, 0, 0)};
  CHECK_THROWS_AS(ttplan::predict_strike(s0, world(0.1), TableGeometry{}), ttplan::NoPlaneCrossing);
}

TEST_CASE("prediction from the launch state reproduces the simulated crossing") {
  const PhysicsParams p = world(0.1);
  const TableGeometry g;
  const BallState launch = ttplan::solve_launch(Vec3(1.8, 0.1, 0.3), -0.2, 0.35, 1.0, p, g);
  const auto seg = ttplan::integrate(launch, p, g, ttplan::StopCondition::at_hit_plane());
  const auto pred = ttplan::predict_strike(launch, p, g);
  CHECK((pred.p_strike - seg.final_state().p).norm() <= 1e-6);
  CHECK(std::abs(pred.t_strike - seg.final_state().t) <= 1e-6);
  CHECK(pred.bounce_count == 1);
}

TEST_CASE("predictions from later states on the same flight agree") {
  const PhysicsParams p = world(0.1);
  const TableGeometry g;
  const BallState launch = ttplan::solve_launch(Vec3(1.8, 0.0, 0.3), 0.3, 0.4, 1.0, p, g);
  const auto first = ttplan::predict_strike(launch, p, g);
  for (double dt : {0.1, 0.2537, 0.4, 0.7}) {
    const BallState later = ttplan::propagate(launch, dt, p, g);
    const auto pred = ttplan::predict_strike(later, p, g);
    CHECK((pred.p_strike - first.p_strike).norm() <= 1e-6);
    CHECK(std::abs(pred.t_strike - first.t_strike) <= 1e-6);
  }
}

TEST_CASE("ground truth falls back to interpolating the stream") {
  ttplan::TrajectoryRecord r;
  r.samples = {{0.0, Vec3(-1.0, 0, 0.3)}, {0.1, Vec3(-1.2, 0, 0.3)}, {0.2, Vec3(-1.4, 0.1, 0.2)}};
  const auto truth = ttplan::ground_truth_crossing(r, TableGeometry{});
  REQUIRE(truth);
  CHECK(truth->t == doctest::Approx(0.185));
  CHECK(truth->p.z() == doctest::Approx(0.215));
  r.set_meta_number("truth_t_strike", 0.19);
  r.set_meta_number("truth_strike_x", -1.37);
  r.set_meta_number("truth_strike_y", 0.0);
  r.set_meta_number("truth_strike_z", 0.2);
  CHECK(ttplan::ground_truth_crossing(r, TableGeometry{})->t == 0.19);
}

TEST_CASE("noiseless model-matched evaluation is exact") {
  const PhysicsParams p = world(0.0);
  const auto data = ttplan::synthesize_trajectories(10, spread(), p, TableGeometry{}, 0.0, 9);
  const auto curve = ttplan::evaluate_prediction_errors(data, p, TableGeometry{});
  REQUIRE(!curve.bins.empty());
  CHECK(curve.trajectory_count == 10);
  for (const auto& bin : curve.bins) {
    CHECK(bin.mean_position_error <= 1e-4);
    CHECK(bin.mean_time_error <= 1e-4);
    CHECK(bin.mean_position_error >= 0.0);
  }
}

TEST_CASE("noisy evaluation meets the critical thresholds") {
  const PhysicsParams p = world(0.1);
  const auto data = ttplan::synthesize_trajectories(20, spread(), p, TableGeometry{}, 0.001, 10);
  const auto curve = ttplan::evaluate_prediction_errors(data, p, TableGeometry{});
  const auto* at05 = curve.bin_at(0.5);
  const auto* at03 = curve.bin_at(0.3);
  REQUIRE(at05);
  REQUIRE(at03);
  CHECK(at05->time_to_strike == doctest::Approx(0.5));
  CHECK(at03->time_to_strike == doctest::Approx(0.3));
  CHECK(at05->mean_position_error < 0.075);
  CHECK(at03->mean_time_error < 0.020);

  // Errors shrink toward the strike.
  CHECK(curve.bins.front().time_to_strike > curve.bins.back().time_to_strike);
  CHECK(curve.bin_at(0.1)->mean_position_error < curve.bin_at(0.6)->mean_position_error);
  CHECK(curve.bin_at(0.1)->mean_time_error < curve.bin_at(0.6)->mean_time_error);
  for (const auto& bin : curve.bins) {
    CHECK(bin.mean_position_error >= 0.0);
    CHECK(bin.std_position_error >= 0.0);
    CHECK(bin.count > 0);
    CHECK(std::abs(bin.time_to_strike / 0.05 - std::round(bin.time_to_strike / 0.05)) < 1e-9);
  }
}

TEST_CASE("evaluation does not depend on the thread count") {
  const PhysicsParams p = world(0.1);
  const auto data = ttplan::synthesize_trajectories(6, spread(), p, TableGeometry{}, 0.001, 11);
  ttplan::EvaluationConfig serial, parallel;
  parallel.threads = 4;
  const auto a = ttplan::evaluate_prediction_errors(data, p, TableGeometry{}, serial);
  const auto b = ttplan::evaluate_prediction_errors(data, p, TableGeometry{}, parallel);
  REQUIRE(a.bins.size() == b.bins.size());
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    CHECK(a.bins[i].mean_position_error == b.bins[i].mean_position_error);
    CHECK(a.bins[i].std_time_error == b.bins[i].std_time_error);
  }
}
