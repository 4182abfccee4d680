#include <doctest.h>

#include "ttplan/rally_simulator.hpp"
#include "ttplan/system_id.hpp"

#include <cmath>
#include <vector>

using ttplan::BallState;
using ttplan::BouncePair;
using ttplan::PhysicsParams;
using ttplan::TrajectoryRecord;
using ttplan::Vec3;

namespace {

PhysicsParams world(double k, double c_h, double c_v) {
  PhysicsParams p;
  p.k = k;
  p.c_h = c_h;
  p.c_v = c_v;
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

std::vector<TrajectoryRecord> synth(const PhysicsParams& p, double noise, std::uint64_t seed,
                                    std::size_t count = 15) {
  return ttplan::synthesize_trajectories(count, spread(), p, ttplan::TableGeometry{}, noise, seed);
}

TrajectoryRecord record_of(const ttplan::FlightSegment& seg, double until) {
  TrajectoryRecord r;
  r.id = "sim";
  for (const auto& s : seg.samples) {
    if (s.t <= until) r.samples.push_back({s.t, s.p});
  }
  return r;
}

}  // namespace

TEST_CASE("drag-free data gives k near zero") {
  const auto data = synth(world(0.0, 0.75, 0.9), 0.0, 1);
  const ttplan::DragFit fit = ttplan::fit_drag(data);
  CHECK(std::abs(fit.k_hat) <= 1e-3);
  CHECK(fit.sample_count > 100);
}

TEST_CASE("noiseless drag recovery within 2 percent") {
  const auto data = synth(world(0.12, 0.75, 0.9), 0.0, 2);
  CHECK(std::abs(ttplan::fit_drag(data).k_hat - 0.12) <= 0.02 * 0.12);
}

TEST_CASE("noisy drag recovery within 10 percent over 15 trajectories") {
  const auto data = synth(world(0.12, 0.75, 0.9), 0.001, 3);
  REQUIRE(data.size() == 15);
  CHECK(std::abs(ttplan::fit_drag(data).k_hat - 0.12) <= 0.10 * 0.12);
}

TEST_CASE("magnitude observable is biased by noise") {
  const auto data = synth(world(0.12, 0.75, 0.9), 0.001, 3);
  ttplan::SystemIdConfig magnitude;
  magnitude.drag_observable = ttplan::DragObservable::Magnitude;
  const double biased = ttplan::fit_drag(data, magnitude).k_hat;
  const double projected = ttplan::fit_drag(data).k_hat;
  CHECK(std::abs(biased - 0.12) > std::abs(projected - 0.12));
}

TEST_CASE("single bounce exact ratios") {
  const std::vector<BouncePair> pairs{{Vec3(2, 0, -3), Vec3(1.5, 0, 2.7)}};
  const ttplan::RestitutionFit fit = ttplan::fit_restitution_pairs(pairs);
  REQUIRE(fit.c_h_hat);
  CHECK(*fit.c_h_hat == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(fit.c_v_hat == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(fit.residual_v == doctest::Approx(0.0));
}

TEST_CASE("zero horizontal velocity leaves c_h undefined") {
  const std::vector<BouncePair> pairs{{Vec3(0, 0, -3), Vec3(0, 0, 2.7)}};
  const ttplan::RestitutionFit fit = ttplan::fit_restitution_pairs(pairs);
  CHECK_FALSE(fit.c_h_hat);
  CHECK(fit.c_v_hat == doctest::Approx(0.9));

  // Same through the stream path: a vertical drop.
  const auto seg = ttplan::integrate(ttplan::BallState{0.0, Vec3(0, 0, 0.3), Vec3::Zero()},
                                     world(0.0, 0.75, 0.9), ttplan::TableGeometry{},
                                     ttplan::StopCondition::after(0.6));
  REQUIRE(seg.bounces.size() == 1);
  const std::vector<TrajectoryRecord> drop{record_of(seg, 0.6)};
  const ttplan::RestitutionFit from_stream = ttplan::fit_restitution(drop);
  CHECK_FALSE(from_stream.c_h_hat);
  CHECK(from_stream.c_v_hat == doctest::Approx(0.9).epsilon(0.02));
  const ttplan::FitReport report = ttplan::identify(drop);
  CHECK_FALSE(report.c_h_hat);
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("noiseless restitution recovery within 2 percent") {
  const auto data = synth(world(0.1, 0.75, 0.93), 0.0, 4);
  const ttplan::RestitutionFit fit = ttplan::fit_restitution(data);
  REQUIRE(fit.c_h_hat);
  CHECK(std::abs(*fit.c_h_hat - 0.75) <= 0.02 * 0.75);
  CHECK(std::abs(fit.c_v_hat - 0.93) <= 0.02 * 0.93);
  CHECK(fit.bounce_count == 15);
}

TEST_CASE("bounce pair is evaluated at the impact") {
  const PhysicsParams p = world(0.1, 0.75, 0.9);
  const BallState launch = ttplan::solve_launch(Vec3(1.8, 0.0, 0.3), 0.3, 0.4, 0.9, p, ttplan::TableGeometry{});
  const auto seg = ttplan::integrate(launch, p, ttplan::TableGeometry{}, ttplan::StopCondition::at_hit_plane());
  REQUIRE(seg.bounces.size() == 1);
  const BouncePair pair = ttplan::estimate_bounce_pair(record_of(seg, seg.final_state().t));
  CHECK((pair.v_minus - seg.bounces[0].v_minus).norm() < 0.02);
  CHECK((pair.v_plus - seg.bounces[0].v_plus).norm() < 0.02);
}

TEST_CASE("restitution needs exactly one bounce") {
  const auto drop = ttplan::integrate(ttplan::BallState{0.0, Vec3(0, 0, 0.3), Vec3(0.1, 0, 0)},
                                      world(0.0, 0.75, 0.9), ttplan::TableGeometry{},
                                      ttplan::StopCondition::after(1.2));
  REQUIRE(drop.bounces.size() >= 2);
  CHECK_THROWS_AS(ttplan::estimate_bounce_pair(record_of(drop, 1.2)), ttplan::MultipleBounces);
  CHECK_THROWS_AS(ttplan::estimate_bounce_pair(record_of(drop, 0.2)), ttplan::NoBounceFound);
  CHECK_THROWS_AS(ttplan::fit_restitution_pairs({}), ttplan::NoBounceFound);
}

TEST_CASE("racket restitution from observed contacts") {
  std::vector<ttplan::RacketImpactRecord> impacts;
  for (int i = 0; i < 5; ++i) {
    ttplan::RacketImpactRecord r;
    r.v_in = Vec3(-4.0 - i, 0.5 * i, -1.0);
    r.v_racket = Vec3(1.5, 0.0, 0.3 * i);
    r.normal = Vec3(1.0, 0.1 * i, 0.2).normalized();
    r.v_out = ttplan::racket_impact(r.v_in, r.v_racket, r.normal, 0.8);
    impacts.push_back(r);
  }
  CHECK(ttplan::fit_racket_restitution(impacts) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("identify combines both fits") {
  const auto data = synth(world(0.12, 0.75, 0.9), 0.0, 5);
  const ttplan::FitReport report = ttplan::identify(data);
  CHECK(report.trajectory_count == 15);
  CHECK(std::abs(report.k_hat - 0.12) <= 0.02 * 0.12);
  REQUIRE(report.c_h_hat);
  CHECK(std::abs(*report.c_h_hat - 0.75) <= 0.02 * 0.75);
  CHECK(std::abs(report.c_v_hat - 0.9) <= 0.02 * 0.9);
  CHECK(report.warnings.empty());
  CHECK_THROWS_AS(ttplan::identify({}), ttplan::InsufficientData);
}
