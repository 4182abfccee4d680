#pragma once

#include "ttplan/dynamics.hpp"
#include "ttplan/geometry.hpp"
#include "ttplan/state_estimator.hpp"
#include "ttplan/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ttplan {

/// Predicted crossing of the virtual hit plane.
struct StrikePrediction {
  double t_strike{0};
  Vec3 p_strike{Vec3::Zero()};
  Vec3 v_incoming{Vec3::Zero()};
  int bounce_count{0};

  /// Legal incoming shots bounce exactly once before the plane.
  bool flagged() const { return bounce_count > 1; }
};

/// Integrates the hybrid model from `state` until it crosses the hit plane
/// moving toward the robot. Throws NoPlaneCrossing when the ball reaches the
/// floor, hits the net, or rests first.
StrikePrediction predict_strike(const BallState& state, const PhysicsParams& params,
                                const TableGeometry& geometry,
                                const IntegratorOptions& options = {});

StrikePrediction predict_strike(const StateEstimate& estimate, const PhysicsParams& params,
                                const TableGeometry& geometry,
                                const IntegratorOptions& options = {});

struct ErrorBin {
  double time_to_strike{0};
  double mean_position_error{0};
  double std_position_error{0};
  double mean_time_error{0};
  double std_time_error{0};
  std::size_t count{0};
};

/// Prediction error against time-to-strike, ordered by decreasing horizon.
struct PredictionErrorCurve {
  std::vector<ErrorBin> bins;
  std::size_t trajectory_count{0};
  /// Estimates for which no plane crossing was predicted.
  std::size_t excluded_count{0};

  /// Bin whose center is nearest to `time_to_strike`, if populated.
  const ErrorBin* bin_at(double time_to_strike) const;
};

struct EvaluationConfig {
  double bin_width = 0.05;
  EstimatorConfig estimator{};
  IntegratorOptions integrator{};
  std::size_t threads = 1;
};

struct StrikeTruth {
  double t{0};
  Vec3 p{Vec3::Zero()};
};

/// Reference plane crossing of a record: the generator's truth stored in
/// the metadata when present, otherwise the raw stream linearly
/// interpolated at the plane.
std::optional<StrikeTruth> ground_truth_crossing(const TrajectoryRecord& record,
                                                 const TableGeometry& geometry);

/// Replays each record through a BallTracker, predicts on every estimate,
/// and bins position and time errors by time-to-strike (bin centers at
/// multiples of bin_width).
PredictionErrorCurve evaluate_prediction_errors(std::span<const TrajectoryRecord> trajectories,
                                                const PhysicsParams& params,
                                                const TableGeometry& geometry,
                                                const EvaluationConfig& config = {});

}  // namespace ttplan
