#include "ttplan/strike_predictor.hpp"

#include "parallel.hpp"

#include <cmath>
#include <map>

namespace ttplan {

StrikePrediction predict_strike(const BallState& state, const PhysicsParams& params,
                                const TableGeometry& geometry, const IntegratorOptions& options) {
  if (!state.finite()) throw InvalidArgument("predict_strike: state must be finite");
  FlightSegment segment;
  try {
    segment = integrate(state, params, geometry, StopCondition::at_hit_plane(), options);
  } catch (const NonTermination&) {
    throw NoPlaneCrossing("predict_strike: ball does not reach the hit plane within the horizon");
  }
  if (segment.termination != Termination::ReachedPlane) {
    throw NoPlaneCrossing("predict_strike: flight ends with " +
                          std::string(to_string(segment.termination)) + " before the hit plane");
  }
  const auto& s = segment.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (crosses_net_region(s[i - 1].p, s[i].p, geometry)) {
      throw NoPlaneCrossing("predict_strike: ball hits the net");
    }
  }
  const BallState& at = segment.final_state();
  return {at.t, at.p, at.v, static_cast<int>(segment.bounces.size())};
}

StrikePrediction predict_strike(const StateEstimate& estimate, const PhysicsParams& params,
                                const TableGeometry& geometry, const IntegratorOptions& options) {
  return predict_strike(BallState{estimate.t, estimate.p_hat, estimate.v_hat}, params, geometry,
                        options);
}

const ErrorBin* PredictionErrorCurve::bin_at(double time_to_strike) const {
  const ErrorBin* best = nullptr;
  for (const auto& bin : bins) {
    if (!best || std::abs(bin.time_to_strike - time_to_strike) <
                     std::abs(best->time_to_strike - time_to_strike)) {
      best = &bin;
    }
  }
  return best;
}

std::optional<StrikeTruth> ground_truth_crossing(const TrajectoryRecord& record,
                                                 const TableGeometry& geometry) {
  const auto t = record.meta_number("truth_t_strike");
  const auto x = record.meta_number("truth_strike_x");
  const auto y = record.meta_number("truth_strike_y");
  const auto z = record.meta_number("truth_strike_z");
  if (t && x && y && z) return StrikeTruth{*t, Vec3(*x, *y, *z)};

  const auto& s = record.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double a = s[i - 1].p.x() - geometry.hit_plane_x;
    const double b = s[i].p.x() - geometry.hit_plane_x;
    if (a > 0.0 && b <= 0.0) {
      const double w = a / (a - b);
      return StrikeTruth{s[i - 1].t + w * (s[i].t - s[i - 1].t),
                         s[i - 1].p + w * (s[i].p - s[i - 1].p)};
    }
  }
  return std::nullopt;
}

namespace {

struct TrajectoryErrors {
  // bin index -> (position errors, time errors), in stream order
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> bins;
  std::size_t excluded = 0;
  bool used = false;
};

TrajectoryErrors replay(const TrajectoryRecord& record, const PhysicsParams& params,
                        const TableGeometry& geometry, const EvaluationConfig& config) {
  TrajectoryErrors out;
  const auto truth = ground_truth_crossing(record, geometry);
  if (!truth) return out;
  out.used = true;

  BallTracker tracker(config.estimator);
  for (const auto& sample : record.samples) {
    if (sample.t > truth->t) break;
    const auto estimate = tracker.push(sample.t, sample.p);
    if (!estimate) continue;
    const double tts = truth->t - estimate->t;
    const long bin = std::lround(tts / config.bin_width);
    try {
      const StrikePrediction pred = predict_strike(*estimate, params, geometry, config.integrator);
      auto& slot = out.bins[bin];
      slot.first.push_back((pred.p_strike - truth->p).norm());
      slot.second.push_back(std::abs(pred.t_strike - truth->t));
    } catch (const NoPlaneCrossing&) {
      ++out.excluded;
    }
  }
  return out;
}

void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  stddev = xs.size() > 1 ? std::sqrt(sq / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace

PredictionErrorCurve evaluate_prediction_errors(std::span<const TrajectoryRecord> trajectories,
                                                const PhysicsParams& params,
                                                const TableGeometry& geometry,
                                                const EvaluationConfig& config) {
  if (!(config.bin_width > 0.0)) throw InvalidArgument("evaluate: bin_width must be positive");
  std::vector<TrajectoryErrors> per(trajectories.size());
  detail::parallel_for(trajectories.size(), config.threads, [&](std::size_t i) {
    per[i] = replay(trajectories[i], params, geometry, config);
  });

  // Merge in record order so the sums are independent of thread count.
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> merged;
  PredictionErrorCurve curve;
  for (const auto& p : per) {
    if (p.used) ++curve.trajectory_count;
    curve.excluded_count += p.excluded;
    for (const auto& [bin, errors] : p.bins) {
      auto& slot = merged[bin];
      slot.first.insert(slot.first.end(), errors.first.begin(), errors.first.end());
      slot.second.insert(slot.second.end(), errors.second.begin(), errors.second.end());
    }
  }
  for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
    ErrorBin bin;
    // Rounded so centers print as the multiples they are.
    bin.time_to_strike = std::round(static_cast<double>(it->first) * config.bin_width * 1e9) / 1e9;
    bin.count = it->second.first.size();
    mean_std(it->second.first, bin.mean_position_error, bin.std_position_error);
    mean_std(it->second.second, bin.mean_time_error, bin.std_time_error);
    curve.bins.push_back(bin);
  }
  return curve;
}

}  // namespace ttplan
