#pragma once

#include "ttplan/trajectory.hpp"
#include "ttplan/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ttplan {

/// Which scalar is regressed on k |v|^2.
enum class DragObservable {
  /// |a - g|, literally. Biased upward by measurement noise.
  Magnitude,
  /// -(a - g) . v/|v|. Equal to |a - g| under the drag model and linear in
  /// the acceleration estimate, so noise averages out.
  Projected,
};

struct SystemIdConfig {
  /// Samples per sliding quadratic fit.
  std::size_t window = 31;
  /// Samples skipped on each side of a detected bounce.
  std::size_t bounce_guard = 3;
  double bounce_band = 0.02;
  Vec3 g{0.0, 0.0, -9.81};
  DragObservable drag_observable = DragObservable::Projected;
};

struct DragFit {
  double k_hat{0};
  double residual_rms{0};
  std::size_t sample_count{0};
};

struct BouncePair {
  Vec3 v_minus{Vec3::Zero()};
  Vec3 v_plus{Vec3::Zero()};
};

struct RestitutionFit {
  /// Empty when the data carries no horizontal motion.
  std::optional<double> c_h_hat;
  double c_v_hat{0};
  double residual_h{0};
  double residual_v{0};
  std::size_t bounce_count{0};
};

/// One racket contact observed with known racket state.
struct RacketImpactRecord {
  Vec3 v_in{Vec3::Zero()};
  Vec3 v_racket{Vec3::Zero()};
  Vec3 normal{Vec3::UnitX()};
  Vec3 v_out{Vec3::Zero()};
};

struct FitReport {
  double k_hat{0};
  std::optional<double> c_h_hat;
  double c_v_hat{0};
  double residual_drag{0};
  double residual_h{0};
  double residual_v{0};
  std::size_t trajectory_count{0};
  std::size_t sample_count{0};
  std::vector<std::string> warnings;
};

/// Indices of the turning samples of every bounce found in the stream.
std::vector<std::size_t> find_bounces(std::span<const PositionSample> samples, double band);

/// Bounce-free arcs of a record, with bounce_guard samples trimmed on each
/// side of every bounce.
std::vector<std::vector<PositionSample>> flight_arcs(const TrajectoryRecord& record,
                                                     const SystemIdConfig& config = {});

/// Drag magnitude predicted by the model at speed |v|.
inline double drag_magnitude(double k, const Vec3& v) { return k * v.squaredNorm(); }

/// Closed-form least squares through the origin of the drag observable on
/// |v|^2 over the interior of every arc long enough for one window.
DragFit fit_drag(std::span<const TrajectoryRecord> trajectories, const SystemIdConfig& config = {});

/// Ratio fits C_v = sum |vz+||vz-| / sum vz-^2 and the pooled horizontal
/// analogue.
RestitutionFit fit_restitution_pairs(std::span<const BouncePair> pairs);

/// Pre/post-impact velocities of the single bounce in a record, both
/// evaluated at the estimated impact time.
BouncePair estimate_bounce_pair(const TrajectoryRecord& record, const SystemIdConfig& config = {});

/// Each record must contain exactly one bounce.
RestitutionFit fit_restitution(std::span<const TrajectoryRecord> trajectories,
                               const SystemIdConfig& config = {});

/// C_r from the normal relative velocities of observed racket contacts.
double fit_racket_restitution(std::span<const RacketImpactRecord> impacts);

/// Runs both fits and collects soft sanity warnings.
FitReport identify(std::span<const TrajectoryRecord> trajectories, const SystemIdConfig& config = {});

}  // namespace ttplan
