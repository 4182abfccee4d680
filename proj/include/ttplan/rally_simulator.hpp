#pragma once

#include "ttplan/dynamics.hpp"
#include "ttplan/geometry.hpp"
#include "ttplan/random.hpp"
#include "ttplan/state_estimator.hpp"
#include "ttplan/strike_planner.hpp"
#include "ttplan/strike_predictor.hpp"
#include "ttplan/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ttplan {

// ---------------------------------------------------------------------------
// Robot proxy
// ---------------------------------------------------------------------------

/// Piecewise-linear map from base displacement [m] to the time needed to
/// reach it [s], extrapolated linearly past the last anchor.
struct ReachCurve {
  /// (distance, time) pairs with strictly increasing distance.
  std::vector<Vec2> anchors{Vec2(0.0, 0.0), Vec2(0.75, 0.8)};

  double reach_time(double distance) const;
  /// Largest displacement reachable within `time`.
  double reachable_distance(double time) const;
  void validate() const;
};

/// Stand-in for the whole-body controller: reach-time limits plus Gaussian
/// execution errors on the racket state at the strike.
struct ExecutorConfig {
  ReachCurve reach_curve{};
  /// Max distance from the reach center (base xy at reach_center_height) to
  /// the racket center.
  double max_reach_radius = 0.8;
  double reach_center_height = 0.4;
  double swing_duration = 0.86;
  double position_error_sigma = 0.005;
  double velocity_error_sigma = 0.05;
  double timing_jitter_sigma = 0.001;
  double racket_radius = 0.075;
  /// Admissible distance of the ball from the racket plane at contact.
  double thickness_band = 0.02;

  void validate() const;
  /// Default limits with every error sigma at zero.
  static ExecutorConfig perfect();
};

enum class FailureMode { None, Miss, NetHit, OffTable, TooLate, OutOfReach };

std::string_view to_string(FailureMode f);

struct RacketState {
  double t{0};
  Vec3 p{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Vec3 n{Vec3::UnitX()};
};

struct BaseState {
  Vec2 p_xy{-1.77, 0.0};
  /// When the robot started moving toward this command's base target.
  double t_command{0};
};

struct ExecutionResult {
  FailureMode failure{FailureMode::None};
  std::optional<RacketState> racket;
  Vec2 base_reached{Vec2::Zero()};
};

/// TooLate when the base cannot cover the displacement within
/// min(t_strike - t_command, swing_duration); OutOfReach when the strike
/// point is too far from the reached base; otherwise the commanded racket
/// state plus execution noise.
ExecutionResult execute_strike(const StrikeCommand& command, const ExecutorConfig& executor,
                               const BaseState& base, Rng& rng);

struct Contact {
  bool hit{false};
  double in_plane_offset{0};
  double normal_offset{0};
};

/// Ball-racket overlap at the racket's strike time.
Contact resolve_contact(const BallState& ball, const RacketState& racket, double racket_radius,
                        double thickness_band = 0.02);

Contact resolve_contact(const FlightSegment& segment, const RacketState& racket,
                        double racket_radius, double thickness_band = 0.02);

// ---------------------------------------------------------------------------
// Launcher
// ---------------------------------------------------------------------------

/// Distribution of incoming balls: origin on the opponent side, flight time
/// to the hit plane, and a target rectangle on the plane. Zero widths give
/// a deterministic launch.
struct LaunchSpec {
  Vec3 origin{1.8, 0.0, 0.3};
  Vec3 origin_sigma{Vec3::Zero()};
  /// Preferred flight time to the plane.
  double flight_time = 0.9;
  double flight_time_sigma = 0.0;
  /// When false, targets unreachable in flight_time use the nearest
  /// feasible flight time instead.
  bool exact_flight_time = false;
  double target_y_lo = 0.0;
  double target_y_hi = 0.0;
  double target_z_lo = 0.3;
  double target_z_hi = 0.3;

  void validate() const;
  bool deterministic() const;
};

/// Initial state at `origin` whose flight bounces once on the robot half and
/// crosses the hit plane at (y, z) after `flight_time`. Drag-free one-bounce
/// ballistics give the starting guess; Newton iterations on the full model
/// finish the job. Throws InvalidSpec when no such launch exists.
BallState solve_launch(const Vec3& origin, double target_y, double target_z, double flight_time,
                       const PhysicsParams& params, const TableGeometry& geometry,
                       const IntegratorOptions& options = {});

/// Flight time nearest to `preferred`, on a 0.05 s lattice within
/// [0.2, 3] s, for which solve_launch succeeds.
double nearest_feasible_flight_time(double preferred, const Vec3& origin, double target_y,
                                    double target_z, const PhysicsParams& params,
                                    const TableGeometry& geometry,
                                    const IntegratorOptions& options = {});

BallState launch_ball(const LaunchSpec& spec, const PhysicsParams& params,
                      const TableGeometry& geometry, Rng& rng,
                      const IntegratorOptions& options = {});

/// Measured stream of one launched ball up to the hit plane: grid samples
/// at the integrator step plus isotropic Gaussian noise. The true plane
/// crossing is stored in the metadata (truth_t_strike, truth_strike_x/y/z).
TrajectoryRecord synthesize_trajectory(const std::string& id, const LaunchSpec& spec,
                                       const PhysicsParams& params, const TableGeometry& geometry,
                                       double noise, Rng& rng,
                                       const IntegratorOptions& options = {});

/// `count` records named "traj-000", ... with per-record random streams.
std::vector<TrajectoryRecord> synthesize_trajectories(std::size_t count, const LaunchSpec& spec,
                                                      const PhysicsParams& params,
                                                      const TableGeometry& geometry, double noise,
                                                      std::uint64_t seed,
                                                      const IntegratorOptions& options = {});

// ---------------------------------------------------------------------------
// Closed loop
// ---------------------------------------------------------------------------

struct ShotOutcome {
  bool hit{false};
  bool returned{false};
  std::optional<Vec3> landing_point;
  FailureMode failure_mode{FailureMode::None};
};

struct RallyOutcome {
  std::size_t shot_count{0};
  std::vector<ShotOutcome> shots;
  FailureMode terminal_failure{FailureMode::None};
  std::uint64_t seed{0};
};

/// One robot: what it believes, how it perceives, how it moves.
struct SideConfig {
  PhysicsParams model{};
  PlannerConfig planner{};
  EstimatorConfig estimator{};
  ExecutorConfig executor{};
  /// Isotropic Gaussian noise on measured positions [m].
  double measurement_noise = 0.0;
  /// The command freezes once the predicted strike is this close [s].
  double lock_time = 0.5;
  BasePose home{};
};

/// The world.
struct SimulationConfig {
  PhysicsParams truth{};
  TableGeometry geometry{};
  IntegratorOptions integrator{};
};

struct ShotResult {
  ShotOutcome outcome;
  /// Ball state right after racket contact, in the hitter's frame.
  std::optional<BallState> outgoing;
  std::optional<StrikeCommand> command;
  BasePose base_after;
};

/// Plays one incoming ball: 360 Hz measurements through the tracker,
/// re-planning on every estimate until the lock time, execution, contact,
/// and scoring of the return flight.
ShotResult run_shot(const BallState& incoming, const SimulationConfig& sim, const SideConfig& side,
                    const BasePose& base, Rng& rng);

struct GridCell {
  double y_lo{0}, y_hi{0}, z_lo{0}, z_hi{0};
};

/// Square cells over the hit plane. The default 7 x 4 layout minus its two
/// upper corners gives 26 cells.
struct GridSpec {
  double y_lo = -0.7;
  double y_hi = 0.7;
  double z_lo = 0.2;
  double z_hi = 1.0;
  double cell = 0.2;
  bool drop_top_corners = true;

  std::vector<GridCell> cells() const;
};

struct CellReport {
  GridCell cell;
  std::size_t trials{0};
  std::size_t hits{0};
  std::size_t returns{0};
};

struct GridReport {
  std::vector<CellReport> cells;
  std::size_t trials{0};
  std::size_t hits{0};
  std::size_t returns{0};

  double hit_rate() const { return trials ? static_cast<double>(hits) / trials : 0.0; }
  double return_rate() const { return trials ? static_cast<double>(returns) / trials : 0.0; }
};

/// Trials launch toward a uniform point of their cell; each trial owns a
/// random stream derived from (seed, cell, trial), so results do not depend
/// on `threads`.
GridReport run_grid(const GridSpec& grid, const SimulationConfig& sim, const SideConfig& side,
                    const LaunchSpec& launch, std::size_t trials_per_cell, std::uint64_t seed,
                    std::size_t threads = 1);

/// Alternating exchange between two sides after a launcher serve to side A.
/// Each hand-over mirrors the ball into the receiver's frame. Ends at the
/// first failed return or after max_shots returns.
RallyOutcome run_rally(const SimulationConfig& sim, const SideConfig& side_a,
                       const SideConfig& side_b, const LaunchSpec& serve, std::uint64_t seed,
                       std::size_t max_shots);

}  // namespace ttplan
