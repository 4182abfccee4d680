#pragma once

#include "ttplan/types.hpp"

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace ttplan {

struct EstimatorConfig {
  std::size_t capacity = 31;
  std::size_t min_fit_count = 7;
  /// Raw z band around the table surface in which bounces are looked for [m].
  double bounce_band = 0.02;

  void validate() const;
};

/// Smoothed ball state from a quadratic fit of the buffered positions.
struct StateEstimate {
  double t{0};
  Vec3 p_hat{Vec3::Zero()};
  Vec3 v_hat{Vec3::Zero()};
  Vec3 a_hat{Vec3::Zero()};
  std::size_t sample_count{0};
  /// Timestamp of the oldest sample that entered the fit.
  double t_first{0};
};

/// Independent least-squares quadratic per axis over `samples`, evaluated
/// (value and derivatives) at `t_eval`. Needs at least three samples with
/// distinct timestamps.
StateEstimate fit_quadratic(std::span<const PositionSample> samples, double t_eval);

/// Bounded FIFO of position measurements with a sliding quadratic fit.
/// Single writer; not synchronized.
class EstimatorWindow {
 public:
  explicit EstimatorWindow(EstimatorConfig config = {});

  /// Appends a sample (evicting the oldest past capacity) and returns the
  /// fit at the newest timestamp once min_fit_count samples are buffered.
  std::optional<StateEstimate> push_sample(double t, const Vec3& p);

  /// Drops every buffered sample.
  void notify_bounce();

  std::size_t size() const { return buffer_.size(); }
  const std::deque<PositionSample>& buffer() const { return buffer_; }
  const EstimatorConfig& config() const { return config_; }

 private:
  EstimatorConfig config_;
  std::deque<PositionSample> buffer_;
  std::vector<PositionSample> scratch_;
  std::optional<double> last_t_;
};

/// Looks for a table bounce at the end of a raw stream: a local minimum of
/// z inside the band with descending finite differences before it and
/// ascending after it. With only two samples the descending evidence comes
/// from the previous estimate's vertical velocity.
bool detect_bounce(std::span<const PositionSample> recent, double band,
                   const std::optional<StateEstimate>& prev_estimate = std::nullopt);

/// EstimatorWindow plus bounce detection. Clears the window when a bounce
/// is seen and withholds estimates while the newest sample is descending
/// inside the bounce band, where it might already be post-impact; no
/// emitted estimate therefore mixes pre- and post-bounce samples.
class BallTracker {
 public:
  explicit BallTracker(EstimatorConfig config = {});

  std::optional<StateEstimate> push(double t, const Vec3& p);

  std::size_t bounces_detected() const { return bounces_; }
  const EstimatorWindow& window() const { return window_; }

 private:
  EstimatorWindow window_;
  std::deque<PositionSample> recent_;
  std::optional<StateEstimate> last_estimate_;
  std::size_t bounces_{0};
};

}  // namespace ttplan
