#include "ttplan/state_estimator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace ttplan {

void EstimatorConfig::validate() const {
  if (capacity < 3) throw InvariantViolation("estimator: capacity must be at least 3");
  if (min_fit_count < 3 || min_fit_count > capacity) {
    throw InvariantViolation("estimator: min_fit_count must lie in [3, capacity]");
  }
  if (!(bounce_band > 0.0)) throw InvariantViolation("estimator: bounce_band must be positive");
}

StateEstimate fit_quadratic(std::span<const PositionSample> samples, double t_eval) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 3) throw InsufficientData("fit_quadratic: need at least 3 samples");

  // Normalized abscissa keeps the Vandermonde columns on comparable scales.
  double span = 0.0;
  for (const auto& s : samples) span = std::max(span, std::abs(s.t - t_eval));
  if (!(span > 0.0)) throw InsufficientData("fit_quadratic: samples share one timestamp");

  Eigen::MatrixXd vandermonde(n, 3);
  Eigen::MatrixXd positions(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = (samples[i].t - t_eval) / span;
    vandermonde(i, 0) = 1.0;
    vandermonde(i, 1) = tau;
    vandermonde(i, 2) = tau * tau;
    positions.row(i) = samples[i].p.transpose();
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(vandermonde);
  StateEstimate est;
  est.t = t_eval;
  est.sample_count = samples.size();
  est.t_first = samples.front().t;
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::Vector3d c = qr.solve(positions.col(axis));
    est.p_hat[axis] = c[0];
    est.v_hat[axis] = c[1] / span;
    est.a_hat[axis] = 2.0 * c[2] / (span * span);
  }
  return est;
}

EstimatorWindow::EstimatorWindow(EstimatorConfig config) : config_(config) {
  config_.validate();
  scratch_.reserve(config_.capacity);
}

std::optional<StateEstimate> EstimatorWindow::push_sample(double t, const Vec3& p) {
  if (last_t_ && !(t > *last_t_)) {
    throw NonMonotonicTimestamp("push_sample: t=" + std::to_string(t) +
                                " does not follow " + std::to_string(*last_t_));
  }
  last_t_ = t;
  buffer_.push_back({t, p});
  while (buffer_.size() > config_.capacity) buffer_.pop_front();
  if (buffer_.size() < config_.min_fit_count) return std::nullopt;

  scratch_.assign(buffer_.begin(), buffer_.end());
  return fit_quadratic(scratch_, t);
}

void EstimatorWindow::notify_bounce() { buffer_.clear(); }

bool detect_bounce(std::span<const PositionSample> recent, double band,
                   const std::optional<StateEstimate>& prev_estimate) {
  const std::size_t n = recent.size();
  if (n < 2) return false;
  const double z_turn = recent[n - 2].p.z();
  const double z_new = recent[n - 1].p.z();
  if (!(std::abs(z_turn) < band)) return false;
  if (!(z_new > z_turn)) return false;
  if (n >= 3) return z_turn < recent[n - 3].p.z();
  return prev_estimate && prev_estimate->v_hat.z() < 0.0;
}

BallTracker::BallTracker(EstimatorConfig config) : window_(config) {}

std::optional<StateEstimate> BallTracker::push(double t, const Vec3& p) {
  recent_.push_back({t, p});
  while (recent_.size() > 3) recent_.pop_front();

  const std::vector<PositionSample> recent(recent_.begin(), recent_.end());
  if (detect_bounce(recent, window_.config().bounce_band, last_estimate_)) {
    ++bounces_;
    window_.notify_bounce();
    last_estimate_.reset();
    window_.push_sample(t, p);
    return std::nullopt;
  }

  auto estimate = window_.push_sample(t, p);
  const bool maybe_post_impact = recent.size() >= 2 &&
                                 std::abs(p.z()) < window_.config().bounce_band &&
                                 p.z() < recent[recent.size() - 2].p.z();
  if (maybe_post_impact) return std::nullopt;
  if (estimate) last_estimate_ = estimate;
  return estimate;
}

}  // namespace ttplan
