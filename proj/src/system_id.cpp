#include "ttplan/system_id.hpp"

#include "ttplan/state_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ttplan {

std::vector<std::size_t> find_bounces(std::span<const PositionSample> samples, double band) {
  std::vector<std::size_t> turning;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    if (detect_bounce(samples.subspan(i - 1, 3), band)) {
      if (!turning.empty() && i - turning.back() <= 2) continue;
      turning.push_back(i);
    }
  }
  return turning;
}

std::vector<std::vector<PositionSample>> flight_arcs(const TrajectoryRecord& record,
                                                     const SystemIdConfig& config) {
  const auto& s = record.samples;
  std::vector<std::vector<PositionSample>> arcs;
  std::size_t begin = 0;
  for (std::size_t turn : find_bounces(s, config.bounce_band)) {
    const std::size_t end = turn >= config.bounce_guard ? turn - config.bounce_guard : 0;
    if (end > begin) arcs.emplace_back(s.begin() + begin, s.begin() + end);
    begin = std::min(s.size(), turn + 1 + config.bounce_guard);
  }
  if (begin < s.size()) arcs.emplace_back(s.begin() + begin, s.end());
  return arcs;
}

DragFit fit_drag(std::span<const TrajectoryRecord> trajectories, const SystemIdConfig& config) {
  if (config.window < 3) throw InvalidArgument("fit_drag: window must be at least 3");
  const std::size_t half = config.window / 2;

  std::vector<double> observed;
  std::vector<Vec3> velocity;
  for (const auto& record : trajectories) {
    for (const auto& arc : flight_arcs(record, config)) {
      if (arc.size() < config.window) continue;
      const std::span<const PositionSample> all(arc);
      for (std::size_t c = half; c + (config.window - half) <= arc.size(); ++c) {
        const StateEstimate e = fit_quadratic(all.subspan(c - half, config.window), arc[c].t);
        const Vec3 drag = e.a_hat - config.g;
        const double speed = e.v_hat.norm();
        double value = drag.norm();
        if (config.drag_observable == DragObservable::Projected) {
          if (speed <= 0.0) continue;
          value = -drag.dot(e.v_hat) / speed;
        }
        observed.push_back(value);
        velocity.push_back(e.v_hat);
      }
    }
  }
  if (observed.empty()) {
    throw InsufficientData("fit_drag: no bounce-free arc with at least " +
                           std::to_string(config.window) + " samples");
  }

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double v2 = velocity[i].squaredNorm();
    num += observed[i] * v2;
    den += v2 * v2;
  }
  if (!(den > 0.0)) throw InsufficientData("fit_drag: ball never moves");

  DragFit fit;
  fit.k_hat = num / den;
  fit.sample_count = observed.size();
  double sq = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double r = observed[i] - drag_magnitude(fit.k_hat, velocity[i]);
    sq += r * r;
  }
  fit.residual_rms = std::sqrt(sq / static_cast<double>(observed.size()));
  return fit;
}

RestitutionFit fit_restitution_pairs(std::span<const BouncePair> pairs) {
  if (pairs.empty()) throw NoBounceFound("fit_restitution: no bounce pairs");
  double num_v = 0.0, den_v = 0.0, num_h = 0.0, den_h = 0.0;
  for (const auto& b : pairs) {
    num_v += std::abs(b.v_plus.z()) * std::abs(b.v_minus.z());
    den_v += b.v_minus.z() * b.v_minus.z();
    for (int axis = 0; axis < 2; ++axis) {
      num_h += std::abs(b.v_plus[axis]) * std::abs(b.v_minus[axis]);
      den_h += b.v_minus[axis] * b.v_minus[axis];
    }
  }
  if (!(den_v > 0.0)) throw InsufficientData("fit_restitution: no vertical impact velocity");

  RestitutionFit fit;
  fit.bounce_count = pairs.size();
  fit.c_v_hat = num_v / den_v;
  constexpr double kMinHorizontal = 1e-12;
  if (den_h > kMinHorizontal) fit.c_h_hat = num_h / den_h;

  double sq_v = 0.0, sq_h = 0.0;
  std::size_t n_h = 0;
  for (const auto& b : pairs) {
    const double rv = std::abs(b.v_plus.z()) - fit.c_v_hat * std::abs(b.v_minus.z());
    sq_v += rv * rv;
    if (fit.c_h_hat) {
      for (int axis = 0; axis < 2; ++axis) {
        const double rh = std::abs(b.v_plus[axis]) - *fit.c_h_hat * std::abs(b.v_minus[axis]);
        sq_h += rh * rh;
        ++n_h;
      }
    }
  }
  fit.residual_v = std::sqrt(sq_v / static_cast<double>(pairs.size()));
  fit.residual_h = n_h > 0 ? std::sqrt(sq_h / static_cast<double>(n_h)) : 0.0;
  return fit;
}

namespace {

// Real roots of p + v*tau + a/2*tau^2 = 0.
std::vector<double> quadratic_roots(double p, double v, double a) {
  const double qa = 0.5 * a;
  if (std::abs(qa) < 1e-12) {
    if (v == 0.0) return {};
    return {-p / v};
  }
  const double disc = v * v - 4.0 * qa * p;
  if (disc < 0.0) return {};
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (v + std::copysign(sq, v));
  std::vector<double> roots;
  if (q != 0.0) roots.push_back(q / qa);
  roots.push_back(q != 0.0 ? p / q : -v / (2.0 * qa));
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

BouncePair estimate_bounce_pair(const TrajectoryRecord& record, const SystemIdConfig& config) {
  const auto& s = record.samples;
  const auto turns = find_bounces(s, config.bounce_band);
  if (turns.empty()) throw NoBounceFound("fit_restitution: no bounce in record '" + record.id + "'");
  if (turns.size() > 1) {
    throw MultipleBounces("fit_restitution: " + std::to_string(turns.size()) +
                          " bounces in record '" + record.id + "'");
  }
  const std::size_t turn = turns.front();
  const std::size_t pre_end = turn >= config.bounce_guard ? turn - config.bounce_guard : 0;
  const std::size_t post_begin = turn + 1 + config.bounce_guard;
  constexpr std::size_t kMinSide = 7;
  if (pre_end < kMinSide || post_begin + kMinSide > s.size()) {
    throw InsufficientData("fit_restitution: too few samples around the bounce in '" + record.id + "'");
  }
  const std::size_t pre_begin = pre_end > config.window ? pre_end - config.window : 0;
  const std::size_t post_end = std::min(s.size(), post_begin + config.window);
  const std::span<const PositionSample> all(s);
  const auto pre = all.subspan(pre_begin, pre_end - pre_begin);
  const auto post = all.subspan(post_begin, post_end - post_begin);

  // Impact time from the zero crossings of both vertical fits.
  const StateEstimate pre_fit = fit_quadratic(pre, pre.back().t);
  const StateEstimate post_fit = fit_quadratic(post, post.front().t);
  std::optional<double> t_pre, t_post;
  for (double r : quadratic_roots(pre_fit.p_hat.z(), pre_fit.v_hat.z(), pre_fit.a_hat.z())) {
    if (r >= 0.0 && !t_pre) t_pre = pre_fit.t + r;
  }
  for (double r : quadratic_roots(post_fit.p_hat.z(), post_fit.v_hat.z(), post_fit.a_hat.z())) {
    if (r <= 0.0) t_post = post_fit.t + r;
  }
  double t_impact = 0.5 * (pre.back().t + post.front().t);
  if (t_pre && t_post) {
    t_impact = 0.5 * (*t_pre + *t_post);
  } else if (t_pre) {
    t_impact = *t_pre;
  } else if (t_post) {
    t_impact = *t_post;
  }
  t_impact = std::clamp(t_impact, pre.back().t, post.front().t);

  return {fit_quadratic(pre, t_impact).v_hat, fit_quadratic(post, t_impact).v_hat};
}

RestitutionFit fit_restitution(std::span<const TrajectoryRecord> trajectories,
                               const SystemIdConfig& config) {
  std::vector<BouncePair> pairs;
  pairs.reserve(trajectories.size());
  for (const auto& record : trajectories) pairs.push_back(estimate_bounce_pair(record, config));
  return fit_restitution_pairs(pairs);
}

double fit_racket_restitution(std::span<const RacketImpactRecord> impacts) {
  double num = 0.0, den = 0.0;
  for (const auto& r : impacts) {
    const Vec3 n = r.normal.normalized();
    const double approach = (r.v_in - r.v_racket).dot(n);
    const double separation = (r.v_out - r.v_racket).dot(n);
    num += -separation * approach;
    den += approach * approach;
  }
  if (!(den > 0.0)) throw InsufficientData("fit_racket_restitution: no approaching impacts");
  return num / den;
}

FitReport identify(std::span<const TrajectoryRecord> trajectories, const SystemIdConfig& config) {
  if (trajectories.empty()) throw InsufficientData("identify: no trajectories");
  const DragFit drag = fit_drag(trajectories, config);
  const RestitutionFit restitution = fit_restitution(trajectories, config);

  FitReport report;
  report.k_hat = drag.k_hat;
  report.c_h_hat = restitution.c_h_hat;
  report.c_v_hat = restitution.c_v_hat;
  report.residual_drag = drag.residual_rms;
  report.residual_h = restitution.residual_h;
  report.residual_v = restitution.residual_v;
  report.trajectory_count = trajectories.size();
  report.sample_count = drag.sample_count;

  auto warn = [&](const std::string& what, double value) {
    std::ostringstream os;
    os << what << " = " << value << " outside (0, 1]";
    report.warnings.push_back(os.str());
  };
  if (report.k_hat < 0.0) {
    report.warnings.push_back("k_hat negative; clamped to 0");
    report.k_hat = 0.0;
  }
  if (!report.c_h_hat) {
    report.warnings.push_back("c_h undefined: no horizontal velocity at the bounces");
  } else if (!(*report.c_h_hat > 0.0 && *report.c_h_hat <= 1.0)) {
    warn("c_h_hat", *report.c_h_hat);
  }
  if (!(report.c_v_hat > 0.0 && report.c_v_hat <= 1.0)) warn("c_v_hat", report.c_v_hat);
  return report;
}

}  // namespace ttplan
