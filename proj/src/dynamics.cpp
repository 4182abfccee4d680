#include "ttplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace ttplan {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTime: return "ReachedTime";
    case Termination::ReachedPlane: return "ReachedPlane";
    case Termination::HitFloor: return "HitFloor";
    case Termination::LeftTable: return "LeftTable";
    case Termination::Landed: return "Landed";
    case Termination::Resting: return "Resting";
  }
  return "Unknown";
}

BallState rk4_step(const BallState& s, double h, const PhysicsParams& params) {
  const Vec3 k1p = s.v;
  const Vec3 k1v = flight_acceleration(s.v, params);
  const Vec3 k2p = s.v + 0.5 * h * k1v;
  const Vec3 k2v = flight_acceleration(k2p, params);
  const Vec3 k3p = s.v + 0.5 * h * k2v;
  const Vec3 k3v = flight_acceleration(k3p, params);
  const Vec3 k4p = s.v + h * k3v;
  const Vec3 k4v = flight_acceleration(k4p, params);

  BallState out;
  out.t = s.t + h;
  out.p = s.p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  out.v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  return out;
}

namespace {

enum class EventKind { Surface, Floor, Plane };

// Signed event coordinate; an event fires when it changes from >= 0 to < 0
// (Plane: from > 0 to <= 0).
double event_value(EventKind kind, const BallState& s, const TableGeometry& geometry) {
  switch (kind) {
    case EventKind::Surface: return s.p.z();
    case EventKind::Floor: return s.p.z() - geometry.floor_z();
    case EventKind::Plane: return s.p.x() - geometry.hit_plane_x;
  }
  return 0.0;
}

bool is_past(EventKind kind, const BallState& s, const TableGeometry& geometry) {
  const double value = event_value(kind, s, geometry);
  return kind == EventKind::Plane ? value <= 0.0 : value < 0.0;
}

bool fires(EventKind kind, const BallState& from, const BallState& to, const TableGeometry& geometry) {
  return !is_past(kind, from, geometry) && is_past(kind, to, geometry);
}

struct Crossing {
  EventKind kind;
  double tau;
  BallState state;
};

Crossing localize(EventKind kind, const BallState& start, double dt, const PhysicsParams& params,
                  const TableGeometry& geometry, double tolerance) {
  double lo = 0.0;
  double hi = dt;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (is_past(kind, rk4_step(start, mid, params), geometry)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  BallState s = rk4_step(start, hi, params);
  s.t = start.t + hi;
  return {kind, hi, s};
}

}  // namespace

FlightSegment integrate(const BallState& initial, const PhysicsParams& params,
                        const TableGeometry& geometry, const StopCondition& stop,
                        const IntegratorOptions& options) {
  if (!(options.step > 0.0)) throw InvalidArgument("integrate: step must be positive");
  if (!initial.finite()) throw InvalidArgument("integrate: initial state must be finite");
  if (initial.p.z() < geometry.floor_z()) throw InvalidArgument("integrate: initial state below the floor");
  if (stop.kind == StopCondition::Kind::Time && !(stop.duration >= 0.0)) {
    throw InvalidArgument("integrate: duration must be non-negative");
  }

  const double h = options.step;
  const double t0 = initial.t;
  const double t_end = stop.kind == StopCondition::Kind::Time
                           ? t0 + stop.duration
                           : std::numeric_limits<double>::infinity();

  FlightSegment segment;
  segment.samples.push_back(initial);
  auto finish = [&](const BallState& s, Termination why) {
    if (s.t > segment.samples.back().t) {
      segment.samples.push_back(s);
    } else {
      segment.samples.back() = s;
    }
    segment.termination = why;
    return segment;
  };

  if (stop.kind == StopCondition::Kind::Time && stop.duration == 0.0) {
    return finish(initial, Termination::ReachedTime);
  }

  BallState cur = initial;
  for (long i = 0;; ++i) {
    const double t_grid = t0 + static_cast<double>(i + 1) * h;
    const double t_target = std::min(t_grid, t_end);
    if (t_target - t0 > options.horizon) {
      throw NonTermination("integrate: no stop condition met within the horizon");
    }

    while (cur.t < t_target) {
      BallState next = rk4_step(cur, t_target - cur.t, params);
      next.t = t_target;

      std::optional<Crossing> first;
      for (EventKind kind : {EventKind::Surface, EventKind::Floor, EventKind::Plane}) {
        if (kind == EventKind::Plane && stop.kind != StopCondition::Kind::HitPlane) continue;
        if (!fires(kind, cur, next, geometry)) continue;
        Crossing c = localize(kind, cur, t_target - cur.t, params, geometry, options.event_tolerance);
        if (!first || c.tau < first->tau) first = c;
      }
      if (!first) {
        cur = next;
        break;
      }

      BallState at = first->state;
      switch (first->kind) {
        case EventKind::Plane:
          at.p.x() = geometry.hit_plane_x;
          return finish(at, Termination::ReachedPlane);
        case EventKind::Floor:
          at.p.z() = geometry.floor_z();
          return finish(at, Termination::HitFloor);
        case EventKind::Surface: {
          const bool on_table = on_table_footprint(at.p, geometry);
          if (!on_table) {
            if (stop.kind == StopCondition::Kind::Landing) return finish(at, Termination::LeftTable);
            // Keep the slightly negative z so the surface event does not refire.
            cur = at;
            continue;
          }
          at.p.z() = 0.0;
          BounceEvent event{at.t, at.p, at.v, bounce_map(at.v, params)};
          segment.bounces.push_back(event);
          if (stop.kind == StopCondition::Kind::Landing) return finish(at, Termination::Landed);
          at.v = event.v_plus;
          if (at.v.z() < options.resting_speed) return finish(at, Termination::Resting);
          cur = at;
          continue;
        }
      }
    }

    if (cur.t >= t_end) return finish(cur, Termination::ReachedTime);
    segment.samples.push_back(cur);
  }
}

BallState propagate(const BallState& initial, double duration, const PhysicsParams& params,
                    const TableGeometry& geometry, const IntegratorOptions& options) {
  return integrate(initial, params, geometry, StopCondition::after(duration), options).final_state();
}

namespace {

BallState hermite(const BallState& a, const BallState& b, double t) {
  const double dt = b.t - a.t;
  if (dt <= 0.0) return a;
  const double s = (t - a.t) / dt;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double d00 = (6 * s2 - 6 * s) / dt;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = (-6 * s2 + 6 * s) / dt;
  const double d11 = 3 * s2 - 2 * s;

  BallState out;
  out.t = t;
  out.p = h00 * a.p + h10 * dt * a.v + h01 * b.p + h11 * dt * b.v;
  out.v = d00 * a.p + d10 * a.v + d01 * b.p + d11 * b.v;
  return out;
}

}  // namespace

BallState state_at(const FlightSegment& segment, double t) {
  const auto& samples = segment.samples;
  if (samples.empty() || t < samples.front().t || t > samples.back().t) {
    throw InvalidArgument("state_at: time outside the segment");
  }
  auto upper = std::upper_bound(samples.begin(), samples.end(), t,
                                [](double value, const BallState& s) { return value < s.t; });
  if (upper == samples.end()) return samples.back();
  const BallState& b = *upper;
  const BallState& a = *(upper - 1);

  for (const BounceEvent& e : segment.bounces) {
    if (e.t > a.t && e.t <= b.t) {
      if (t < e.t) return hermite(a, BallState{e.t, e.p, e.v_minus}, t);
      return hermite(BallState{e.t, e.p, e.v_plus}, b, t);
    }
  }
  return hermite(a, b, t);
}

}  // namespace ttplan
