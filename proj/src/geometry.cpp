#include "ttplan/geometry.hpp"

#include <cmath>
#include <string>

namespace ttplan {

void TableGeometry::validate() const {
  auto fail = [](const std::string& what) { throw InvariantViolation("geometry: " + what); };
  if (!(length_x > 0.0)) fail("length_x must be positive");
  if (!(width_y > 0.0)) fail("width_y must be positive");
  if (!(net_height > 0.0)) fail("net_height must be positive");
  if (!(surface_height_above_floor > 0.0)) fail("surface_height_above_floor must be positive");
  if (std::abs(hit_plane_x + half_length()) > 1e-12) fail("hit_plane_x must equal -length_x/2");
  if (!landing_target.allFinite()) fail("landing_target must be finite");
  if (!(landing_target.x() > 0.0 && landing_target.x() <= half_length()) ||
      std::abs(landing_target.y()) > half_width() || landing_target.z() != 0.0) {
    fail("landing_target must lie on the opponent half with z = 0");
  }
}

bool on_table_footprint(const Vec3& p, const TableGeometry& geometry) {
  return std::abs(p.x()) <= geometry.half_length() && std::abs(p.y()) <= geometry.half_width();
}

bool crosses_net_region(const Vec3& p_before, const Vec3& p_after, const TableGeometry& geometry) {
  const double xa = p_before.x();
  const double xb = p_after.x();
  const bool straddles = (xa <= 0.0 && xb >= 0.0) || (xa >= 0.0 && xb <= 0.0);
  if (!straddles || xa == xb) return false;
  // Interpolate from the lower-x endpoint so swapping the arguments gives
  // the same floating point result.
  const Vec3& lo = xa < xb ? p_before : p_after;
  const Vec3& hi = xa < xb ? p_after : p_before;
  const double s = -lo.x() / (hi.x() - lo.x());
  const Vec3 crossing = lo + s * (hi - lo);
  return crossing.z() < geometry.net_height && std::abs(crossing.y()) <= geometry.half_width();
}

bool on_opponent_half(const Vec3& p, const TableGeometry& geometry) {
  return p.x() > 0.0 && on_table_footprint(p, geometry);
}

BallState mirror_state(const BallState& s) {
  BallState m = s;
  m.p.x() = -s.p.x();
  m.v.x() = -s.v.x();
  return m;
}

}  // namespace ttplan
