#pragma once

#include "ttplan/types.hpp"

namespace ttplan {

/// Regulation table in the table frame. The robot plays from the x < 0 end;
/// the virtual hit plane sits on the robot-side table edge.
struct TableGeometry {
  double length_x = 2.74;
  double width_y = 1.525;
  double surface_height_above_floor = 0.76;
  double net_height = 0.1525;
  double hit_plane_x = -1.37;
  Vec3 landing_target{0.685, 0.0, 0.0};

  double half_length() const { return 0.5 * length_x; }
  double half_width() const { return 0.5 * width_y; }
  /// z coordinate of the floor in the table frame.
  double floor_z() const { return -surface_height_above_floor; }

  /// Throws InvariantViolation when any field is out of range.
  void validate() const;
};

/// True iff p projects onto the table top (edges inclusive).
bool on_table_footprint(const Vec3& p, const TableGeometry& geometry = {});

/// True iff the segment straddles x = 0 and its linear crossing point is
/// below the net top while within the table width. Order of the points is
/// irrelevant.
bool crosses_net_region(const Vec3& p_before, const Vec3& p_after,
                        const TableGeometry& geometry = {});

/// Opponent half: 0 < x <= length/2 on the footprint.
bool on_opponent_half(const Vec3& p, const TableGeometry& geometry = {});

/// Reflects a state into the opposite player's frame (x and v_x negated).
BallState mirror_state(const BallState& s);

}  // namespace ttplan
