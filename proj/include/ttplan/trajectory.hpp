#pragma once

#include "ttplan/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ttplan {

/// A timestamped ball position stream, recorded or synthetic.
struct TrajectoryRecord {
  std::string id;
  std::vector<PositionSample> samples;
  /// Free-form metadata. Values hold serialized JSON text so they survive a
  /// save/load cycle unchanged.
  std::map<std::string, std::string> meta;

  /// Throws InvariantViolation naming the record when samples are not
  /// strictly increasing in time or fewer than two.
  void validate() const;

  std::optional<double> meta_number(const std::string& key) const;
  void set_meta_number(const std::string& key, double value);
};

}  // namespace ttplan
