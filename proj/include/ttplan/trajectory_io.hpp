#pragma once

#include "ttplan/dynamics.hpp"
#include "ttplan/rally_simulator.hpp"
#include "ttplan/strike_planner.hpp"
#include "ttplan/strike_predictor.hpp"
#include "ttplan/system_id.hpp"
#include "ttplan/trajectory.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ttplan {

using Json = nlohmann::ordered_json;

// Trajectory JSONL: {"id":..., "samples":[[t,x,y,z],...], "meta":{...}}

/// Parses one JSONL line. ParseError carries `line_number`.
TrajectoryRecord parse_trajectory_line(const std::string& line, std::size_t line_number);
std::string format_trajectory_line(const TrajectoryRecord& record);

/// Blank lines are skipped. Every record is validated.
std::vector<TrajectoryRecord> read_trajectories(std::istream& in);
std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path);

void write_trajectories(std::ostream& out, std::span<const TrajectoryRecord> records);
void save_trajectories(const std::filesystem::path& path, std::span<const TrajectoryRecord> records);

// JSON views of result types.

Json to_json(const Vec3& v);
Json to_json(const BallState& s);
Json to_json(const FitReport& report);
Json to_json(const StrikePrediction& prediction);
Json to_json(const StrikeCommand& command);
Json to_json(const ShotOutcome& outcome);

/// Segment as JSONL: a "meta" line, one "sample" line per state, one
/// "bounce" line per impact, and a closing "end" line.
void write_segment_jsonl(std::ostream& out, const FlightSegment& segment, const Json& meta);

/// Error curve CSV preceded by "# key: value" metadata lines.
void write_error_curve_csv(std::ostream& out, const PredictionErrorCurve& curve, const Json& meta);

void write_grid_csv(std::ostream& out, const GridReport& report, const Json& meta);

}  // namespace ttplan
