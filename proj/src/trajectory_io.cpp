#include "ttplan/trajectory_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace ttplan {

void TrajectoryRecord::validate() const {
  if (samples.size() < 2) {
    throw InvariantViolation("record '" + id + "': fewer than two samples");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].t) || !samples[i].p.allFinite()) {
      throw InvariantViolation("record '" + id + "': non-finite sample " + std::to_string(i));
    }
    if (i > 0 && !(samples[i].t > samples[i - 1].t)) {
      throw InvariantViolation("record '" + id + "': timestamps not strictly increasing at sample " +
                               std::to_string(i));
    }
  }
}

std::optional<double> TrajectoryRecord::meta_number(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) return std::nullopt;
  const Json value = Json::parse(it->second, nullptr, false);
  if (!value.is_number()) return std::nullopt;
  return value.get<double>();
}

void TrajectoryRecord::set_meta_number(const std::string& key, double value) {
  meta[key] = Json(value).dump();
}

TrajectoryRecord parse_trajectory_line(const std::string& line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(where + e.what());
  }
  if (!j.is_object()) throw ParseError(where + "record is not a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw ParseError(where + "missing string field 'id'");
  if (!j.contains("samples") || !j["samples"].is_array()) {
    throw ParseError(where + "missing array field 'samples'");
  }

  TrajectoryRecord record;
  record.id = j["id"].get<std::string>();
  record.samples.reserve(j["samples"].size());
  for (const Json& s : j["samples"]) {
    if (!s.is_array() || s.size() != 4) throw ParseError(where + "sample is not [t, x, y, z]");
    for (const Json& x : s) {
      if (!x.is_number()) throw ParseError(where + "sample entry is not a number");
    }
    record.samples.push_back(
        {s[0].get<double>(), Vec3(s[1].get<double>(), s[2].get<double>(), s[3].get<double>())});
  }
  if (j.contains("meta")) {
    if (!j["meta"].is_object()) throw ParseError(where + "'meta' is not an object");
    for (const auto& [key, value] : j["meta"].items()) record.meta[key] = value.dump();
  }
  return record;
}

std::string format_trajectory_line(const TrajectoryRecord& record) {
  Json j;
  j["id"] = record.id;
  Json samples = Json::array();
  for (const PositionSample& s : record.samples) {
    samples.push_back({s.t, s.p.x(), s.p.y(), s.p.z()});
  }
  j["samples"] = std::move(samples);
  Json meta = Json::object();
  for (const auto& [key, text] : record.meta) meta[key] = Json::parse(text);
  j["meta"] = std::move(meta);
  return j.dump();
}

std::vector<TrajectoryRecord> read_trajectories(std::istream& in) {
  std::vector<TrajectoryRecord> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_trajectory_line(line, n));
    out.back().validate();
  }
  return out;
}

std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_trajectories(in);
}

void write_trajectories(std::ostream& out, std::span<const TrajectoryRecord> records) {
  for (const TrajectoryRecord& r : records) out << format_trajectory_line(r) << '\n';
}

void save_trajectories(const std::filesystem::path& path, std::span<const TrajectoryRecord> records) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_trajectories(out, records);
}

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json to_json(const BallState& s) {
  return Json{{"t", s.t}, {"p", to_json(s.p)}, {"v", to_json(s.v)}};
}

Json to_json(const FitReport& report) {
  Json j;
  j["k_hat"] = report.k_hat;
  j["c_h_hat"] = report.c_h_hat ? Json(*report.c_h_hat) : Json(nullptr);
  j["c_v_hat"] = report.c_v_hat;
  j["residual_drag"] = report.residual_drag;
  j["residual_h"] = report.residual_h;
  j["residual_v"] = report.residual_v;
  j["trajectory_count"] = report.trajectory_count;
  j["sample_count"] = report.sample_count;
  j["warnings"] = report.warnings;
  return j;
}

Json to_json(const StrikePrediction& prediction) {
  return Json{{"t_strike", prediction.t_strike},
              {"p_strike", to_json(prediction.p_strike)},
              {"v_incoming", to_json(prediction.v_incoming)},
              {"bounce_count", prediction.bounce_count},
              {"flagged", prediction.flagged()}};
}

Json to_json(const StrikeCommand& command) {
  return Json{{"t_strike", command.t_strike},
              {"p_racket", to_json(command.p_racket)},
              {"v_racket", to_json(command.v_racket)},
              {"n_racket", to_json(command.n_racket)},
              {"swing_type", std::string(to_string(command.swing_type))},
              {"p_base_target", Json::array({command.p_base_target.x(), command.p_base_target.y()})},
              {"base_yaw", command.base_yaw},
              {"v_outgoing", to_json(command.v_outgoing)}};
}

Json to_json(const ShotOutcome& outcome) {
  return Json{{"hit", outcome.hit},
              {"returned", outcome.returned},
              {"landing_point", outcome.landing_point ? to_json(*outcome.landing_point) : Json(nullptr)},
              {"failure_mode", std::string(to_string(outcome.failure_mode))}};
}

void write_segment_jsonl(std::ostream& out, const FlightSegment& segment, const Json& meta) {
  out << Json{{"type", "meta"}, {"meta", meta}}.dump() << '\n';
  for (const BallState& s : segment.samples) {
    Json j = to_json(s);
    j["type"] = "sample";
    out << j.dump() << '\n';
  }
  for (const BounceEvent& b : segment.bounces) {
    out << Json{{"type", "bounce"},
                {"t", b.t},
                {"p", to_json(b.p)},
                {"v_minus", to_json(b.v_minus)},
                {"v_plus", to_json(b.v_plus)}}
               .dump()
        << '\n';
  }
  out << Json{{"type", "end"}, {"termination", std::string(to_string(segment.termination))}}.dump()
      << '\n';
}

namespace {

void write_meta_comments(std::ostream& out, const Json& meta) {
  for (const auto& [key, value] : meta.items()) {
    out << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

std::string num(double x) { return Json(x).dump(); }

}  // namespace

void write_error_curve_csv(std::ostream& out, const PredictionErrorCurve& curve, const Json& meta) {
  write_meta_comments(out, meta);
  out << "# trajectories: " << curve.trajectory_count << '\n';
  out << "# excluded: " << curve.excluded_count << '\n';
  out << "tts,pos_mean,pos_std,t_mean,t_std\n";
  for (const ErrorBin& b : curve.bins) {
    out << num(b.time_to_strike) << ',' << num(b.mean_position_error) << ','
        << num(b.std_position_error) << ',' << num(b.mean_time_error) << ','
        << num(b.std_time_error) << '\n';
  }
}

void write_grid_csv(std::ostream& out, const GridReport& report, const Json& meta) {
  write_meta_comments(out, meta);
  out << "# hit_rate: " << num(report.hit_rate()) << '\n';
  out << "# return_rate: " << num(report.return_rate()) << '\n';
  out << "y_lo,y_hi,z_lo,z_hi,trials,hits,returns\n";
  for (const CellReport& c : report.cells) {
    out << num(c.cell.y_lo) << ',' << num(c.cell.y_hi) << ',' << num(c.cell.z_lo) << ','
        << num(c.cell.z_hi) << ',' << c.trials << ',' << c.hits << ',' << c.returns << '\n';
  }
}

}  // namespace ttplan
