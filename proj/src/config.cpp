#include "ttplan/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <istream>
#include <sstream>

namespace ttplan {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  return x;
}

template <typename Int>
Int parse_integer(const std::string& text) {
  Int x = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidArgument("not a non-negative integer: '" + text + "'");
  }
  return x;
}

std::string format_double(double x) { return nlohmann::json(x).dump(); }

template <int N>
Eigen::Matrix<double, N, 1> parse_vector(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != N) {
    throw InvalidArgument("expected " + std::to_string(N) + " comma-separated numbers: '" + text + "'");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = parse_double(parts[i]);
  return v;
}

template <typename Derived>
std::string format_vector(const Eigen::MatrixBase<Derived>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field field(std::function<T&(RunConfig&)> ref) {
  Field f;
  f.set = [ref](RunConfig& c, const std::string& text) {
    T& target = ref(c);
    if constexpr (std::is_same_v<T, double>) {
      target = parse_double(text);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") target = true;
      else if (text == "false" || text == "0") target = false;
      else throw InvalidArgument("not a boolean: '" + text + "'");
    } else if constexpr (std::is_same_v<T, Vec3>) {
      target = parse_vector<3>(text);
    } else if constexpr (std::is_same_v<T, Vec2>) {
      target = parse_vector<2>(text);
    } else {
      target = parse_integer<T>(text);
    }
  };
  f.get = [ref](const RunConfig& c) {
    const T& value = ref(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, double>) {
      return format_double(value);
    } else if constexpr (std::is_same_v<T, bool>) {
      return std::string(value ? "true" : "false");
    } else if constexpr (std::is_same_v<T, Vec3> || std::is_same_v<T, Vec2>) {
      return format_vector(value);
    } else {
      return std::to_string(value);
    }
  };
  return f;
}

Field reach_curve_field() {
  Field f;
  f.set = [](RunConfig& c, const std::string& text) {
    std::vector<Vec2> anchors;
    for (const std::string& pair : split(text, ',')) {
      const auto parts = split(pair, ':');
      if (parts.size() != 2) throw InvalidArgument("reach curve entry is not distance:time: '" + pair + "'");
      anchors.emplace_back(parse_double(parts[0]), parse_double(parts[1]));
    }
    c.executor.reach_curve.anchors = std::move(anchors);
  };
  f.get = [](const RunConfig& c) {
    std::string out;
    for (const Vec2& a : c.executor.reach_curve.anchors) {
      if (!out.empty()) out += ", ";
      out += format_double(a.x()) + ":" + format_double(a.y());
    }
    return out;
  };
  return f;
}

#define TTPLAN_FIELD(type, key, expr) \
  {key, field<type>([](RunConfig& c) -> type& { return expr; })}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      TTPLAN_FIELD(double, "geometry.length", c.geometry.length_x),
      TTPLAN_FIELD(double, "geometry.width", c.geometry.width_y),
      TTPLAN_FIELD(double, "geometry.surface_height", c.geometry.surface_height_above_floor),
      TTPLAN_FIELD(double, "geometry.net_height", c.geometry.net_height),
      TTPLAN_FIELD(double, "geometry.hit_plane_x", c.geometry.hit_plane_x),
      TTPLAN_FIELD(Vec3, "geometry.landing_target", c.geometry.landing_target),

      TTPLAN_FIELD(double, "physics.k", c.physics.k),
      TTPLAN_FIELD(double, "physics.c_h", c.physics.c_h),
      TTPLAN_FIELD(double, "physics.c_v", c.physics.c_v),
      TTPLAN_FIELD(double, "physics.c_r", c.physics.c_r),
      TTPLAN_FIELD(Vec3, "physics.g", c.physics.g),

      TTPLAN_FIELD(std::size_t, "estimator.capacity", c.estimator.capacity),
      TTPLAN_FIELD(std::size_t, "estimator.min_fit_count", c.estimator.min_fit_count),
      TTPLAN_FIELD(double, "estimator.bounce_band", c.estimator.bounce_band),

      {"executor.reach_curve", reach_curve_field()},
      TTPLAN_FIELD(double, "executor.max_reach_radius", c.executor.max_reach_radius),
      TTPLAN_FIELD(double, "executor.reach_center_height", c.executor.reach_center_height),
      TTPLAN_FIELD(double, "executor.swing_duration", c.executor.swing_duration),
      TTPLAN_FIELD(double, "executor.position_error_sigma", c.executor.position_error_sigma),
      TTPLAN_FIELD(double, "executor.velocity_error_sigma", c.executor.velocity_error_sigma),
      TTPLAN_FIELD(double, "executor.timing_jitter_sigma", c.executor.timing_jitter_sigma),
      TTPLAN_FIELD(double, "executor.racket_radius", c.executor.racket_radius),
      TTPLAN_FIELD(double, "executor.thickness_band", c.executor.thickness_band),

      TTPLAN_FIELD(double, "planner.dt_flight", c.planner.dt_flight),
      TTPLAN_FIELD(double, "planner.reach_offset", c.planner.reach_offset),
      TTPLAN_FIELD(double, "planner.base_setback", c.planner.base_setback),
      TTPLAN_FIELD(double, "planner.degenerate_epsilon", c.planner.degenerate_epsilon),
      TTPLAN_FIELD(bool, "planner.compensate_drag", c.planner.compensate_drag),
      TTPLAN_FIELD(double, "planner.lock_time", c.lock_time),
      TTPLAN_FIELD(Vec2, "planner.home", c.home.p_xy),

      TTPLAN_FIELD(double, "integrator.step", c.integrator.step),
      TTPLAN_FIELD(double, "integrator.horizon", c.integrator.horizon),
      TTPLAN_FIELD(double, "integrator.event_tolerance", c.integrator.event_tolerance),
      TTPLAN_FIELD(double, "integrator.resting_speed", c.integrator.resting_speed),

      TTPLAN_FIELD(std::uint64_t, "experiment.seed", c.experiment.seed),
      TTPLAN_FIELD(std::size_t, "experiment.trials", c.experiment.trials),
      TTPLAN_FIELD(std::size_t, "experiment.count", c.experiment.count),
      TTPLAN_FIELD(double, "experiment.noise", c.experiment.noise),
      TTPLAN_FIELD(std::size_t, "experiment.threads", c.experiment.threads),
      TTPLAN_FIELD(std::size_t, "experiment.max_shots", c.experiment.max_shots),
      TTPLAN_FIELD(Vec3, "experiment.launch_origin", c.experiment.launch.origin),
      TTPLAN_FIELD(Vec3, "experiment.launch_origin_sigma", c.experiment.launch.origin_sigma),
      TTPLAN_FIELD(double, "experiment.launch_flight_time", c.experiment.launch.flight_time),
      TTPLAN_FIELD(double, "experiment.launch_flight_time_sigma", c.experiment.launch.flight_time_sigma),
      TTPLAN_FIELD(bool, "experiment.launch_exact_flight_time", c.experiment.launch.exact_flight_time),
      TTPLAN_FIELD(double, "experiment.launch_target_y_lo", c.experiment.launch.target_y_lo),
      TTPLAN_FIELD(double, "experiment.launch_target_y_hi", c.experiment.launch.target_y_hi),
      TTPLAN_FIELD(double, "experiment.launch_target_z_lo", c.experiment.launch.target_z_lo),
      TTPLAN_FIELD(double, "experiment.launch_target_z_hi", c.experiment.launch.target_z_hi),
  };
  return table;
}

#undef TTPLAN_FIELD

}  // namespace

void RunConfig::validate() const {
  geometry.validate();
  physics.validate();
  estimator.validate();
  executor.validate();
  planner.validate();
  if (!(lock_time >= 0.0)) throw InvariantViolation("planner: lock_time must be non-negative");
  if (!home.p_xy.allFinite()) throw InvariantViolation("planner: home must be finite");
  if (!(integrator.step > 0.0)) throw InvariantViolation("integrator: step must be positive");
  if (!(integrator.horizon > 0.0)) throw InvariantViolation("integrator: horizon must be positive");
  if (!(integrator.event_tolerance > 0.0)) throw InvariantViolation("integrator: event_tolerance must be positive");
  if (!(integrator.resting_speed >= 0.0)) throw InvariantViolation("integrator: resting_speed must be non-negative");
  if (!(experiment.noise >= 0.0)) throw InvariantViolation("experiment: noise must be non-negative");
  try {
    experiment.launch.validate();
  } catch (const InvalidSpec& e) {
    throw InvariantViolation(std::string("experiment: ") + e.what());
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw InvalidArgument("unknown config key '" + key + "'");
  try {
    it->second.set(*this, trim(value));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(key + ": " + e.what());
  }
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(*this) + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::string text;
  for (const auto& [key, f] : fields()) {
    if (key != "experiment.seed" && key != "experiment.threads") text += key + " = " + f.get(*this) + "\n";
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

SimulationConfig RunConfig::simulation() const { return {physics, geometry, integrator}; }

SideConfig RunConfig::side() const {
  SideConfig s;
  s.model = physics;
  s.planner = planner;
  s.estimator = estimator;
  s.executor = executor;
  s.measurement_noise = experiment.noise;
  s.lock_time = lock_time;
  s.home = home;
  return s;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, f] : fields()) keys.push_back(key);
  return keys;
}

RunConfig read_config(std::istream& in) {
  RunConfig config;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(n) + ": expected 'key = value'");
    }
    try {
      config.set(trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError("config line " + std::to_string(n) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  return read_config(in);
}

}  // namespace ttplan
