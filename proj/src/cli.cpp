#include "ttplan/cli.hpp"

#include "ttplan/config.hpp"
#include "ttplan/trajectory_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ttplan {

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string output;
};

RunConfig resolve_config(const CommonOptions& opts) {
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("TTPLAN_CONFIG")) path = env;
  }
  RunConfig config = path.empty() ? RunConfig{} : load_config(path);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) config.experiment.seed = *opts.seed;
  if (opts.threads) config.experiment.threads = *opts.threads;
  config.validate();
  return config;
}

std::size_t worker_count(const RunConfig& config) {
  if (config.experiment.threads > 0) return config.experiment.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

Json run_meta(const RunConfig& config, const std::string& command) {
  return Json{{"command", command},
              {"config_hash", config.hash_hex()},
              {"seed", config.experiment.seed}};
}

void emit(const CommonOptions& opts, const std::string& text, std::ostream& out) {
  if (opts.output.empty() || opts.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(opts.output, std::ios::binary);
  if (!file) throw ParseError("cannot write " + opts.output);
  file << text;
}

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("-c,--config", opts.config_path, "Config file (default: $TTPLAN_CONFIG)");
  sub->add_option("--set", opts.overrides, "Config override key=value (repeatable)");
  sub->add_option("--seed", opts.seed, "Root random seed");
  sub->add_option("--threads", opts.threads, "Worker threads (0: all cores)");
  sub->add_option("-o,--output", opts.output, "Output file (default: stdout)");
}

// gen -----------------------------------------------------------------------

struct GenOptions {
  std::optional<std::size_t> count;
  std::optional<double> k, c_h, c_v, noise;
  std::vector<double> target_y{-0.5, 0.5};
  std::vector<double> target_z{0.2, 0.6};
  double origin_sigma = 0.05;
  double flight_time_sigma = 0.05;
};

std::string run_gen(const RunConfig& base, const GenOptions& g) {
  RunConfig config = base;
  if (g.count) config.experiment.count = *g.count;
  if (g.k) config.physics.k = *g.k;
  if (g.c_h) config.physics.c_h = *g.c_h;
  if (g.c_v) config.physics.c_v = *g.c_v;
  if (g.noise) config.experiment.noise = *g.noise;
  config.validate();

  LaunchSpec spec = config.experiment.launch;
  spec.target_y_lo = g.target_y.at(0);
  spec.target_y_hi = g.target_y.at(1);
  spec.target_z_lo = g.target_z.at(0);
  spec.target_z_hi = g.target_z.at(1);
  spec.origin_sigma = Vec3::Constant(g.origin_sigma);
  spec.flight_time_sigma = g.flight_time_sigma;

  auto records = synthesize_trajectories(config.experiment.count, spec, config.physics, config.geometry,
                                         config.experiment.noise, config.experiment.seed,
                                         config.integrator);
  for (TrajectoryRecord& r : records) {
    r.meta["config_hash"] = Json(config.hash_hex()).dump();
    r.meta["seed"] = Json(config.experiment.seed).dump();
  }
  std::ostringstream out;
  write_trajectories(out, records);
  return out.str();
}

// fit -----------------------------------------------------------------------

std::string params_file(const RunConfig& config, const FitReport& report, const std::string& source) {
  std::ostringstream out;
  out << "# Physics parameters identified by `ttplan fit` from " << source << "\n";
  out << "# trajectories: " << report.trajectory_count << ", config_hash: " << config.hash_hex()
      << ", seed: " << config.experiment.seed << "\n";
  out << "physics.k = " << Json(report.k_hat).dump() << "\n";
  out << "physics.c_h = " << Json(report.c_h_hat.value_or(config.physics.c_h)).dump() << "\n";
  out << "physics.c_v = " << Json(report.c_v_hat).dump() << "\n";
  out << "physics.c_r = " << Json(config.physics.c_r).dump() << "\n";
  return out.str();
}

// predict -------------------------------------------------------------------

Json run_predict(const RunConfig& config, const TrajectoryRecord& record, std::optional<double> at) {
  BallTracker tracker(config.estimator);
  std::optional<StateEstimate> chosen;
  std::optional<StrikePrediction> prediction;
  for (const PositionSample& s : record.samples) {
    if (at && s.t > *at) break;
    const auto estimate = tracker.push(s.t, s.p);
    if (!estimate) continue;
    try {
      const StrikePrediction p = predict_strike(*estimate, config.physics, config.geometry, config.integrator);
      chosen = estimate;
      prediction = p;
      if (!at && estimate->t >= p.t_strike - config.lock_time) break;
    } catch (const NoPlaneCrossing&) {
    }
  }
  if (!prediction) throw NoPlaneCrossing("record '" + record.id + "': no estimate predicts a plane crossing");
  const StrikeCommand command = plan_strike(*prediction, config.geometry, config.physics, config.planner, config.home);
  Json j;
  j["meta"] = run_meta(config, "predict");
  j["meta"]["record"] = record.id;
  j["estimate"] = Json{{"t", chosen->t},
                       {"p_hat", to_json(chosen->p_hat)},
                       {"v_hat", to_json(chosen->v_hat)},
                       {"sample_count", chosen->sample_count}};
  j["prediction"] = to_json(*prediction);
  j["command"] = to_json(command);
  return j;
}

// simulate ------------------------------------------------------------------

std::string run_simulate(const RunConfig& config, const std::vector<double>& state, const std::string& stop,
                         double duration) {
  BallState initial;
  if (!state.empty()) {
    if (state.size() != 6) throw InvalidArgument("--state expects x,y,z,vx,vy,vz");
    initial = BallState{0.0, Vec3(state[0], state[1], state[2]), Vec3(state[3], state[4], state[5])};
  } else {
    Rng rng(config.experiment.seed);
    initial = launch_ball(config.experiment.launch, config.physics, config.geometry, rng, config.integrator);
  }
  StopCondition condition;
  if (stop == "time") condition = StopCondition::after(duration);
  else if (stop == "plane") condition = StopCondition::at_hit_plane();
  else condition = StopCondition::at_landing();
  const FlightSegment segment = integrate(initial, config.physics, config.geometry, condition, config.integrator);
  std::ostringstream out;
  write_segment_jsonl(out, segment, run_meta(config, "simulate"));
  return out.str();
}

SideConfig make_side(const RunConfig& config, bool perfect) {
  SideConfig side = config.side();
  if (perfect) {
    side.executor = ExecutorConfig::perfect();
    side.executor.reach_curve = config.executor.reach_curve;
    side.measurement_noise = 0.0;
  }
  return side;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-based table tennis strike planner", "ttplan"};
  app.require_subcommand(1);

  CommonOptions common;
  GenOptions gen;
  std::string input;
  std::string params_out;
  std::string record_id;
  std::optional<double> at;
  std::vector<double> state;
  std::string stop = "landing";
  double duration = 1.0;
  bool perfect = false;
  std::optional<std::size_t> max_shots;
  std::optional<std::size_t> trials;

  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic trajectory JSONL");
  add_common(gen_cmd, common);
  gen_cmd->add_option("--count", gen.count, "Number of trajectories");
  gen_cmd->add_option("--k", gen.k, "Drag coefficient");
  gen_cmd->add_option("--c-h", gen.c_h, "Horizontal table restitution");
  gen_cmd->add_option("--c-v", gen.c_v, "Vertical table restitution");
  gen_cmd->add_option("--noise", gen.noise, "Measurement noise sigma [m]");
  gen_cmd->add_option("--target-y", gen.target_y, "Hit-plane y range LO HI")->expected(2);
  gen_cmd->add_option("--target-z", gen.target_z, "Hit-plane z range LO HI")->expected(2);
  gen_cmd->add_option("--origin-sigma", gen.origin_sigma, "Launch origin jitter [m]");
  gen_cmd->add_option("--flight-time-sigma", gen.flight_time_sigma, "Flight time jitter [s]");

  auto* fit_cmd = app.add_subcommand("fit", "Identify k, C_h, C_v from trajectories");
  add_common(fit_cmd, common);
  fit_cmd->add_option("-i,--input", input, "Trajectory JSONL")->required();
  fit_cmd->add_option("--params", params_out, "Write identified parameters as a config file");

  auto* predict_cmd = app.add_subcommand("predict", "Predict the strike and plan the command");
  add_common(predict_cmd, common);
  predict_cmd->add_option("-i,--input", input, "Trajectory JSONL")->required();
  predict_cmd->add_option("--id", record_id, "Record id (default: first record)");
  predict_cmd->add_option("--at", at, "Use the last estimate at or before this time [s]");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Prediction error against time-to-strike");
  add_common(evaluate_cmd, common);
  evaluate_cmd->add_option("-i,--input", input, "Trajectory JSONL")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate one flight");
  add_common(simulate_cmd, common);
  simulate_cmd->add_option("--state", state, "Initial x y z vx vy vz (default: launcher)")->expected(6);
  simulate_cmd->add_option("--stop", stop, "time, plane or landing")
      ->check(CLI::IsMember({"time", "plane", "landing"}));
  simulate_cmd->add_option("--duration", duration, "Duration for --stop time [s]");

  auto* rally_cmd = app.add_subcommand("rally", "Two-sided closed-loop rally");
  add_common(rally_cmd, common);
  rally_cmd->add_option("--max-shots", max_shots, "Stop after this many returns");
  rally_cmd->add_flag("--perfect", perfect, "Noiseless perception and execution");

  auto* grid_cmd = app.add_subcommand("grid", "Hit/return rates over the hit-plane grid");
  add_common(grid_cmd, common);
  grid_cmd->add_option("--trials", trials, "Trials per cell");
  grid_cmd->add_flag("--perfect", perfect, "Noiseless perception and execution");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ttplan: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const RunConfig config = resolve_config(common);
    if (gen_cmd->parsed()) {
      emit(common, run_gen(config, gen), out);
    } else if (fit_cmd->parsed()) {
      const auto records = load_trajectories(input);
      const FitReport report = identify(records);
      Json j = to_json(report);
      j["meta"] = run_meta(config, "fit");
      j["meta"]["input"] = input;
      emit(common, j.dump(2) + "\n", out);
      if (!params_out.empty()) {
        std::ofstream file(params_out, std::ios::binary);
        if (!file) throw ParseError("cannot write " + params_out);
        file << params_file(config, report, input);
      }
    } else if (predict_cmd->parsed()) {
      const auto records = load_trajectories(input);
      if (records.empty()) throw InsufficientData("no records in " + input);
      const TrajectoryRecord* record = &records.front();
      if (!record_id.empty()) {
        const auto it = std::find_if(records.begin(), records.end(),
                                     [&](const TrajectoryRecord& r) { return r.id == record_id; });
        if (it == records.end()) throw InvalidArgument("no record with id '" + record_id + "'");
        record = &*it;
      }
      emit(common, run_predict(config, *record, at).dump(2) + "\n", out);
    } else if (evaluate_cmd->parsed()) {
      const auto records = load_trajectories(input);
      EvaluationConfig ec;
      ec.estimator = config.estimator;
      ec.integrator = config.integrator;
      ec.threads = worker_count(config);
      const PredictionErrorCurve curve = evaluate_prediction_errors(records, config.physics, config.geometry, ec);
      Json meta = run_meta(config, "evaluate");
      meta["input"] = input;
      std::ostringstream s;
      write_error_curve_csv(s, curve, meta);
      emit(common, s.str(), out);
    } else if (simulate_cmd->parsed()) {
      emit(common, run_simulate(config, state, stop, duration), out);
    } else if (rally_cmd->parsed()) {
      const SideConfig side = make_side(config, perfect);
      const RallyOutcome rally = run_rally(config.simulation(), side, side, config.experiment.launch,
                                           config.experiment.seed,
                                           max_shots.value_or(config.experiment.max_shots));
      std::ostringstream s;
      Json meta = run_meta(config, "rally");
      meta["type"] = "meta";
      meta["perfect"] = perfect;
      s << meta.dump() << "\n";
      for (std::size_t i = 0; i < rally.shots.size(); ++i) {
        Json shot = to_json(rally.shots[i]);
        shot["type"] = "shot";
        shot["index"] = i;
        s << shot.dump() << "\n";
      }
      s << Json{{"type", "summary"},
                {"shot_count", rally.shot_count},
                {"terminal_failure", std::string(to_string(rally.terminal_failure))}}
               .dump()
        << "\n";
      emit(common, s.str(), out);
    } else if (grid_cmd->parsed()) {
      const SideConfig side = make_side(config, perfect);
      const GridReport report = run_grid(GridSpec{}, config.simulation(), side, config.experiment.launch,
                                         trials.value_or(config.experiment.trials),
                                         config.experiment.seed, worker_count(config));
      Json meta = run_meta(config, "grid");
      meta["perfect"] = perfect;
      std::ostringstream s;
      write_grid_csv(s, report, meta);
      emit(common, s.str(), out);
    }
  } catch (const InvalidArgument& e) {
    err << "ttplan: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "ttplan: " << e.what() << "\n";
    return kExitData;
  } catch (const Json::exception& e) {
    err << "ttplan: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace ttplan
