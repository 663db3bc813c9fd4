#include "quatslide/cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "quatslide/demos.hpp"
#include "quatslide/errors.hpp"
#include "quatslide/model_io.hpp"

namespace quatslide {

namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void print_summary(std::ostream& log, const std::string& name, const RunMetrics& m) {
  const auto rate = [](const std::optional<double>& r) { return r ? std::to_string(*r) : std::string("n/a"); };
  log << name << ": steps=" << m.steps << " final |p_e|=" << m.final_p_err << " final |vec q_e|=" << m.final_qvec_err
      << " rate_p=" << rate(m.fitted_rate_position) << " rate_q=" << rate(m.fitted_rate_orientation)
      << " path_length=" << m.path_length << " final_sign=" << m.final_sign << '\n';
  if (m.aborted()) log << name << ": ABORTED at t=" << m.abort_time << ": " << m.abort_reason << '\n';
}

int run_demo(const Demo& demo, const std::filesystem::path& out_root) {
  int code = kExitOk;
  for (const Demo::Run& run : demo.runs) {
    const Scenario sc = scenario_from_json(parse_json_text(run.scenario_json, "demo:" + demo.name), ".");
    const std::filesystem::path dir = run.label.empty() ? out_root : out_root / run.label;
    code = std::max(code, run_and_write(sc, dir, std::cout));
  }
  return code;
}

int validate_scenario(const Scenario& sc, int samples) {
  const SimConfig& cfg = sc.config;
  nlohmann::json report = {{"scenario", sc.name}, {"schema", "ok"}};
  if (cfg.controller.mode == ControlMode::JointSpace) {
    report["reachability"] = "not applicable (joint_space)";
    std::cout << report.dump(2) << '\n';
    return kExitOk;
  }
  const ReachabilityReport r =
      reachability_check(cfg.model, cfg.trajectory, samples, cfg.initial.theta, cfg.controller.cond_abort);
  report["reachability"] = {{"samples", r.samples.size()},
                            {"min_manipulability", r.min_manipulability},
                            {"max_condition", r.max_condition},
                            {"cond_abort", cfg.controller.cond_abort},
                            {"condition_violations", r.condition_violations}};
  std::cout << report.dump(2) << '\n';
  return r.ok() ? kExitOk : kExitSingular;
}

}  // namespace

int run_and_write(const Scenario& scenario, const std::filesystem::path& dir, std::ostream& log) {
  std::filesystem::create_directories(dir);
  write_json(dir / "scenario.resolved.json", scenario.resolved);
  std::ofstream csv(dir / "trace.csv");
  if (!csv) throw ConfigError("cannot write " + (dir / "trace.csv").string());
  write_trace_csv_header(csv);
  const SimResult result = run_scenario(scenario.config, [&csv](const SimRecord& r) { write_trace_csv_row(csv, r); });
  csv.close();
  write_json(dir / "metrics.json", metrics_to_json(result.metrics));
  print_summary(log, scenario.name, result.metrics);
  return exit_code_for(result.metrics);
}

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Quaternion sliding-variable manipulator control simulator", "quatslide"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");

  std::string demo_name;
  bool print_only = false;
  auto* demo = app.add_subcommand("demo", "Run a built-in demo");
  demo->add_option("name", demo_name, "Demo name (see list-demos)")->required();
  demo->add_option("--out", out_dir, "Output directory (default out/<name>)");
  demo->add_flag("--print", print_only, "Print the demo scenario JSON instead of running it");

  auto* list = app.add_subcommand("list-demos", "List built-in demos");

  int samples = 200;
  auto* validate = app.add_subcommand("validate", "Check a scenario's schema and trajectory reachability");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  validate->add_option("--samples", samples, "Trajectory samples for the reachability check")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (*list) {
      for (const Demo& d : builtin_demos()) std::cout << d.name << "\t" << d.description << '\n';
      return kExitOk;
    }
    if (*demo) {
      const Demo* d = find_demo(demo_name);
      if (!d) {
        std::cerr << "unknown demo '" << demo_name << "' (see list-demos)\n";
        return kExitConfigError;
      }
      if (print_only) {
        for (const Demo::Run& r : d->runs) std::cout << r.scenario_json << '\n';
        return kExitOk;
      }
      return run_demo(*d, out_dir.empty() ? std::filesystem::path("out") / d->name : std::filesystem::path(out_dir));
    }
    if (*run) {
      const Scenario sc = load_scenario(scenario_path);
      return run_and_write(sc, out_dir.empty() ? sc.output_dir : std::filesystem::path(out_dir), std::cout);
    }
    if (*validate) {
      const Scenario sc = load_scenario(scenario_path);
      return validate_scenario(sc, samples);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const UnreachableTrajectory& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace quatslide
