// specmon: check specs, monitor traces, run the water-tank simulator.
//
// Exit codes: 0 ok, 1 usage/IO error, 2 invalid spec, 3 ALARM, 4 INCOMPLETE.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "specmon/monitor.hpp"
#include "specmon/report.hpp"
#include "specmon/spec_parser.hpp"
#include "specmon/trace.hpp"
#include "specmon/validator.hpp"
#include "specmon/water_tank.hpp"

namespace {

using namespace specmon;

enum Exit { kOk = 0, kUsage = 1, kInvalidSpec = 2, kAlarm = 3, kIncomplete = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write " + path);
}

bool use_color() {
  const char* env = std::getenv("SPECMON_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(STDOUT_FILENO) != 0;
}

int exit_for(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Ok: return kOk;
    case VerdictKind::Alarm: return kAlarm;
    case VerdictKind::Incomplete: return kIncomplete;
  }
  return kUsage;
}

// Parses and validates; prints problems and returns false when unusable.
bool load_spec(const std::string& path, AppSpec& spec, bool print_ok) {
  const std::string text = read_file(path);
  try {
    spec = parse_spec(text);
  } catch (const ParseError& e) {
    std::cout << path << ":" << e.loc().line << ":" << e.loc().column << ": parse error: " << e.message() << "\n";
    return false;
  }
  ValidationReport report = validate_spec(spec);
  if (!report.ok() || print_ok) std::cout << format_report(report);
  return report.ok();
}

int cmd_check(const std::string& path) {
  AppSpec spec;
  return load_spec(path, spec, true) ? kOk : kInvalidSpec;
}

struct MonitorOptions {
  std::string spec_path;
  std::string trace_path;
  std::string params_path;
  std::string report_path;
  double atol = 1e-9;
  double rtol = 1e-9;
  bool halt_on_first = false;
  bool no_attack_rules = false;
};

int cmd_monitor(const MonitorOptions& o) {
  AppSpec spec;
  if (!load_spec(o.spec_path, spec, false)) return kInvalidSpec;

  MonitorConfig config;
  config.tolerance = {o.atol, o.rtol};
  config.halt_on_first = o.halt_on_first;
  config.attack_rules_enabled = !o.no_attack_rules;
  if (!o.params_path.empty()) {
    try {
      config.parameters = parse_bindings_json(read_file(o.params_path));
    } catch (const TraceError& e) {
      throw UsageError(o.params_path + ": " + e.what());
    }
  }

  std::ifstream in(o.trace_path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + o.trace_path);
  TraceReader reader(in);
  Verdict v;
  try {
    v = run_monitor(spec, reader, config);
  } catch (const TraceError& e) {
    std::cerr << "specmon: " << o.trace_path << ": " << e.what() << "\n";
    return kUsage;
  } catch (const EngineError& e) {
    std::cerr << "specmon: engine error: " << e.what() << "\n";
    return kUsage;
  }
  std::cout << format_text_report(v, use_color());
  if (!o.report_path.empty()) write_file(o.report_path, format_json_report(v));
  return exit_for(v);
}

struct SimConfig {
  tank::ControllerParams params;
  tank::PlantState plant;
};

SimConfig load_seed_config(const std::string& path) {
  SimConfig c;
  if (path.empty()) return c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(path + ": expected a JSON object");
  const std::map<std::string, double*> fields = {
      {"kp", &c.params.kp},           {"ki", &c.params.ki},
      {"kd", &c.params.kd},           {"set_point", &c.params.set_point},
      {"time_step", &c.params.time_step}, {"leak_coeff", &c.plant.leak_coeff},
      {"pump_gain", &c.plant.pump_gain},  {"level", &c.plant.level},
  };
  for (const auto& [k, v] : j.items()) {
    auto it = fields.find(k);
    if (it == fields.end()) throw UsageError(path + ": unknown key '" + k + "'");
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw UsageError(path + ": '" + k + "' must be a number");
    *it->second = v.get<double>();
  }
  if (c.params.time_step <= 0) throw UsageError(path + ": time_step must be positive");
  if (c.plant.level < 0 || c.plant.leak_coeff < 0) throw UsageError(path + ": level and leak_coeff must be >= 0");
  return c;
}

struct SimulateOptions {
  std::uint64_t steps = 500;
  std::string attack = "none";
  std::string out_path;
  std::string seed_config;
  std::string params_out;
};

int cmd_simulate(const SimulateOptions& o) {
  tank::AttackScenario scenario;
  try {
    scenario = tank::AttackScenario::parse(o.attack);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.steps == 0) throw UsageError("--steps must be at least 1");
  const SimConfig cfg = load_seed_config(o.seed_config);

  tank::SimulationResult res;
  std::ostream& summary = o.out_path.empty() ? std::cerr : std::cout;
  if (o.out_path.empty()) {
    StreamSink sink(std::cout);
    ProbeHandle probe(sink);
    res = tank::run_simulation(cfg.params, cfg.plant, scenario, o.steps, probe);
  } else {
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + o.out_path);
    StreamSink sink(out);
    ProbeHandle probe(sink);
    res = tank::run_simulation(cfg.params, cfg.plant, scenario, o.steps, probe);
  }
  if (!o.params_out.empty()) write_file(o.params_out, format_bindings_json(tank::monitor_parameters(cfg.params, cfg.plant)));

  summary << "steps: " << res.steps << "\n"
          << "final level: " << format_number(res.plant.level) << "\n"
          << "attack: " << scenario.describe() << "\n";
  return kOk;
}

int cmd_demo(std::uint64_t steps, double atol, double rtol) {
  const AppSpec spec = parse_spec(bundled_spec());
  const tank::ControllerParams params;
  const tank::PlantState plant;

  MonitorConfig config;
  config.tolerance = {atol, rtol};
  config.parameters = tank::monitor_parameters(params, plant);

  struct Case {
    const char* label;
    tank::AttackScenario scenario;
    VerdictKind expected;
  };
  const Case cases[] = {
      {"clean", tank::AttackScenario::none(), VerdictKind::Ok},
      {"kd overwrite", tank::AttackScenario::param_overwrite(50, "kd", 10 * params.kd), VerdictKind::Alarm},
      {"false data", tank::AttackScenario::false_data(100, -0.5), VerdictKind::Alarm},
  };

  bool all_match = true;
  for (const auto& c : cases) {
    const Verdict v = run_monitor(spec, tank::simulate_trace(params, plant, c.scenario, steps), config);
    const bool match = v.kind == c.expected;
    all_match = all_match && match;
    std::cout << c.label << " (" << c.scenario.describe() << "): " << to_string(v.kind);
    if (!v.alarms.empty()) {
      const Alarm& a = v.alarms.front();
      std::cout << ", first alarm " << to_string(a.reason) << " at " << a.path << " seq " << a.seq;
    }
    std::cout << (match ? "" : "  [expected " + std::string(to_string(c.expected)) + "]") << "\n";
  }
  std::cout << (all_match ? "demo: all verdicts as expected\n" : "demo: MISMATCH\n");
  return all_match ? kOk : kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Specification-based runtime security monitor"};
  app.require_subcommand(1);

  std::string check_path;
  auto* check = app.add_subcommand("check", "Validate a .bspec file");
  check->add_option("spec", check_path, "Spec file")->required();

  MonitorOptions mon;
  auto* monitor = app.add_subcommand("monitor", "Run the monitor over a .trace file");
  monitor->add_option("spec", mon.spec_path, "Spec file")->required();
  monitor->add_option("trace", mon.trace_path, "Trace file")->required();
  monitor->add_option("--atol", mon.atol, "Absolute tolerance for equal")->check(CLI::NonNegativeNumber);
  monitor->add_option("--rtol", mon.rtol, "Relative tolerance for equal")->check(CLI::NonNegativeNumber);
  monitor->add_flag("--halt-on-first", mon.halt_on_first, "Stop at the first alarm");
  monitor->add_flag("--no-attack-rules", mon.no_attack_rules, "Do not evaluate attack rules");
  monitor->add_option("--report", mon.report_path, "Write the JSON report here");
  monitor->add_option("--params", mon.params_path, "JSON object of root input values (gains, initial state)");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a water-tank trace");
  simulate->add_option("--steps", sim.steps, "Control iterations");
  simulate->add_option("--attack", sim.attack, "none | false-data:START:BIAS | param:START:GAIN:VALUE");
  simulate->add_option("--out", sim.out_path, "Trace output (default stdout)");
  simulate->add_option("--seed-config", sim.seed_config, "JSON with kp, ki, kd, set_point, time_step, leak_coeff, "
                                                         "pump_gain, level");
  simulate->add_option("--params-out", sim.params_out, "Write the matching monitor parameters here");

  std::uint64_t demo_steps = 500;
  double demo_atol = 1e-9, demo_rtol = 1e-9;
  auto* demo = app.add_subcommand("demo", "Clean run plus both attacks, end to end");
  demo->add_option("--steps", demo_steps, "Control iterations per scenario")->check(CLI::Range(150, 1000000));
  demo->add_option("--atol", demo_atol, "Absolute tolerance for equal")->check(CLI::NonNegativeNumber);
  demo->add_option("--rtol", demo_rtol, "Relative tolerance for equal")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(check_path);
    if (*monitor) return cmd_monitor(mon);
    if (*simulate) return cmd_simulate(sim);
    if (*demo) return cmd_demo(demo_steps, demo_atol, demo_rtol);
  } catch (const UsageError& e) {
    std::cerr << "specmon: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "specmon: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
