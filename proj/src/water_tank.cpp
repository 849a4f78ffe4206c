#include "specmon/water_tank.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "specmon/sexpr.hpp"

namespace specmon::tank {

ControllerOutput step_controller(const ControllerParams& params, double sensor, const ControllerState& state) {
  ControllerOutput out;
  out.error = params.set_point - sensor;
  out.p_term = params.kp * out.error;
  out.state.integral_accum = state.integral_accum + out.error * params.time_step;
  out.i_term = params.ki * out.state.integral_accum;
  out.d_term = params.kd * ((out.error - state.old_error) / params.time_step);
  out.command = out.p_term + out.i_term + out.d_term;
  out.state.old_error = out.error;
  return out;
}

PlantState step_plant(const PlantState& plant, double command, double dt) {
  PlantState next = plant;
  const double raw = plant.level + dt * (plant.pump_gain * command - plant.leak_coeff * plant.level);
  next.level = raw > 0 ? raw : 0.0;
  return next;
}

AttackScenario AttackScenario::false_data(std::uint64_t start, double bias) {
  AttackScenario s;
  s.kind = Kind::FalseData;
  s.start_step = start;
  s.bias = bias;
  return s;
}

AttackScenario AttackScenario::param_overwrite(std::uint64_t start, std::string gain, double value) {
  if (gain != "kp" && gain != "ki" && gain != "kd") throw std::invalid_argument("gain must be kp, ki or kd");
  AttackScenario s;
  s.kind = Kind::ParamOverwrite;
  s.start_step = start;
  s.gain = std::move(gain);
  s.value = value;
  return s;
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::uint64_t parse_step(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) {
    throw std::invalid_argument("bad start step '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

AttackScenario AttackScenario::parse(std::string_view text) {
  if (text == "none") return none();
  auto parts = split(text, ':');
  if (parts[0] == "false-data" && parts.size() == 3) return false_data(parse_step(parts[1]), parse_double(parts[2]));
  if (parts[0] == "param" && parts.size() == 4) {
    return param_overwrite(parse_step(parts[1]), std::string(parts[2]), parse_double(parts[3]));
  }
  throw std::invalid_argument("unknown attack '" + std::string(text) +
                              "' (expected none, false-data:START:BIAS or param:START:GAIN:VALUE)");
}

std::string AttackScenario::describe() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::FalseData:
      return "false-data from step " + std::to_string(start_step) + ", bias " + format_number(bias);
    case Kind::ParamOverwrite:
      return "param overwrite from step " + std::to_string(start_step) + ", " + gain + " = " + format_number(value);
  }
  return "none";
}

SimulationResult run_simulation(const ControllerParams& params, const PlantState& plant0,
                                const AttackScenario& scenario, std::uint64_t steps, ProbeHandle& probe) {
  const std::string root = "controller-step";
  auto at = [&](const char* inst) { return root + "/" + inst; };

  SimulationResult res;
  PlantState plant = plant0;
  ControllerState state;
  ControllerParams live = params;

  for (std::uint64_t k = 1; k <= steps; ++k) {
    const bool attacking = scenario.kind != AttackScenario::Kind::None && k >= scenario.start_step;
    if (attacking && scenario.kind == AttackScenario::Kind::ParamOverwrite) {
      if (scenario.gain == "kp") live.kp = scenario.value;
      if (scenario.gain == "ki") live.ki = scenario.value;
      if (scenario.gain == "kd") live.kd = scenario.value;
    }
    double sensor = plant.level;
    if (attacking && scenario.kind == AttackScenario::Kind::FalseData) sensor += scenario.bias;

    const double ts = static_cast<double>(k - 1) * params.time_step;
    const ControllerOutput c = step_controller(live, sensor, state);
    const PlantState next = step_plant(plant, c.command, params.time_step);

    res.step_first_seq.push_back(
        probe.emit(EventKind::Call, root, root, {{"set-point", params.set_point}, {"sens-val", sensor}}, ts));
    probe.emit(EventKind::Call, "compute-error", at("err-comp"), {}, ts);
    probe.emit(EventKind::Return, "compute-error", at("err-comp"), {{"the-error", c.error}}, ts);
    probe.emit(EventKind::Call, "compute-proportional", at("comp-prop"), {}, ts);
    probe.emit(EventKind::Return, "compute-proportional", at("comp-prop"), {{"prop-term", c.p_term}}, ts);
    probe.emit(EventKind::Call, "compute-integral", at("comp-int"), {}, ts);
    probe.emit(EventKind::Return, "compute-integral", at("comp-int"),
               {{"int-term", c.i_term}, {"new-accum", c.state.integral_accum}}, ts);
    probe.emit(EventKind::Emit, "accum-error", root, {}, ts);
    probe.emit(EventKind::Call, "compute-derivative", at("comp-der"), {}, ts);
    probe.emit(EventKind::Return, "compute-derivative", at("comp-der"), {{"der-term", c.d_term}}, ts);
    probe.emit(EventKind::Call, "compute-sum", at("summation"), {}, ts);
    probe.emit(EventKind::Return, "compute-sum", at("summation"), {{"command", c.command}}, ts);
    probe.emit(EventKind::Call, "integrate-plant", at("plant-model"), {}, ts);
    probe.emit(EventKind::Return, "integrate-plant", at("plant-model"), {{"next-level", next.level}}, ts);
    probe.emit(EventKind::Emit, "update-state", root, {}, ts);
    probe.emit(EventKind::Return, root, root, {{"com", c.command}}, ts);

    state = c.state;
    plant = next;
  }
  res.steps = steps;
  res.plant = plant;
  res.controller = state;
  return res;
}

std::vector<RuntimeEvent> simulate_trace(const ControllerParams& params, const PlantState& plant0,
                                         const AttackScenario& scenario, std::uint64_t steps,
                                         SimulationResult* result) {
  VectorSink sink;
  SimulationResult r;
  {
    ProbeHandle probe(sink);
    r = run_simulation(params, plant0, scenario, steps, probe);
  }
  if (result) *result = r;
  return sink.take();
}

Bindings monitor_parameters(const ControllerParams& params, const PlantState& plant0, double level_tol) {
  return {
      {"kp", params.kp},
      {"ki", params.ki},
      {"kd", params.kd},
      {"time-step", params.time_step},
      {"leak-coeff", plant0.leak_coeff},
      {"pump-gain", plant0.pump_gain},
      {"level-tol", level_tol},
      {"old-error", 0.0},
      {"integral-accum", 0.0},
      {"predicted-level", plant0.level},
  };
}

}  // namespace specmon::tank
