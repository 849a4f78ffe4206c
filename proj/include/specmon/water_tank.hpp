#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "specmon/trace.hpp"

namespace specmon::tank {

// Demo defaults; invented configuration, not measured data.
struct ControllerParams {
  double kp = 1.0;
  double ki = 0.2;
  double kd = 0.5;
  double set_point = 5.0;
  double time_step = 0.1;
};

struct ControllerState {
  double integral_accum = 0.0;
  double old_error = 0.0;
};

struct PlantState {
  double level = 0.0;
  double leak_coeff = 0.3;
  double pump_gain = 1.0;
};

struct ControllerOutput {
  double command = 0.0;
  double error = 0.0;
  double p_term = 0.0;
  double i_term = 0.0;
  double d_term = 0.0;
  ControllerState state;
};

// Operation order matches the bundled spec's postconditions term for term,
// so a clean run reproduces the monitor's arithmetic exactly.
ControllerOutput step_controller(const ControllerParams& params, double sensor, const ControllerState& state);
PlantState step_plant(const PlantState& plant, double command, double dt);

struct AttackScenario {
  enum class Kind { None, FalseData, ParamOverwrite };
  Kind kind = Kind::None;
  std::uint64_t start_step = 1;
  double bias = 0.0;       // FalseData
  std::string gain;        // ParamOverwrite: kp, ki or kd
  double value = 0.0;      // ParamOverwrite

  static AttackScenario none() { return {}; }
  static AttackScenario false_data(std::uint64_t start, double bias);
  static AttackScenario param_overwrite(std::uint64_t start, std::string gain, double value);

  // "none" | "false-data:START:BIAS" | "param:START:GAIN:VALUE".
  // Throws std::invalid_argument.
  static AttackScenario parse(std::string_view text);
  std::string describe() const;
};

struct SimulationResult {
  std::uint64_t steps = 0;
  PlantState plant;
  ControllerState controller;
  std::vector<std::uint64_t> step_first_seq;  // seq of each step's controller-step call
};

// Emits one controller-step activation per step through `probe`.
SimulationResult run_simulation(const ControllerParams& params, const PlantState& plant0,
                                const AttackScenario& scenario, std::uint64_t steps, ProbeHandle& probe);

// Convenience: run into memory.
std::vector<RuntimeEvent> simulate_trace(const ControllerParams& params, const PlantState& plant0,
                                         const AttackScenario& scenario, std::uint64_t steps,
                                         SimulationResult* result = nullptr);

inline constexpr double kDefaultLevelTolerance = 1e-6;

// Root inputs the trace does not carry: gains, plant constants, initial state.
Bindings monitor_parameters(const ControllerParams& params, const PlantState& plant0,
                            double level_tol = kDefaultLevelTolerance);

}  // namespace specmon::tank

namespace specmon {

// Source text of the bundled water-tank spec.
std::string_view bundled_spec();

}  // namespace specmon
