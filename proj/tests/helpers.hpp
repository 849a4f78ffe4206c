#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "specmon/monitor.hpp"
#include "specmon/spec_parser.hpp"
#include "specmon/water_tank.hpp"

namespace specmon::testing {

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(SPECMON_CORPUS_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing corpus file " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const AppSpec& tank_spec() {
  static const AppSpec spec = parse_spec(bundled_spec());
  return spec;
}

inline MonitorConfig tank_config(const tank::ControllerParams& p = {}, const tank::PlantState& plant = {}) {
  MonitorConfig c;
  c.parameters = tank::monitor_parameters(p, plant);
  c.check_invariants = true;
  return c;
}

inline RuntimeEvent event(std::uint64_t seq, EventKind kind, std::string name, std::string path, Bindings values = {}) {
  RuntimeEvent e;
  e.seq = seq;
  e.kind = kind;
  e.name = std::move(name);
  e.path = std::move(path);
  e.values = std::move(values);
  return e;
}

}  // namespace specmon::testing

namespace specmon::testing {

// The bundled component types with every definition of the types in `part`
// replaced by the ones from `part`. Attack models and rules are left out; they
// name resources of the bundled controller-step.
inline AppSpec with_companions(const AppSpec& part) {
  AppSpec s = parse_spec(bundled_spec());
  std::set<std::string> types;
  for (const auto& [name, e] : part.ensembles) types.insert(name);
  for (const auto& [key, b] : part.behaviors) types.insert(key.first);
  for (const auto& t : types) s.ensembles.erase(t);
  std::erase_if(s.behaviors, [&](const auto& kv) { return types.contains(kv.first.first); });
  for (const auto& [name, e] : part.ensembles) s.ensembles.emplace(name, e);
  for (const auto& [key, b] : part.behaviors) s.behaviors.emplace(key, b);
  s.attack_models.clear();
  s.attack_rules.clear();
  s.top_component = find_top_component(s);
  return s;
}

}  // namespace specmon::testing
