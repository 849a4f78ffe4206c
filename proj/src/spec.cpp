#include "specmon/spec.hpp"

#include <set>

namespace specmon {

const ComponentRef* EnsembleDef::find_component(std::string_view instance) const {
  for (const auto& c : components) {
    if (c.instance == instance) return &c;
  }
  return nullptr;
}

const EnsembleDef* AppSpec::find_ensemble(std::string_view type) const {
  auto it = ensembles.find(type);
  return it == ensembles.end() ? nullptr : &it->second;
}

const BehaviorModelDef* AppSpec::find_behavior(const std::string& type, const std::string& mode) const {
  auto it = behaviors.find({type, mode});
  return it == behaviors.end() ? nullptr : &it->second;
}

bool AppSpec::has_type(std::string_view type) const {
  if (ensembles.contains(type)) return true;
  for (const auto& [key, _] : behaviors) {
    if (key.first == type) return true;
  }
  return false;
}

std::string find_top_component(const AppSpec& spec) {
  std::set<std::string> types;
  for (const auto& [name, _] : spec.ensembles) types.insert(name);
  for (const auto& [key, _] : spec.behaviors) types.insert(key.first);
  std::set<std::string> used;
  for (const auto& [_, e] : spec.ensembles) {
    for (const auto& c : e.components) used.insert(c.type);
  }
  std::string top;
  for (const auto& t : types) {
    if (used.contains(t)) continue;
    if (!top.empty()) return {};
    top = t;
  }
  return top;
}

const std::set<std::string, std::less<>>& rule_predicates() {
  static const std::set<std::string, std::less<>> preds = {"compromised", "attack", "observed", "vulnerable"};
  return preds;
}

}  // namespace specmon

namespace specmon {

ComponentInterface resolve_interface(const AppSpec& spec, const std::string& type) {
  ComponentInterface ci;
  ci.type = type;
  if (const EnsembleDef* e = spec.find_ensemble(type)) {
    ci.ensemble = e;
    ci.entry_auto = e->entry_auto;
    ci.entry_events = e->entry_events;
    ci.exit_events = e->exit_events;
    ci.allowable_events = e->allowable_events;
    ci.inputs = e->inputs;
    ci.outputs = e->outputs;
    for (const auto& r : e->resources) ci.resources.push_back(r.name);
    ci.vulnerabilities = e->vulnerabilities;
    return ci;
  }
  const BehaviorModelDef* b = spec.find_behavior(type, std::string(kNormalMode));
  if (!b) {
    for (const auto& [key, model] : spec.behaviors) {
      if (key.first == type) {
        b = &model;
        break;
      }
    }
  }
  if (b) {
    ci.inputs = b->inputs;
    ci.outputs = b->outputs;
  }
  ci.entry_events = {type};
  ci.exit_events = {type};
  return ci;
}

}  // namespace specmon
