#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specmon/condition.hpp"
#include "specmon/sexpr.hpp"

namespace specmon {

inline constexpr std::string_view kNormalMode = "normal";
inline constexpr std::string_view kCompromisedMode = "compromised";

// One `:components` entry: (instance :type type :models (modes...)).
struct ComponentRef {
  std::string instance;
  std::string type;
  std::vector<std::string> models;
  SourceLoc loc;
  friend bool operator==(const ComponentRef&, const ComponentRef&) = default;
};

// (src-port src-instance dst-port dst-instance). An instance equal to the
// enclosing ensemble's name refers to the ensemble's own ports; a link from
// the ensemble's output to its own input carries state to the next activation.
struct DataFlowDef {
  std::string src_port;
  std::string src_instance;
  std::string dst_port;
  std::string dst_instance;
  SourceLoc loc;
  friend bool operator==(const DataFlowDef&, const DataFlowDef&) = default;
};

// (branch-instance guard target-instance)
struct ControlFlowDef {
  std::string branch;
  CondExpr guard;
  std::string target;
  SourceLoc loc;
  friend bool operator==(const ControlFlowDef&, const ControlFlowDef&) = default;
};

struct SplitBranch {
  std::string target;
  CondExpr guard;
  friend bool operator==(const SplitBranch&, const SplitBranch&) = default;
};

// (source (target guard) ...)
struct SplitDef {
  std::string source;
  std::vector<SplitBranch> branches;
  SourceLoc loc;
  friend bool operator==(const SplitDef&, const SplitDef&) = default;
};

// (target (required ...))
struct JoinDef {
  std::string target;
  std::vector<std::string> required;
  SourceLoc loc;
  friend bool operator==(const JoinDef&, const JoinDef&) = default;
};

// `name` or `(name kind)`
struct ResourceDef {
  std::string name;
  std::string kind;
  SourceLoc loc;
  friend bool operator==(const ResourceDef&, const ResourceDef&) = default;
};

struct EnsembleDef {
  std::string form = "define-ensemble";  // or define-component-type
  std::string name;
  bool entry_auto = false;
  std::vector<std::string> entry_events;
  std::vector<std::string> exit_events;
  std::vector<std::string> allowable_events;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> behavior_modes;
  std::vector<ComponentRef> components;
  std::vector<ControlFlowDef> controlflows;
  std::vector<SplitDef> splits;
  std::vector<JoinDef> joins;
  std::vector<DataFlowDef> dataflows;
  std::vector<ResourceDef> resources;
  std::vector<SExpr> resource_mapping;  // opaque
  std::vector<SExpr> model_mappings;    // opaque
  std::vector<std::string> vulnerabilities;
  SourceLoc loc;

  const ComponentRef* find_component(std::string_view instance) const;
  friend bool operator==(const EnsembleDef&, const EnsembleDef&) = default;
};

struct BehaviorModelDef {
  std::string component_type;
  std::string mode;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> allowable_events;
  std::vector<CondExpr> prerequisites;
  std::vector<CondExpr> postconditions;
  std::vector<CondExpr> invariant;
  SourceLoc loc;
  friend bool operator==(const BehaviorModelDef&, const BehaviorModelDef&) = default;
};

struct AttackType {
  std::string name;
  double prior = 0.0;
  SourceLoc loc;
  friend bool operator==(const AttackType&, const AttackType&) = default;
};

struct VulnerabilityMapping {
  std::string attack_type;
  std::string vulnerability;
  double probability = 0.0;
  SourceLoc loc;
  friend bool operator==(const VulnerabilityMapping&, const VulnerabilityMapping&) = default;
};

struct AttackModelDef {
  std::string name;
  std::vector<AttackType> attack_types;
  std::vector<VulnerabilityMapping> vulnerability_mapping;
  SourceLoc loc;
  friend bool operator==(const AttackModelDef&, const AttackModelDef&) = default;
};

struct AttackConsequence {
  enum class Kind { AttackActive, Compromised };
  Kind kind = Kind::AttackActive;
  std::string target;  // attack type, or instance/resource name
  SourceLoc loc;
  friend bool operator==(const AttackConsequence&, const AttackConsequence&) = default;
};

struct AttackRuleDef {
  std::string name;
  std::string direction = "forward";
  std::vector<CondExpr> conditions;
  std::vector<AttackConsequence> consequences;
  SourceLoc loc;
  friend bool operator==(const AttackRuleDef&, const AttackRuleDef&) = default;
};

using BehaviorKey = std::pair<std::string, std::string>;  // (component type, mode)

struct AppSpec {
  std::map<std::string, EnsembleDef, std::less<>> ensembles;
  std::map<BehaviorKey, BehaviorModelDef> behaviors;
  std::map<std::string, AttackModelDef, std::less<>> attack_models;
  std::vector<AttackRuleDef> attack_rules;
  // Type never used as a sub-component; empty when zero or several qualify.
  std::string top_component;

  const EnsembleDef* find_ensemble(std::string_view type) const;
  const BehaviorModelDef* find_behavior(const std::string& type, const std::string& mode) const;
  bool has_type(std::string_view type) const;
  friend bool operator==(const AppSpec&, const AppSpec&) = default;
};

// Recomputes AppSpec::top_component from the current definitions.
std::string find_top_component(const AppSpec& spec);

// Predicates admitted inside attack-rule conditions, next to the core operators.
const std::set<std::string, std::less<>>& rule_predicates();

}  // namespace specmon

namespace specmon {

// The externally visible interface of a component type. Taken from its
// EnsembleDef when there is one; otherwise from its behavior models, with
// entry and exit events defaulting to the type name.
struct ComponentInterface {
  std::string type;
  bool entry_auto = false;
  std::vector<std::string> entry_events;
  std::vector<std::string> exit_events;
  std::vector<std::string> allowable_events;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> resources;
  std::vector<std::string> vulnerabilities;
  const EnsembleDef* ensemble = nullptr;  // null for leaf behavior-only types
};

ComponentInterface resolve_interface(const AppSpec& spec, const std::string& type);

}  // namespace specmon
