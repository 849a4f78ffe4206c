#include "specmon/validator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace specmon {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::UnresolvedPort: return "unresolved port";
    case ViolationKind::CyclicDataflow: return "cyclic dataflow";
    case ViolationKind::MissingBehaviorModel: return "missing behavior model";
    case ViolationKind::UnknownComponent: return "unknown component";
    case ViolationKind::UnboundIdentifier: return "unbound identifier";
    case ViolationKind::MalformedCondition: return "malformed condition";
    case ViolationKind::UndeclaredAttackType: return "undeclared attack type";
    case ViolationKind::DuplicateName: return "duplicate name";
    case ViolationKind::DuplicateDataflowTarget: return "duplicate dataflow target";
    case ViolationKind::PortMismatch: return "port mismatch";
    case ViolationKind::CyclicDecomposition: return "cyclic decomposition";
    case ViolationKind::TopComponent: return "top component";
  }
  return "violation";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

namespace {

bool contains(const std::vector<std::string>& xs, std::string_view x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

class Validator {
 public:
  explicit Validator(const AppSpec& spec) : spec_(spec) {}

  ValidationReport run() {
    for (const auto& [_, e] : spec_.ensembles) check_ensemble(e);
    check_decomposition_cycles();
    for (const auto& [_, b] : spec_.behaviors) check_behavior(b);
    collect_attack_types();
    for (const auto& [_, m] : spec_.attack_models) check_attack_model(m);
    for (const auto& r : spec_.attack_rules) check_rule(r);
    if (spec_.top_component.empty()) {
      add(ViolationKind::TopComponent, "specification needs exactly one top component", first_loc());
    }
    return std::move(report_);
  }

 private:
  void add(ViolationKind kind, std::string message, SourceLoc loc) {
    report_.violations.push_back({kind, std::move(message), loc});
  }

  SourceLoc first_loc() const {
    SourceLoc best{1, 1};
    bool found = false;
    auto consider = [&](SourceLoc l) {
      if (!found || l.line < best.line || (l.line == best.line && l.column < best.column)) best = l;
      found = true;
    };
    for (const auto& [_, e] : spec_.ensembles) consider(e.loc);
    for (const auto& [_, b] : spec_.behaviors) consider(b.loc);
    for (const auto& [_, m] : spec_.attack_models) consider(m.loc);
    for (const auto& r : spec_.attack_rules) consider(r.loc);
    return best;
  }

  void check_condition(const CondExpr& c, const std::set<std::string, std::less<>>& extra,
                       const std::vector<std::string>* scope, const std::string& where) {
    std::vector<ShapeProblem> problems;
    check_shape(c, extra, problems);
    for (auto& p : problems) add(ViolationKind::MalformedCondition, where + ": " + p.message, p.loc);
    if (!scope) return;
    std::set<std::string> ids;
    collect_free_identifiers(c, ids);
    for (const auto& id : ids) {
      if (!contains(*scope, id)) {
        add(ViolationKind::UnboundIdentifier, where + ": identifier '" + id + "' is not a port in scope", c.loc);
      }
    }
  }

  void check_ensemble(const EnsembleDef& e) {
    std::map<std::string, const ComponentRef*> instances;
    for (const auto& c : e.components) {
      if (c.instance == e.name || !instances.emplace(c.instance, &c).second) {
        add(ViolationKind::DuplicateName, e.name + ": instance name '" + c.instance + "' is not unique", c.loc);
      }
      if (!spec_.has_type(c.type)) {
        add(ViolationKind::UnknownComponent, e.name + ": component type '" + c.type + "' has no definition", c.loc);
      }
      for (const auto& m : c.models) {
        if (!spec_.find_behavior(c.type, m)) {
          add(ViolationKind::MissingBehaviorModel, "no behavior model (" + c.type + " " + m + ")", c.loc);
        }
      }
    }
    for (const auto& m : e.behavior_modes) {
      if (!spec_.find_behavior(e.name, m)) {
        add(ViolationKind::MissingBehaviorModel, "no behavior model (" + e.name + " " + m + ")", e.loc);
      }
    }

    auto outputs_of = [&](const std::string& inst) -> std::vector<std::string> {
      auto it = instances.find(inst);
      if (it == instances.end()) return {};
      return resolve_interface(spec_, it->second->type).outputs;
    };
    auto inputs_of = [&](const std::string& inst) -> std::vector<std::string> {
      auto it = instances.find(inst);
      if (it == instances.end()) return {};
      return resolve_interface(spec_, it->second->type).inputs;
    };

    std::set<std::pair<std::string, std::string>> targets;
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& d : e.dataflows) {
      const bool src_self = d.src_instance == e.name;
      const bool dst_self = d.dst_instance == e.name;
      std::string problem;
      bool state_link = false;
      if (src_self && dst_self) {
        // pass-through input -> output, or state carried output -> input
        if (contains(e.inputs, d.src_port) && contains(e.outputs, d.dst_port)) {
        } else if (contains(e.outputs, d.src_port) && contains(e.inputs, d.dst_port)) {
          state_link = true;
        } else {
          problem = "self link must join an input to an output";
        }
      } else {
        if (src_self) {
          if (!contains(e.inputs, d.src_port)) problem = "'" + d.src_port + "' is not an input of " + e.name;
        } else if (!instances.contains(d.src_instance)) {
          problem = "unknown instance '" + d.src_instance + "'";
        } else if (!contains(outputs_of(d.src_instance), d.src_port)) {
          problem = "'" + d.src_port + "' is not an output of " + d.src_instance;
        }
        if (problem.empty()) {
          if (dst_self) {
            if (!contains(e.outputs, d.dst_port)) problem = "'" + d.dst_port + "' is not an output of " + e.name;
          } else if (!instances.contains(d.dst_instance)) {
            problem = "unknown instance '" + d.dst_instance + "'";
          } else if (!contains(inputs_of(d.dst_instance), d.dst_port)) {
            problem = "'" + d.dst_port + "' is not an input of " + d.dst_instance;
          }
        }
      }
      if (!problem.empty()) {
        add(ViolationKind::UnresolvedPort, e.name + ": dataflow " + d.src_port + "/" + d.src_instance + " -> " +
                                               d.dst_port + "/" + d.dst_instance + ": " + problem,
            d.loc);
        continue;
      }
      const std::string tag = state_link ? "state:" : "";
      if (!targets.insert({tag + d.dst_instance, d.dst_port}).second) {
        add(ViolationKind::DuplicateDataflowTarget,
            e.name + ": port " + d.dst_port + " of " + d.dst_instance + " has more than one incoming dataflow", d.loc);
      }
      if (!src_self && !dst_self) edges[d.src_instance].insert(d.dst_instance);
    }
    check_dataflow_cycles(e, edges);

    auto known = [&](const std::string& inst, SourceLoc loc, const char* what) {
      if (!instances.contains(inst)) {
        add(ViolationKind::UnknownComponent, e.name + ": " + what + " names unknown instance '" + inst + "'", loc);
        return false;
      }
      return true;
    };
    for (const auto& c : e.controlflows) {
      known(c.target, c.loc, "controlflow");
      if (known(c.branch, c.loc, "controlflow")) {
        auto scope = outputs_of(c.branch);
        check_condition(c.guard, {}, &scope, e.name + " controlflow guard");
      }
    }
    for (const auto& s : e.splits) {
      const bool src_ok = known(s.source, s.loc, "split");
      auto scope = outputs_of(s.source);
      for (const auto& b : s.branches) {
        known(b.target, s.loc, "split");
        if (src_ok) check_condition(b.guard, {}, &scope, e.name + " split guard");
      }
    }
    for (const auto& j : e.joins) {
      known(j.target, j.loc, "join");
      for (const auto& r : j.required) known(r, j.loc, "join");
    }
  }

  void check_dataflow_cycles(const EnsembleDef& e, const std::map<std::string, std::set<std::string>>& edges) {
    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::function<bool(const std::string&)> visit = [&](const std::string& n) {
      state[n] = 1;
      if (auto it = edges.find(n); it != edges.end()) {
        for (const auto& m : it->second) {
          if (state[m] == 1) return true;
          if (state[m] == 0 && visit(m)) return true;
        }
      }
      state[n] = 2;
      return false;
    };
    for (const auto& [n, _] : edges) {
      if (state[n] == 0 && visit(n)) {
        add(ViolationKind::CyclicDataflow, e.name + ": dataflows between sub-components form a cycle", e.loc);
        return;
      }
    }
  }

  void check_decomposition_cycles() {
    std::map<std::string, int> state;
    std::function<bool(const std::string&)> visit = [&](const std::string& t) {
      state[t] = 1;
      if (const EnsembleDef* e = spec_.find_ensemble(t)) {
        for (const auto& c : e->components) {
          if (state[c.type] == 1) return true;
          if (state[c.type] == 0 && visit(c.type)) return true;
        }
      }
      state[t] = 2;
      return false;
    };
    for (const auto& [name, e] : spec_.ensembles) {
      if (state[name] == 0 && visit(name)) {
        add(ViolationKind::CyclicDecomposition, name + ": component contains itself", e.loc);
        return;
      }
    }
  }

  void check_behavior(const BehaviorModelDef& b) {
    const std::string where = "(" + b.component_type + " " + b.mode + ")";
    std::vector<std::string> all = b.inputs;
    all.insert(all.end(), b.outputs.begin(), b.outputs.end());
    for (const auto& c : b.prerequisites) check_condition(c, {}, &b.inputs, where + " prerequisite");
    for (const auto& c : b.postconditions) check_condition(c, {}, &all, where + " postcondition");
    for (const auto& c : b.invariant) check_condition(c, {}, &all, where + " invariant");
    if (const EnsembleDef* e = spec_.find_ensemble(b.component_type)) {
      auto same = [](std::vector<std::string> a, std::vector<std::string> c) {
        std::sort(a.begin(), a.end());
        std::sort(c.begin(), c.end());
        return a == c;
      };
      if ((!b.inputs.empty() && !same(b.inputs, e->inputs)) || (!b.outputs.empty() && !same(b.outputs, e->outputs))) {
        add(ViolationKind::PortMismatch, where + ": ports differ from those declared for " + e->name, b.loc);
      }
    }
  }

  void collect_attack_types() {
    for (const auto& [_, m] : spec_.attack_models) {
      for (const auto& t : m.attack_types) attack_types_.insert(t.name);
    }
    for (const auto& [_, e] : spec_.ensembles) {
      for (const auto& c : e.components) known_targets_.insert(c.instance);
      for (const auto& r : e.resources) known_targets_.insert(r.name);
      known_targets_.insert(e.name);
    }
    for (const auto& [key, _] : spec_.behaviors) known_targets_.insert(key.first);
  }

  void check_attack_model(const AttackModelDef& m) {
    std::set<std::string> declared;
    for (const auto& t : m.attack_types) {
      if (!declared.insert(t.name).second) {
        add(ViolationKind::DuplicateName, m.name + ": attack type '" + t.name + "' declared twice", t.loc);
      }
    }
    for (const auto& v : m.vulnerability_mapping) {
      if (!declared.contains(v.attack_type)) {
        add(ViolationKind::UndeclaredAttackType, m.name + ": mapping uses undeclared attack type '" + v.attack_type + "'",
            v.loc);
      }
    }
  }

  void check_rule_predicates(const CondExpr& c, const std::string& where) {
    if (c.kind != CondExpr::Kind::Call) return;
    auto arg_name = [&](std::size_t i) -> std::string {
      return i < c.args.size() && c.args[i].kind == CondExpr::Kind::Ref ? c.args[i].name : std::string();
    };
    const std::size_t want = c.name == "vulnerable" ? 2 : 1;
    if (rule_predicates().contains(c.name)) {
      if (c.args.size() != want || arg_name(0).empty() || (want == 2 && arg_name(1).empty())) {
        add(ViolationKind::MalformedCondition, where + ": '" + c.name + "' takes " + std::to_string(want) + " name(s)",
            c.loc);
        return;
      }
      if (c.name == "attack" && !attack_types_.contains(arg_name(0))) {
        add(ViolationKind::UndeclaredAttackType, where + ": undeclared attack type '" + arg_name(0) + "'", c.loc);
      }
      if ((c.name == "compromised" || c.name == "vulnerable") && !known_targets_.contains(arg_name(0))) {
        add(ViolationKind::UnknownComponent, where + ": unknown component or resource '" + arg_name(0) + "'", c.loc);
      }
      return;
    }
    for (const auto& a : c.args) check_rule_predicates(a, where);
  }

  void check_rule(const AttackRuleDef& r) {
    const std::string where = "rule " + r.name;
    for (const auto& c : r.conditions) {
      check_condition(c, rule_predicates(), nullptr, where);
      check_rule_predicates(c, where);
    }
    for (const auto& c : r.consequences) {
      if (c.kind == AttackConsequence::Kind::AttackActive) {
        if (!attack_types_.contains(c.target)) {
          add(ViolationKind::UndeclaredAttackType, where + ": undeclared attack type '" + c.target + "'", c.loc);
        }
      } else if (!known_targets_.contains(c.target)) {
        add(ViolationKind::UnknownComponent, where + ": unknown component or resource '" + c.target + "'", c.loc);
      }
    }
  }

  const AppSpec& spec_;
  ValidationReport report_;
  std::set<std::string> attack_types_;
  std::set<std::string> known_targets_;
};

}  // namespace

ValidationReport validate_spec(const AppSpec& spec) { return Validator(spec).run(); }

std::string format_report(const ValidationReport& report) {
  if (report.ok()) return "specification is well-formed\n";
  std::string out;
  for (const auto& v : report.violations) {
    out += to_string(v.loc) + ": " + std::string(to_string(v.kind)) + ": " + v.message + "\n";
  }
  out += std::to_string(report.violations.size()) + " violation(s)\n";
  return out;
}

}  // namespace specmon
